//! Lossy beam-splitter channel with a multimode-squeezed environment.
//!
//! The environment, the input seed state and the classical modulation all
//! share the form `(1/2) diag(exp(g Omega), exp(-g Omega))`, so they are
//! diagonal in the same sine basis. The photon budget `N` per mode is split
//! between input squeezing (fraction `theta`) and classical modulation.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{exp_omega, exp_omega_covariance, mode_cosines, CovarianceMatrix};
use crate::special::bessel_i0;

/// Slack allowed above `theta = 1` before reporting a constraint violation.
pub const THETA_SLACK: f64 = 1e-12;

const BISECTION_MAX_ITER: usize = 200;
const BISECTION_TOL: f64 = 1e-12;

/// Physical channel setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Beam-splitter transmittivity, `0 <= eta <= 1`.
    pub eta: f64,
    /// Mean photon number per mode, `N > 0`.
    pub photons: f64,
    /// Memory strength `s` of the environment.
    pub memory: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, photons: f64, memory: f64) -> Result<Self> {
        let params = Self { eta, photons, memory };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("transmittivity must lie in [0, 1], got {}", self.eta),
            });
        }
        if !(self.photons > 0.0) || !self.photons.is_finite() {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: format!("photon number must be positive and finite, got {}", self.photons),
            });
        }
        if !self.memory.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("memory strength must be finite, got {}", self.memory),
            });
        }
        Ok(())
    }

    pub fn with_memory(self, memory: f64) -> Self {
        Self { memory, ..self }
    }
}

/// Shape of the classical modulation covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Both quadratures modulated, `Y = (1/2) diag(e^{y Omega}, e^{-y Omega})`.
    Symmetric,
    /// Only the q quadrature modulated, `Y = diag(e^{y Omega}, 0)`.
    SingleQuadrature,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Symmetric => "symmetric",
            Scheme::SingleQuadrature => "single-quadrature",
        }
    }
}

/// Optimization variables of the encoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingParams {
    /// Input entanglement (squeezing) parameter.
    pub r: f64,
    /// Classical correlation parameter.
    pub y: f64,
    pub scheme: Scheme,
}

impl EncodingParams {
    pub fn symmetric(r: f64, y: f64) -> Self {
        Self { r, y, scheme: Scheme::Symmetric }
    }

    pub fn single_quadrature(r: f64, y: f64) -> Self {
        Self { r, y, scheme: Scheme::SingleQuadrature }
    }
}

/// Number of channel uses: a finite block or the `n -> infinity` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modes {
    Finite(usize),
    Infinite,
}

impl Modes {
    pub fn finite(self) -> Option<usize> {
        match self {
            Modes::Finite(n) => Some(n),
            Modes::Infinite => None,
        }
    }
}

impl fmt::Display for Modes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modes::Finite(n) => write!(f, "{n}"),
            Modes::Infinite => f.write_str("inf"),
        }
    }
}

/// Split of the photon budget between squeezing and modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAccount {
    /// Fraction of `N` spent on input squeezing.
    pub theta: f64,
    /// Classical-noise scale `K`.
    pub k: f64,
}

/// Allowed interval of the entanglement parameter. Unbounded (infinite
/// endpoints) for a single mode, where `r` has no effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBounds {
    pub min: f64,
    pub max: f64,
}

impl RBounds {
    pub fn unbounded() -> Self {
        Self { min: f64::NEG_INFINITY, max: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.max.is_finite()
    }

    pub fn contains(&self, r: f64) -> bool {
        self.min <= r && r <= self.max
    }
}

fn check_modes(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    Ok(())
}

fn check_photons(photons: f64) -> Result<()> {
    if !(photons > 0.0) {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("photon number must be positive, got {photons}"),
        });
    }
    Ok(())
}

/// `sum_k (cosh(2 g c_k) - 1)` written as `2 sinh^2` to keep precision at
/// small `g`.
fn cosh_excess_sum(gamma: f64, cosines: &[f64]) -> f64 {
    cosines
        .iter()
        .map(|c| {
            let h = (gamma * c).sinh();
            2.0 * h * h
        })
        .sum()
}

/// Fraction of the photon budget spent on squeezing the input,
/// `[sum_k cosh(2 r c_k) - n] / (2 n N)`.
///
/// Values above one are returned as-is; callers enforce the bound.
pub fn theta_n(r: f64, n: usize, photons: f64) -> f64 {
    theta_from_cosines(r, &mode_cosines(n), photons)
}

pub(crate) fn theta_from_cosines(r: f64, cosines: &[f64], photons: f64) -> f64 {
    let n = cosines.len() as f64;
    cosh_excess_sum(r, cosines) / (2.0 * n * photons)
}

/// Limit of [`theta_n`] as `n -> infinity`: `(I0(2r) - 1) / (2N)`.
pub fn theta_limit(r: f64, photons: f64) -> Result<f64> {
    Ok((bessel_i0(2.0 * r)? - 1.0) / (2.0 * photons))
}

fn theta_for(modes: Modes, r: f64, photons: f64) -> Result<f64> {
    match modes {
        Modes::Finite(n) => Ok(theta_n(r, n, photons)),
        Modes::Infinite => theta_limit(r, photons),
    }
}

/// Positive `r` with `theta(r) = target`, by bracket doubling from
/// `[0, 1]` followed by bisection.
pub fn r_for_theta(modes: Modes, photons: f64, target: f64) -> Result<f64> {
    check_photons(photons)?;
    if let Modes::Finite(n) = modes {
        check_modes(n)?;
        if n == 1 {
            return Ok(f64::INFINITY);
        }
    }
    if !(target > 0.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("target fraction must be positive, got {target}"),
        });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut iterations = 0;
    while theta_for(modes, hi, photons)? <= target {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > BISECTION_MAX_ITER || hi > 350.0 {
            return Err(Error::Solver(format!("no bracket for theta = {target}")));
        }
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if theta_for(modes, mid, photons)? > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Solver(format!(
        "bisection for theta = {target} did not converge in {BISECTION_MAX_ITER} iterations"
    )))
}

/// Interval of `r` satisfying the energy constraint `theta <= 1`.
pub fn r_bounds(modes: Modes, photons: f64) -> Result<RBounds> {
    if modes == Modes::Finite(1) {
        check_photons(photons)?;
        return Ok(RBounds::unbounded());
    }
    let max = r_for_theta(modes, photons, 1.0)?;
    Ok(RBounds { min: -max, max })
}

/// Normalization sum of the modulation matrix `Y` (its trace for the
/// symmetric scheme, the trace of `e^{y Omega}` for the single-quadrature
/// one).
pub(crate) fn modulation_norm(y: f64, cosines: &[f64], scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Symmetric => cosines.iter().map(|c| (2.0 * y * c).cosh()).sum(),
        Scheme::SingleQuadrature => cosines.iter().map(|c| (2.0 * y * c).exp()).sum(),
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 1.0 + THETA_SLACK || theta.is_nan() {
        return Err(Error::ConstraintViolation { theta });
    }
    Ok(())
}

/// Classical-noise scale `K_n = 2nN(1 - theta) / sum_k w_k(y)`, where the
/// weights are `cosh(2 y c_k)` (symmetric) or `exp(2 y c_k)`
/// (single-quadrature).
pub fn classical_k(y: f64, n: usize, photons: f64, theta: f64, scheme: Scheme) -> Result<f64> {
    check_modes(n)?;
    check_photons(photons)?;
    check_theta(theta)?;
    Ok(classical_k_from_cosines(y, &mode_cosines(n), photons, theta, scheme))
}

pub(crate) fn classical_k_from_cosines(
    y: f64,
    cosines: &[f64],
    photons: f64,
    theta: f64,
    scheme: Scheme,
) -> f64 {
    let n = cosines.len() as f64;
    let budget = (1.0 - theta).max(0.0);
    2.0 * n * photons * budget / modulation_norm(y, cosines, scheme)
}

/// `theta_n` and `K_n` for a finite block, enforcing `theta_n <= 1`.
pub fn energy_account(n: usize, photons: f64, enc: &EncodingParams) -> Result<EnergyAccount> {
    check_modes(n)?;
    check_photons(photons)?;
    let cosines = mode_cosines(n);
    let theta = theta_from_cosines(enc.r, &cosines, photons);
    check_theta(theta)?;
    let k = classical_k_from_cosines(enc.y, &cosines, photons, theta, enc.scheme);
    Ok(EnergyAccount { theta, k })
}

/// Environment, input seed and classical modulation covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelCovariances {
    pub env: CovarianceMatrix,
    pub input: CovarianceMatrix,
    pub classical: CovarianceMatrix,
}

/// Assembles the three model matrices as dense `2n x 2n` covariances.
///
/// `V_cl = [2nN(1 - theta_n) / Tr(Y)] Y`, with the trace taken from the
/// assembled `Y`.
pub fn build_model_covariances(
    n: usize,
    params: &ChannelParams,
    enc: &EncodingParams,
) -> Result<ModelCovariances> {
    check_modes(n)?;
    params.validate()?;
    let theta = theta_n(enc.r, n, params.photons);
    check_theta(theta)?;

    let env = exp_omega_covariance(n, params.memory)?;
    let input = exp_omega_covariance(n, enc.r)?;
    let y_matrix = match enc.scheme {
        Scheme::Symmetric => exp_omega_covariance(n, enc.y)?,
        Scheme::SingleQuadrature => {
            CovarianceMatrix::from_blocks(&exp_omega(n, enc.y)?, &DMatrix::zeros(n, n))?
        }
    };
    let scale = 2.0 * n as f64 * params.photons * (1.0 - theta).max(0.0) / y_matrix.trace();
    Ok(ModelCovariances { env, input, classical: y_matrix.scale(scale) })
}

/// `V_out = eta V_in + (1 - eta) V_env`.
pub fn output_covariance(
    v_in: &CovarianceMatrix,
    v_env: &CovarianceMatrix,
    eta: f64,
) -> Result<CovarianceMatrix> {
    v_in.combine(eta, v_env, 1.0 - eta)
}

/// `V_out + eta V_cl`, the covariance of the modulation-averaged output.
pub fn averaged_output_covariance(
    v_out: &CovarianceMatrix,
    v_cl: &CovarianceMatrix,
    eta: f64,
) -> Result<CovarianceMatrix> {
    v_out.combine(1.0, v_cl, eta)
}

/// Full `4n x 4n` beam-splitter conjugation of `diag(V_in, V_env)` followed
/// by marginalization. Returns the output and the outgoing environment
/// covariances.
pub fn beamsplitter_joint_transform(
    v_in: &CovarianceMatrix,
    v_env: &CovarianceMatrix,
    eta: f64,
) -> Result<(CovarianceMatrix, CovarianceMatrix)> {
    if v_in.modes() != v_env.modes() {
        return Err(Error::DimensionMismatch { left: v_in.modes(), right: v_env.modes() });
    }
    let m = 2 * v_in.modes();
    let mut total = DMatrix::zeros(2 * m, 2 * m);
    total.view_mut((0, 0), (m, m)).copy_from(v_in.as_matrix());
    total.view_mut((m, m), (m, m)).copy_from(v_env.as_matrix());

    let t = eta.sqrt();
    let l = (1.0 - eta).sqrt();
    let identity = DMatrix::<f64>::identity(m, m);
    let mut splitter = DMatrix::zeros(2 * m, 2 * m);
    splitter.view_mut((0, 0), (m, m)).copy_from(&(&identity * t));
    splitter.view_mut((0, m), (m, m)).copy_from(&(&identity * l));
    splitter.view_mut((m, 0), (m, m)).copy_from(&(&identity * -l));
    splitter.view_mut((m, m), (m, m)).copy_from(&(&identity * t));

    let rotated = &splitter * total * splitter.transpose();
    let out = rotated.view((0, 0), (m, m)).into_owned();
    let env_out = rotated.view((m, m), (m, m)).into_owned();
    Ok((symmetrize(out)?, symmetrize(env_out)?))
}

fn symmetrize(m: DMatrix<f64>) -> Result<CovarianceMatrix> {
    let sym = (&m + m.transpose()) * 0.5;
    CovarianceMatrix::new(sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(eta: f64, photons: f64, memory: f64) -> ChannelParams {
        ChannelParams::new(eta, photons, memory).unwrap()
    }

    #[test]
    fn validates_channel_params() {
        assert!(ChannelParams::new(1.5, 8.0, 0.0).is_err());
        assert!(ChannelParams::new(-0.1, 8.0, 0.0).is_err());
        assert!(ChannelParams::new(0.5, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, 8.0, 0.0).is_ok());
        assert!(ChannelParams::new(1.0, 8.0, 3.0).is_ok());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_n(0.0, 5, 8.0), 0.0);
        assert_abs_diff_eq!(theta_n(2.3, 1, 8.0), 0.0, epsilon = 1e-30);
        let expected = (2.0 * 1f64.cosh() - 2.0) / 32.0;
        assert_abs_diff_eq!(theta_n(1.0, 2, 8.0), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_n(1.0, 2, 8.0), 0.033_942_5, epsilon = 1e-7);
    }

    #[test]
    fn theta_even_and_increasing() {
        for n in [2, 3, 7, 40] {
            let mut prev = 0.0;
            for i in 1..50 {
                let r = 0.05 * i as f64;
                let t = theta_n(r, n, 3.0);
                assert_eq!(t, theta_n(-r, n, 3.0));
                assert!(t > prev);
                prev = t;
            }
        }
    }

    #[test]
    fn r_bounds_closed_form_two_modes() {
        let b = r_bounds(Modes::Finite(2), 8.0).unwrap();
        assert_abs_diff_eq!(b.max, 17f64.acosh(), epsilon = 1e-10);
        assert_abs_diff_eq!(b.max, 3.525, epsilon = 1e-3);
        assert_eq!(b.min, -b.max);
    }

    #[test]
    fn r_bounds_defining_property() {
        for n in [2, 3, 10, 64, 1000] {
            for photons in [0.5, 1.0, 8.0] {
                let b = r_bounds(Modes::Finite(n), photons).unwrap();
                assert_abs_diff_eq!(theta_n(b.max, n, photons), 1.0, epsilon = 1e-10);
            }
        }
        assert!(!r_bounds(Modes::Finite(1), 8.0).unwrap().is_bounded());
    }

    #[test]
    fn r_bounds_asymptotic() {
        let b = r_bounds(Modes::Infinite, 8.0).unwrap();
        assert_abs_diff_eq!(bessel_i0(2.0 * b.max).unwrap(), 17.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.max, 2.2, epsilon = 0.05);
    }

    #[test]
    fn r_bounds_shrink_with_budget() {
        for modes in [Modes::Finite(2), Modes::Finite(9), Modes::Infinite] {
            let small = r_bounds(modes, 1.0).unwrap().max;
            let large = r_bounds(modes, 8.0).unwrap().max;
            assert!(small < large);
        }
    }

    #[test]
    fn classical_k_examples() {
        assert_abs_diff_eq!(classical_k(0.0, 1, 8.0, 0.0, Scheme::Symmetric).unwrap(), 16.0, epsilon = 1e-14);
        for scheme in [Scheme::Symmetric, Scheme::SingleQuadrature] {
            for n in [1, 4, 11] {
                let k = classical_k(0.0, n, 3.0, 0.25, scheme).unwrap();
                assert_abs_diff_eq!(k, 2.0 * 3.0 * 0.75, epsilon = 1e-13);
            }
        }
        let k = classical_k(1.0, 2, 8.0, 0.0, Scheme::Symmetric).unwrap();
        assert_abs_diff_eq!(k, 32.0 / (2.0 * 1f64.cosh()), epsilon = 1e-13);
        assert_abs_diff_eq!(k, 10.37, epsilon = 0.01);
        assert!(matches!(
            classical_k(0.0, 2, 8.0, 1.5, Scheme::Symmetric),
            Err(Error::ConstraintViolation { .. })
        ));
        for y in [0.3, 1.2] {
            let a = classical_k(y, 6, 8.0, 0.1, Scheme::Symmetric).unwrap();
            let b = classical_k(-y, 6, 8.0, 0.1, Scheme::Symmetric).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_mode_model() {
        let p = params(0.7, 8.0, 1.3);
        let m = build_model_covariances(1, &p, &EncodingParams::symmetric(0.9, -0.4)).unwrap();
        let vac = CovarianceMatrix::vacuum(1).unwrap();
        assert!(m.env.max_abs_diff(&vac).unwrap() < 1e-15);
        assert!(m.input.max_abs_diff(&vac).unwrap() < 1e-15);
        let expected = CovarianceMatrix::scaled_identity(1, 8.0).unwrap();
        assert!(m.classical.max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn memoryless_encoding() {
        let p = params(0.7, 8.0, 0.8);
        let m = build_model_covariances(5, &p, &EncodingParams::symmetric(0.0, 0.0)).unwrap();
        assert!(m.input.max_abs_diff(&CovarianceMatrix::vacuum(5).unwrap()).unwrap() < 1e-14);
        let expected = CovarianceMatrix::scaled_identity(5, 8.0).unwrap();
        assert!(m.classical.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn two_mode_energy_split() {
        let p = params(0.7, 8.0, 0.0);
        let enc = EncodingParams::symmetric(1.0, 0.4);
        let acc = energy_account(2, 8.0, &enc).unwrap();
        assert_abs_diff_eq!(acc.theta, (1f64.cosh() - 1.0) / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(acc.theta, 0.0339, epsilon = 1e-4);
        let m = build_model_covariances(2, &p, &enc).unwrap();
        assert_abs_diff_eq!(m.classical.trace(), 2.0 * 2.0 * 8.0 * (1.0 - acc.theta), epsilon = 1e-12);
        // Photons in the squeezed input match theta N per mode.
        let added = m.input.trace() / 4.0 - 0.5;
        assert_abs_diff_eq!(added, acc.theta * 8.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_matrix_matches_k() {
        let p = params(0.5, 4.0, 0.0);
        for scheme in [Scheme::Symmetric, Scheme::SingleQuadrature] {
            let enc = EncodingParams { r: 0.6, y: -0.7, scheme };
            let acc = energy_account(6, 4.0, &enc).unwrap();
            let m = build_model_covariances(6, &p, &enc).unwrap();
            let y = match scheme {
                Scheme::Symmetric => exp_omega_covariance(6, -0.7).unwrap(),
                Scheme::SingleQuadrature => {
                    CovarianceMatrix::from_blocks(&exp_omega(6, -0.7).unwrap(), &DMatrix::zeros(6, 6)).unwrap()
                }
            };
            assert!(m.classical.max_abs_diff(&y.scale(acc.k)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rejects_over_budget_r() {
        let p = params(0.7, 1.0, 0.0);
        let r = r_bounds(Modes::Finite(4), 1.0).unwrap().max + 0.1;
        assert!(matches!(
            build_model_covariances(4, &p, &EncodingParams::symmetric(r, 0.0)),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn output_covariance_edge_cases() {
        let a = exp_omega_covariance(3, 0.4).unwrap();
        let b = exp_omega_covariance(3, -1.2).unwrap();
        assert_eq!(output_covariance(&a, &b, 1.0).unwrap().max_abs_diff(&a).unwrap(), 0.0);
        assert_eq!(output_covariance(&a, &b, 0.0).unwrap().max_abs_diff(&b).unwrap(), 0.0);
        for eta in [0.2, 0.7] {
            assert!(output_covariance(&a, &a, eta).unwrap().max_abs_diff(&a).unwrap() < 1e-15);
        }
        let c = exp_omega_covariance(2, 0.4).unwrap();
        assert!(matches!(output_covariance(&a, &c, 0.5), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn averaged_output_edge_cases() {
        let v = exp_omega_covariance(2, 0.4).unwrap();
        let cl = exp_omega_covariance(2, 0.9).unwrap().scale(3.0);
        let zero = CovarianceMatrix::zeros(2).unwrap();
        assert_eq!(averaged_output_covariance(&v, &zero, 0.6).unwrap(), v);
        assert_eq!(averaged_output_covariance(&v, &cl, 0.0).unwrap(), v);
        let avg = averaged_output_covariance(&v, &cl, 0.6).unwrap();
        let diff = avg.combine(1.0, &v, -1.0).unwrap();
        assert!(diff.max_abs_diff(&cl.scale(0.6)).unwrap() < 1e-14);
    }

    #[test]
    fn single_mode_averaged_output() {
        let p = params(0.7, 8.0, 0.0);
        let m = build_model_covariances(1, &p, &EncodingParams::symmetric(0.0, 0.0)).unwrap();
        let out = output_covariance(&m.input, &m.env, 0.7).unwrap();
        let avg = averaged_output_covariance(&out, &m.classical, 0.7).unwrap();
        let expected = CovarianceMatrix::scaled_identity(1, 0.5 + 0.7 * 8.0).unwrap();
        assert!(avg.max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn beamsplitter_examples() {
        let a = exp_omega_covariance(3, 0.4).unwrap();
        let b = exp_omega_covariance(3, -1.2).unwrap();
        let (out, env) = beamsplitter_joint_transform(&a, &b, 1.0).unwrap();
        assert!(out.max_abs_diff(&a).unwrap() < 1e-15);
        assert!(env.max_abs_diff(&b).unwrap() < 1e-15);

        let vac = CovarianceMatrix::vacuum(4).unwrap();
        let (out, env) = beamsplitter_joint_transform(&vac, &vac, 0.5).unwrap();
        assert!(out.max_abs_diff(&vac).unwrap() < 1e-15);
        assert!(env.max_abs_diff(&vac).unwrap() < 1e-15);

        let p = params(0.7, 8.0, 1.6);
        let m = build_model_covariances(2, &p, &EncodingParams::symmetric(0.5, 0.0)).unwrap();
        let (out, _) = beamsplitter_joint_transform(&m.input, &m.env, 0.7).unwrap();
        let direct = output_covariance(&m.input, &m.env, 0.7).unwrap();
        assert!(out.max_abs_diff(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn averaged_output_dominates_output() {
        let p = params(0.4, 2.0, -0.9);
        for (r, y) in [(0.3, 1.1), (-0.8, -0.2), (0.0, 2.0)] {
            let enc = EncodingParams::symmetric(r, y);
            let m = build_model_covariances(6, &p, &enc).unwrap();
            let out = output_covariance(&m.input, &m.env, p.eta).unwrap();
            let avg = averaged_output_covariance(&out, &m.classical, p.eta).unwrap();
            let diff = avg.combine(1.0, &out, -1.0).unwrap().into_matrix();
            let min = diff.symmetric_eigenvalues().min();
            assert!(min > -1e-12, "min eigenvalue {min}");
        }
    }
}
