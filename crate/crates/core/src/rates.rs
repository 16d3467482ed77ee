//! Closed-form output spectra and finite-block information rates.
//!
//! Every rate is a sum over the normal modes `c_k = cos(pi k / (n + 1))`,
//! evaluated in O(n) without assembling any matrix. The per-mode terms are
//! shared with the asymptotic integrands, which substitute `c = cos(xi)`
//! and the limiting classical scale `K`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{
    classical_k_from_cosines, check_theta, theta_from_cosines, ChannelParams, EncodingParams,
    EnergyAccount, Scheme,
};
use crate::error::{Error, Result};
use crate::spectral::{entropy_g, mode_cosines};

/// Which information rate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateKind {
    /// Holevo-chi quantity of the output ensemble.
    Holevo,
    /// Mutual information with joint (q, p) measurement on every mode.
    Heterodyne,
    /// Mutual information with a q measurement on every mode.
    Homodyne,
}

impl RateKind {
    pub const ALL: [RateKind; 3] = [RateKind::Holevo, RateKind::Heterodyne, RateKind::Homodyne];

    pub fn name(self) -> &'static str {
        match self {
            RateKind::Holevo => "holevo",
            RateKind::Heterodyne => "heterodyne",
            RateKind::Homodyne => "homodyne",
        }
    }

    /// Modulation shape used by the optimizer for this rate.
    pub fn default_scheme(self) -> Scheme {
        match self {
            RateKind::Holevo | RateKind::Heterodyne => Scheme::Symmetric,
            RateKind::Homodyne => Scheme::SingleQuadrature,
        }
    }

    pub fn encoding(self, r: f64, y: f64) -> EncodingParams {
        EncodingParams { r, y, scheme: self.default_scheme() }
    }

    pub(crate) fn check_scheme(self, scheme: Scheme) -> Result<()> {
        match (self, scheme) {
            (RateKind::Homodyne, _) | (_, Scheme::Symmetric) => Ok(()),
            _ => Err(Error::InvalidScheme { kind: self.name(), scheme: scheme.name() }),
        }
    }
}

impl fmt::Display for RateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holevo" => Ok(RateKind::Holevo),
            "heterodyne" => Ok(RateKind::Heterodyne),
            "homodyne" => Ok(RateKind::Homodyne),
            other => Err(Error::InvalidParameter {
                name: "kind",
                reason: format!("unknown rate kind `{other}`"),
            }),
        }
    }
}

#[inline]
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Symplectic eigenvalues `(nu, nu_bar)` of the output and averaged
/// output for one normal mode with cosine `c` and classical scale `k`.
///
/// Also returns the excesses `nu - 1/2` and `nu_bar - 1/2`, computed
/// without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub nu: f64,
    pub nu_bar: f64,
    pub excess: f64,
    pub excess_bar: f64,
}

pub fn mode_spectrum(c: f64, params: &ChannelParams, r: f64, y: f64, k: f64) -> ModeSpectrum {
    let eta = params.eta;
    let s = params.memory;
    let mix = eta * (1.0 - eta);
    // nu^2 - 1/4 = eta (1 - eta) sinh^2(phi_sr / 2), phi_lm = 2 (l - m) c
    let half_sr = ((s - r) * c).sinh();
    let gap = mix * half_sr * half_sr;
    let phi_ry = 2.0 * (r - y) * c;
    let phi_sy = 2.0 * (s - y) * c;
    let gap_bar = gap
        + 0.25
            * (eta * eta * k * k
                + 2.0 * eta * eta * k * phi_ry.cosh()
                + 2.0 * mix * k * phi_sy.cosh());
    let nu = (0.25 + gap).sqrt();
    let nu_bar = (0.25 + gap_bar).sqrt();
    ModeSpectrum { nu, nu_bar, excess: gap / (nu + 0.5), excess_bar: gap_bar / (nu_bar + 0.5) }
}

/// `g(nu_bar - 1/2) - g(nu - 1/2)` for one mode.
pub fn holevo_term(c: f64, params: &ChannelParams, r: f64, y: f64, k: f64) -> Result<f64> {
    let m = mode_spectrum(c, params, r, y, k);
    Ok(entropy_g(m.excess_bar)? - entropy_g(m.excess)?)
}

/// `(1/2) [log2 F_+ + log2 F_-]` for one mode.
pub fn heterodyne_term(c: f64, params: &ChannelParams, r: f64, y: f64, k: f64) -> f64 {
    let eta = params.eta;
    let s = params.memory;
    let branch = |sign: f64| {
        let noise = eta * (sign * 2.0 * r * c).exp() + (1.0 - eta) * (sign * 2.0 * s * c).exp() + 1.0;
        log2_1p(k * eta * (sign * 2.0 * y * c).exp() / noise)
    };
    0.5 * (branch(1.0) + branch(-1.0))
}

/// `(1/2) log2(1 + 2 K eta e^{2yc} / (eta e^{2rc} + (1 - eta) e^{2sc}))`.
pub fn homodyne_term(c: f64, params: &ChannelParams, r: f64, y: f64, k: f64) -> f64 {
    let eta = params.eta;
    let s = params.memory;
    let noise = eta * (2.0 * r * c).exp() + (1.0 - eta) * (2.0 * s * c).exp();
    0.5 * log2_1p(2.0 * k * eta * (2.0 * y * c).exp() / noise)
}

pub(crate) fn rate_term(
    kind: RateKind,
    c: f64,
    params: &ChannelParams,
    r: f64,
    y: f64,
    k: f64,
) -> Result<f64> {
    match kind {
        RateKind::Holevo => holevo_term(c, params, r, y, k),
        RateKind::Heterodyne => Ok(heterodyne_term(c, params, r, y, k)),
        RateKind::Homodyne => Ok(homodyne_term(c, params, r, y, k)),
    }
}

/// A block of `n` channel uses with a fixed encoding. Precomputes the mode
/// cosines and the energy split once.
#[derive(Debug, Clone)]
pub struct FiniteModel {
    params: ChannelParams,
    enc: EncodingParams,
    cosines: Vec<f64>,
    account: EnergyAccount,
}

impl FiniteModel {
    pub fn new(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("mode count must be at least 1".into()));
        }
        params.validate()?;
        let cosines = mode_cosines(n);
        let theta = theta_from_cosines(enc.r, &cosines, params.photons);
        check_theta(theta)?;
        let k = classical_k_from_cosines(enc.y, &cosines, params.photons, theta, enc.scheme);
        Ok(Self { params: *params, enc: *enc, cosines, account: EnergyAccount { theta, k } })
    }

    pub fn modes(&self) -> usize {
        self.cosines.len()
    }

    pub fn account(&self) -> EnergyAccount {
        self.account
    }

    /// Closed-form spectrum of mode `k`, `1 <= k <= n`.
    pub fn mode(&self, k: usize) -> Result<ModeSpectrum> {
        if k == 0 || k > self.modes() {
            return Err(Error::InvalidDimension(format!("mode index {k} outside 1..={}", self.modes())));
        }
        Ok(mode_spectrum(self.cosines[k - 1], &self.params, self.enc.r, self.enc.y, self.account.k))
    }

    /// Per-mode summands of `kind`, ascending in `k`.
    pub fn terms(&self, kind: RateKind) -> Result<Vec<f64>> {
        kind.check_scheme(self.enc.scheme)?;
        self.cosines
            .iter()
            .map(|&c| rate_term(kind, c, &self.params, self.enc.r, self.enc.y, self.account.k))
            .collect()
    }

    /// Total rate over the block, in bits.
    pub fn rate(&self, kind: RateKind) -> Result<f64> {
        Ok(self.terms(kind)?.iter().sum())
    }
}

/// `(nu_k, nu_bar_k)` for mode `k` of an `n`-use block.
pub fn closed_form_nu(
    k: usize,
    n: usize,
    params: &ChannelParams,
    enc: &EncodingParams,
) -> Result<(f64, f64)> {
    let m = FiniteModel::new(n, params, enc)?.mode(k)?;
    Ok((m.nu, m.nu_bar))
}

/// Holevo-chi of the block, `sum_k [g(nu_bar_k - 1/2) - g(nu_k - 1/2)]`.
pub fn holevo_chi(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    FiniteModel::new(n, params, enc)?.rate(RateKind::Holevo)
}

/// Heterodyne mutual information of the block in bits.
pub fn heterodyne_info(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    FiniteModel::new(n, params, enc)?.rate(RateKind::Heterodyne)
}

/// Homodyne mutual information of the block in bits.
///
/// The classical scale follows `enc.scheme`: the single-quadrature scheme
/// uses the normalization of `Y = diag(e^{y Omega}, 0)`; the symmetric
/// scheme reuses the symmetric `K_n`.
pub fn homodyne_info(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    FiniteModel::new(n, params, enc)?.rate(RateKind::Homodyne)
}

/// Total rate of `kind` over an `n`-use block.
pub fn finite_rate(
    kind: RateKind,
    n: usize,
    params: &ChannelParams,
    enc: &EncodingParams,
) -> Result<f64> {
    FiniteModel::new(n, params, enc)?.rate(kind)
}

/// Rate per mode of the memoryless channel with vacuum seeds and
/// isotropic modulation: `g(eta N)`, `log2(1 + eta N)`,
/// `(1/2) log2(1 + 4 eta N)`.
pub fn memoryless_baseline(kind: RateKind, photons: f64, eta: f64) -> Result<f64> {
    ChannelParams::new(eta, photons, 0.0)?;
    let signal = eta * photons;
    match kind {
        RateKind::Holevo => entropy_g(signal),
        RateKind::Heterodyne => Ok(log2_1p(signal)),
        RateKind::Homodyne => Ok(0.5 * log2_1p(4.0 * signal)),
    }
}
