//! Verification harness: closed forms against generic dense linear algebra,
//! and finite-`n` quantities against their limits.
//!
//! Each check returns a [`CheckReport`]; numerical errors inside a check
//! are recorded as failures rather than propagated.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{asymptotic_rate, limits_theta_k};
use crate::channel::{
    beamsplitter_joint_transform, classical_k, output_covariance, r_for_theta, theta_n, ChannelParams,
    EncodingParams, Modes, Scheme,
};
use crate::error::{Error, Result};
use crate::oracle::{heterodyne_info_dense, holevo_chi_dense, homodyne_info_dense, output_pair};
use crate::quadrature::QuadratureSpec;
use crate::rates::{finite_rate, heterodyne_info, holevo_chi, homodyne_info, FiniteModel, RateKind};
use crate::special::bessel_i0;
use crate::spectral::{exp_omega_covariance, mode_cosines, symplectic_eigenvalues};

pub const DEFAULT_SEED: u64 = 0x5eed_b05e;
pub const SPECTRUM_TOL: f64 = 1e-9;
pub const MARGINAL_TOL: f64 = 1e-12;
pub const DETERMINANT_TOL: f64 = 1e-10;
pub const LIMIT_TOL: f64 = 1e-3;

const RIEMANN_N: usize = 10_000;
const MAX_LISTED_FAILURES: usize = 10;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// Human-readable description of the points visited.
    pub grid: String,
    pub points: usize,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub tolerance: f64,
    /// Which deviation is held against `tolerance`.
    pub criterion: Criterion,
    pub passed: bool,
    pub wall_time_s: f64,
    /// First few failing points.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// `|got - want|`.
    Absolute,
    /// `|got - want| / |want|`.
    Relative,
    /// `|got - want| / max(1, |want|)`.
    Scaled,
}

struct Tally {
    abs: f64,
    rel: f64,
    points: usize,
    failed: bool,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self { abs: 0.0, rel: 0.0, points: 0, failed: false, failures: Vec::new() }
    }

    fn fail(&mut self, message: String) {
        self.failed = true;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(message);
        }
    }

    fn compare(&mut self, label: &dyn Fn() -> String, got: f64, want: f64, tol: f64, criterion: Criterion) {
        self.points += 1;
        let abs = (got - want).abs();
        let rel = if want != 0.0 { abs / want.abs() } else { abs };
        let dev = match criterion {
            Criterion::Absolute => abs,
            Criterion::Relative => rel,
            Criterion::Scaled => abs / want.abs().max(1.0),
        };
        self.abs = self.abs.max(abs);
        self.rel = self.rel.max(rel);
        if !(dev <= tol) {
            self.fail(format!("{}: got {got:e}, want {want:e}", label()));
        }
    }

    fn absorb<T>(&mut self, label: &dyn Fn() -> String, res: Result<T>) -> Option<T> {
        match res {
            Ok(v) => Some(v),
            Err(e) => {
                self.points += 1;
                self.fail(format!("{}: {e}", label()));
                None
            }
        }
    }

    fn finish(self, name: &str, grid: String, tolerance: f64, criterion: Criterion, start: Instant) -> CheckReport {
        CheckReport {
            name: name.into(),
            grid,
            points: self.points,
            max_abs_dev: self.abs,
            max_rel_dev: self.rel,
            tolerance,
            criterion,
            passed: !self.failed,
            wall_time_s: start.elapsed().as_secs_f64(),
            failures: self.failures,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Case {
    params: ChannelParams,
    r: f64,
    y: f64,
}

impl Case {
    fn fixed(eta: f64, photons: f64, s: f64, r: f64, y: f64) -> Self {
        Self { params: ChannelParams { eta, photons, memory: s }, r, y }
    }

    fn label(&self, n: usize) -> String {
        format!(
            "n={n} eta={} N={} s={} r={} y={}",
            self.params.eta, self.params.photons, self.params.memory, self.r, self.y
        )
    }
}

// Random point with theta_n <= 0.9.
fn random_case(rng: &mut ChaCha8Rng, n: usize) -> Result<Case> {
    let eta = rng.random_range(0.0..=1.0);
    let photons = rng.random_range(0.5..10.0);
    let s = rng.random_range(-2.5..2.5);
    let y = rng.random_range(-1.5..1.5);
    let r = if n == 1 {
        rng.random_range(-2.0..2.0)
    } else {
        let r90 = r_for_theta(Modes::Finite(n), photons, 0.9)?;
        rng.random_range(-r90..r90)
    };
    Ok(Case::fixed(eta, photons, s, r, y))
}

fn fixed_cases() -> Vec<Case> {
    vec![
        Case::fixed(0.7, 8.0, 0.8, 0.3, 0.2),
        Case::fixed(0.7, 8.0, 1.6, 1.6, -0.3),
        Case::fixed(0.0, 8.0, 1.0, 0.5, 0.1),
        Case::fixed(1.0, 8.0, -1.0, 0.5, 0.1),
        Case::fixed(0.5, 2.0, 0.0, 0.0, 0.0),
    ]
}

// Deterministic point close to the energy bound, where K -> 0.
fn boundary_case(n: usize) -> Result<Option<Case>> {
    if n < 2 {
        return Ok(None);
    }
    let r = r_for_theta(Modes::Finite(n), 8.0, 0.999)?;
    Ok(Some(Case::fixed(0.7, 8.0, 0.8, r, 0.3)))
}

fn doubling_ladder(start: usize, max: usize) -> Vec<usize> {
    let mut ns = Vec::new();
    let mut n = start;
    while n <= max {
        ns.push(n);
        n *= 2;
    }
    if ns.last() != Some(&max) && max >= start {
        ns.push(max);
    }
    ns
}

fn ladder_text(ns: &[usize]) -> String {
    ns.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Closed-form symplectic spectra and Holevo-chi against generic
/// eigenvalues of the assembled covariances, `n in {2, 4, ..., n_max}`.
pub fn check_symplectic_closed_form(n_max: usize, seed: u64) -> CheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    let ns = doubling_ladder(2, n_max);
    for &n in &ns {
        let mut cases = fixed_cases();
        if let Some(Some(c)) = tally.absorb(&|| format!("n={n} boundary point"), boundary_case(n)) {
            cases.push(c);
        }
        for _ in 0..3 {
            let label = || format!("n={n} random draw");
            if let Some(c) = tally.absorb(&label, random_case(&mut rng, n)) {
                cases.push(c);
            }
        }
        for case in cases {
            let enc = EncodingParams::symmetric(case.r, case.y);
            let label = || case.label(n);
            let Some((out, avg)) = tally.absorb(&label, output_pair(n, &case.params, &enc)) else { continue };
            let Some(model) = tally.absorb(&label, FiniteModel::new(n, &case.params, &enc)) else { continue };
            let Some(modes) = tally.absorb(&label, (1..=n).map(|k| model.mode(k)).collect::<Result<Vec<_>>>())
            else {
                continue;
            };
            let mut nu: Vec<f64> = modes.iter().map(|m| m.nu).collect();
            let mut nu_bar: Vec<f64> = modes.iter().map(|m| m.nu_bar).collect();
            nu.sort_by(f64::total_cmp);
            nu_bar.sort_by(f64::total_cmp);
            for (closed, dense) in [(&nu, &out), (&nu_bar, &avg)] {
                let Some(spec) = tally.absorb(&label, symplectic_eigenvalues(dense)) else { continue };
                for (a, b) in closed.iter().zip(spec.values()) {
                    tally.compare(&label, *a, *b, SPECTRUM_TOL, Criterion::Relative);
                }
            }
            let chi = tally.absorb(&label, holevo_chi(n, &case.params, &enc));
            let chi_dense = tally.absorb(&label, holevo_chi_dense(n, &case.params, &enc));
            if let (Some(a), Some(b)) = (chi, chi_dense) {
                tally.compare(&|| format!("chi {}", case.label(n)), a, b, SPECTRUM_TOL, Criterion::Scaled);
            }
        }
    }
    let grid = format!("n in {{{}}}, 5 fixed + boundary + 3 random points each", ladder_text(&ns));
    tally.finish("symplectic_closed_form", grid, SPECTRUM_TOL, Criterion::Relative, start)
}

/// Marginal of the full beam-splitter conjugation against
/// `eta V_in + (1 - eta) V_env`.
pub fn check_beamsplitter_marginal(n_max: usize, seed: u64) -> CheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb5);
    let mut tally = Tally::new();
    let ns = doubling_ladder(1, n_max);
    for &n in &ns {
        let mut points: Vec<(f64, f64, f64)> =
            [0.0, 0.3, 0.7, 1.0].iter().map(|&eta| (eta, 0.8, 0.5)).collect();
        for _ in 0..3 {
            points.push((rng.random_range(0.0..=1.0), rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)));
        }
        for (eta, s, r) in points {
            let label = || format!("n={n} eta={eta} s={s} r={r}");
            let pair = exp_omega_covariance(n, r).and_then(|v_in| Ok((v_in, exp_omega_covariance(n, s)?)));
            let Some((v_in, v_env)) = tally.absorb(&label, pair) else { continue };
            let joint = beamsplitter_joint_transform(&v_in, &v_env, eta);
            let direct = output_covariance(&v_in, &v_env, eta);
            let diff = joint.and_then(|(out, _)| out.max_abs_diff(&direct?));
            if let Some(d) = tally.absorb(&label, diff) {
                tally.compare(&label, d, 0.0, MARGINAL_TOL, Criterion::Absolute);
            }
        }
    }
    let grid = format!("n in {{{}}}, eta in {{0, 0.3, 0.7, 1}} + 3 random points each", ladder_text(&ns));
    tally.finish("beamsplitter_marginal", grid, MARGINAL_TOL, Criterion::Absolute, start)
}

/// Heterodyne and homodyne determinant formulas against the per-mode sums.
pub fn check_determinant_identities(n_max: usize, seed: u64) -> CheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde7);
    let mut tally = Tally::new();
    let ns = doubling_ladder(1, n_max.min(32));
    for &n in &ns {
        let mut cases = fixed_cases();
        if let Some(Some(c)) = tally.absorb(&|| format!("n={n} boundary point"), boundary_case(n)) {
            cases.push(c);
        }
        for _ in 0..3 {
            let label = || format!("n={n} random draw");
            if let Some(c) = tally.absorb(&label, random_case(&mut rng, n)) {
                cases.push(c);
            }
        }
        for case in cases {
            let sym = EncodingParams::symmetric(case.r, case.y);
            let single = EncodingParams::single_quadrature(case.r, case.y);
            let het = || format!("heterodyne {}", case.label(n));
            let hom = || format!("homodyne {}", case.label(n));
            let a = tally.absorb(&het, heterodyne_info(n, &case.params, &sym));
            let b = tally.absorb(&het, heterodyne_info_dense(n, &case.params, &sym));
            if let (Some(a), Some(b)) = (a, b) {
                tally.compare(&het, a, b, DETERMINANT_TOL, Criterion::Scaled);
            }
            let a = tally.absorb(&hom, homodyne_info(n, &case.params, &single));
            let b = tally.absorb(&hom, homodyne_info_dense(n, &case.params, &single));
            if let (Some(a), Some(b)) = (a, b) {
                tally.compare(&hom, a, b, DETERMINANT_TOL, Criterion::Scaled);
            }
        }
    }
    let grid = format!("n in {{{}}}, 5 fixed + boundary + 3 random points each", ladder_text(&ns));
    tally.finish("determinant_identities", grid, DETERMINANT_TOL, Criterion::Scaled, start)
}

/// Mode averages `(1/(n+1)) sum_k e^{2 gamma c_k}` against `I0(2 gamma)` at
/// `n = 10^4`, and finite-`n` rates per mode against the asymptotic rates
/// along `n = 2^4, ..., 2^12`, where the gap must shrink monotonically.
pub fn check_riemann_limits() -> CheckReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let cosines = mode_cosines(RIEMANN_N);
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let label = || format!("mode average gamma={gamma}");
        let sum = cosines.iter().map(|c| (2.0 * gamma * c).exp()).sum::<f64>();
        if gamma == 0.0 {
            tally.compare(&label, sum, RIEMANN_N as f64, 0.0, Criterion::Absolute);
        }
        if let Some(want) = tally.absorb(&label, bessel_i0(2.0 * gamma)) {
            tally.compare(&label, sum / (RIEMANN_N + 1) as f64, want, LIMIT_TOL, Criterion::Scaled);
        }
    }

    let quad = QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, ..QuadratureSpec::default() };
    let ladder: Vec<usize> = (4..=12).map(|p| 1usize << p).collect();
    let cases = [
        (RateKind::Holevo, 0.8, 0.0, 0.0),
        (RateKind::Holevo, 0.8, 0.8, -0.1),
        (RateKind::Heterodyne, 0.8, 0.3, -0.05),
        (RateKind::Heterodyne, 1.6, 0.5, -0.15),
        (RateKind::Homodyne, 1.6, 0.8, -0.1),
    ];
    for (kind, s, r, y) in cases {
        let params = ChannelParams { eta: 0.7, photons: 8.0, memory: s };
        let enc = kind.encoding(r, y);
        let label = || format!("{kind} s={s} r={r} y={y}");
        let Some(limit) = tally.absorb(&label, asymptotic_rate(kind, &params, &enc, &quad)) else { continue };
        let mut gaps = Vec::with_capacity(ladder.len());
        for &n in &ladder {
            let at = || format!("{kind} s={s} r={r} y={y} n={n}");
            if let Some(v) = tally.absorb(&at, finite_rate(kind, n, &params, &enc)) {
                gaps.push((n, (v / n as f64 - limit).abs()));
            }
        }
        if let Some(&(n, last)) = gaps.last() {
            tally.compare(&|| format!("{kind} s={s} r={r} y={y} n={n}"), last, 0.0, LIMIT_TOL, Criterion::Scaled);
        }
        for w in gaps.windows(2) {
            if w[1].1 > w[0].1 {
                tally.fail(format!(
                    "{kind} s={s} r={r} y={y}: gap grows from {:e} at n={} to {:e} at n={}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ));
            }
        }
    }
    let grid = format!(
        "gamma in {{0, 0.5, 1, 2}} at n={RIEMANN_N}; 5 rate points over n in {{{}}} (monotone)",
        ladder_text(&ladder)
    );
    tally.finish("riemann_limits", grid, LIMIT_TOL, Criterion::Scaled, start)
}

/// `theta_n`, `K_n` at `n = 10^4` against their Bessel limits.
pub fn check_theta_k_limits() -> CheckReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let photons = 8.0;
    for r in [0.5, 1.0, 2.0] {
        for y in [0.5, 1.0, 2.0] {
            let label = || format!("r={r} y={y} n={RIEMANN_N}");
            let Some((theta, k)) = tally.absorb(&label, limits_theta_k(r, y, photons)) else { continue };
            let theta_fin = theta_n(r, RIEMANN_N, photons);
            tally.compare(&|| format!("theta {}", label()), theta_fin, theta, LIMIT_TOL, Criterion::Scaled);
            if let Some(k_fin) = tally.absorb(&label, classical_k(y, RIEMANN_N, photons, theta_fin, Scheme::Symmetric)) {
                tally.compare(&|| format!("K {}", label()), k_fin, k, LIMIT_TOL, Criterion::Scaled);
            }
        }
    }
    for n in [1, 7, 100, RIEMANN_N] {
        let label = || format!("origin n={n}");
        tally.compare(&label, theta_n(0.0, n, photons), 0.0, 0.0, Criterion::Absolute);
        if let Some(k) = tally.absorb(&label, classical_k(0.0, n, photons, 0.0, Scheme::Symmetric)) {
            tally.compare(&label, k, 2.0 * photons, 1e-12, Criterion::Relative);
        }
    }
    let grid = format!("(r, y) in {{0.5, 1, 2}}^2 at n={RIEMANN_N}, N=8; origin at n in {{1, 7, 100, {RIEMANN_N}}}");
    tally.finish("theta_k_limits", grid, LIMIT_TOL, Criterion::Scaled, start)
}

/// Runs every check. `n_max` bounds the dense-matrix checks.
pub fn run_all(n_max: usize, seed: u64) -> Result<Vec<CheckReport>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter { name: "n-max", reason: format!("must be at least 2, got {n_max}") });
    }
    let ((a, b), (c, (d, e))) = rayon::join(
        || rayon::join(|| check_symplectic_closed_form(n_max, seed), || check_beamsplitter_marginal(n_max, seed)),
        || rayon::join(|| check_determinant_identities(n_max, seed), || rayon::join(check_riemann_limits, check_theta_k_limits)),
    );
    Ok(vec![a, b, c, d, e])
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// One line per check plus any listed failures.
pub fn render_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{} {:<24} points={:<5} max_abs={:.3e} max_rel={:.3e} tol={:.0e} ({:?}) {:.2}s",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.points,
            r.max_abs_dev,
            r.max_rel_dev,
            r.tolerance,
            r.criterion,
            r.wall_time_s,
        );
        let _ = writeln!(out, "     grid: {}", r.grid);
        for f in &r.failures {
            let _ = writeln!(out, "     ! {f}");
        }
    }
    out
}

pub fn render_json(reports: &[CheckReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("serializable");
    s.push('\n');
    s
}
