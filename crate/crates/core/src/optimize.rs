//! Maximization of the per-mode rates over the encoding parameters `(r, y)`.
//!
//! The search is a coarse grid in `r` with an inner golden-section search
//! in `y`, followed by a golden-section refinement of the profile
//! `r -> max_y rate(r, y)` and a final coordinate-wise polish. `r` never
//! leaves the energy-allowed interval.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::asymptotics::LimitModel;
use crate::channel::{r_bounds, ChannelParams, Modes, RBounds};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::rates::{FiniteModel, RateKind};

/// `1 / phi`, the golden-section shrink factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Distance kept from the energy bound, so that `theta < 1` strictly.
pub const BOUND_NUDGE: f64 = 1e-9;

/// Tuning knobs of [`maximize_over_r_y`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Points of the coarse `r` grid.
    pub grid_points: usize,
    /// Shift of the coarse grid as a fraction of its spacing, in `[0, 1)`.
    pub grid_shift: f64,
    /// Final bracket width of every golden-section search.
    pub bracket_tol: f64,
    /// Coordinate moves below this end the polish phase.
    pub move_tol: f64,
    pub max_polish_sweeps: usize,
    /// Largest half-width of the `y` bracket before giving up.
    pub y_limit: f64,
    pub quad: QuadratureSpec,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_points: 65,
            grid_shift: 0.0,
            bracket_tol: 1e-7,
            move_tol: 1e-6,
            max_polish_sweeps: 50,
            y_limit: 50.0,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Outcome of a maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub kind: RateKind,
    pub modes: Modes,
    pub r_star: f64,
    pub y_star: f64,
    /// Maximal rate in bits per mode.
    pub value: f64,
    /// Number of rate evaluations spent.
    pub evaluations: usize,
    pub converged: bool,
}

/// Per-mode rate as a function of `(r, y)` for a fixed channel.
pub struct Objective {
    kind: RateKind,
    modes: Modes,
    params: ChannelParams,
    quad: QuadratureSpec,
    evaluations: Cell<usize>,
}

impl Objective {
    pub fn new(kind: RateKind, modes: Modes, params: &ChannelParams, quad: &QuadratureSpec) -> Result<Self> {
        params.validate()?;
        quad.validate()?;
        if modes == Modes::Finite(0) {
            return Err(Error::InvalidDimension("mode count must be at least 1".into()));
        }
        Ok(Self { kind, modes, params: *params, quad: *quad, evaluations: Cell::new(0) })
    }

    /// Rate per mode in bits.
    pub fn eval(&self, r: f64, y: f64) -> Result<f64> {
        self.evaluations.set(self.evaluations.get() + 1);
        let enc = self.kind.encoding(r, y);
        match self.modes {
            Modes::Finite(n) => Ok(FiniteModel::new(n, &self.params, &enc)?.rate(self.kind)? / n as f64),
            Modes::Infinite => LimitModel::new(&self.params, &enc)?.rate(self.kind, &self.quad),
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    fn single_mode(&self) -> bool {
        self.modes == Modes::Finite(1)
    }
}

// Prefers the larger value; on exact ties the point closer to zero.
fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0.abs() < b.0.abs())
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping
/// when the bracket is narrower than `tol`. Returns the best point seen.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if better((d, fd), (c, fc)) { (d, fd) } else { (c, fc) };
    while b - a > tol {
        let keep_left = fc > fd || (fc == fd && c.abs() <= d.abs());
        if keep_left {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if better((c, fc), best) {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if better((d, fd), best) {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Maximum over `y` at fixed `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YSearch {
    pub y: f64,
    pub value: f64,
    /// The optimum was still on the bracket edge when the bracket passed
    /// `y_limit`; `value` is then only a lower bound of the supremum.
    pub diverged: bool,
}

/// Maximum over `y` at fixed `r`, from the bracket `[-1, 1]` tripled while
/// the optimum sits on its edge.
pub fn search_over_y(objective: &Objective, r: f64, settings: &OptimizerSettings) -> Result<YSearch> {
    if objective.single_mode() {
        return Ok(YSearch { y: 0.0, value: objective.eval(r, 0.0)?, diverged: false });
    }
    expanding_golden_search(|y| objective.eval(r, y), settings)
}

/// Like [`search_over_y`], returning `(y_star, value)` and failing with
/// [`Error::Divergence`] when the bracket runs away.
pub fn maximize_over_y(objective: &Objective, r: f64, settings: &OptimizerSettings) -> Result<(f64, f64)> {
    finite_y(search_over_y(objective, r, settings)?, settings)
}

fn finite_y(search: YSearch, settings: &OptimizerSettings) -> Result<(f64, f64)> {
    if search.diverged {
        return Err(Error::Divergence { limit: settings.y_limit });
    }
    Ok((search.y, search.value))
}

/// Golden-section search on `[-h, h]`, `h = 1, 3, 9, ...`, until the
/// optimum is interior or `h` passes `settings.y_limit`.
pub fn expanding_golden_search<F>(mut f: F, settings: &OptimizerSettings) -> Result<YSearch>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut half = 1.0;
    loop {
        let (y, value) = golden_max(&mut f, -half, half, settings.bracket_tol)?;
        if half - y.abs() > 2.0 * settings.bracket_tol {
            return Ok(YSearch { y, value, diverged: false });
        }
        if 3.0 * half > settings.y_limit {
            return Ok(YSearch { y, value, diverged: true });
        }
        half *= 3.0;
    }
}

/// [`expanding_golden_search`] that fails with [`Error::Divergence`] when
/// the bracket runs away.
pub fn expanding_golden_max<F>(f: F, settings: &OptimizerSettings) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    finite_y(expanding_golden_search(f, settings)?, settings)
}

/// Energy-allowed `r` interval pulled in by [`BOUND_NUDGE`].
pub fn search_interval(modes: Modes, photons: f64) -> Result<RBounds> {
    let b = r_bounds(modes, photons)?;
    if !b.is_bounded() {
        return Ok(b);
    }
    Ok(RBounds { min: b.min + BOUND_NUDGE, max: b.max - BOUND_NUDGE })
}

fn coarse_grid(bounds: &RBounds, settings: &OptimizerSettings) -> Vec<f64> {
    let points = settings.grid_points.max(2);
    let step = (bounds.max - bounds.min) / (points - 1) as f64;
    let shift = settings.grid_shift.rem_euclid(1.0) * step;
    (0..points)
        .map(|i| (bounds.min + shift + step * i as f64).min(bounds.max))
        .collect()
}

/// Maximum of the per-mode rate over the allowed `(r, y)` region.
pub fn maximize_over_r_y(
    kind: RateKind,
    modes: Modes,
    params: &ChannelParams,
    settings: &OptimizerSettings,
) -> Result<OptimizationResult> {
    let objective = Objective::new(kind, modes, params, &settings.quad)?;
    let finish = |r: f64, y: f64, value: f64, converged: bool| OptimizationResult {
        kind,
        modes,
        r_star: r,
        y_star: y,
        value,
        evaluations: objective.evaluations(),
        converged,
    };

    if objective.single_mode() {
        // theta_1 = 0 and all mode cosines vanish: nothing to optimize.
        let value = objective.eval(0.0, 0.0)?;
        return Ok(finish(0.0, 0.0, value, true));
    }

    let bounds = search_interval(modes, params.photons)?;
    let grid = coarse_grid(&bounds, settings);
    let mut profile = Vec::with_capacity(grid.len());
    for &r in &grid {
        profile.push(search_over_y(&objective, r, settings)?);
    }
    let mut best_i = 0;
    for i in 1..grid.len() {
        if better((grid[i], profile[i].value), (grid[best_i], profile[best_i].value)) {
            best_i = i;
        }
    }

    // Refine the profile max_y rate(r, y) between the grid neighbours.
    let lo = grid[best_i.saturating_sub(1)].max(bounds.min);
    let hi = grid[(best_i + 1).min(grid.len() - 1)].min(bounds.max);
    let (mut r, _) = golden_max(
        |r| Ok(search_over_y(&objective, r, settings)?.value),
        lo,
        hi,
        settings.bracket_tol,
    )?;
    let mut search = search_over_y(&objective, r, settings)?;
    if profile[best_i].value > search.value {
        r = grid[best_i];
        search = profile[best_i];
    }
    // Near the energy bound the supremum over y can sit at infinity; that
    // only matters when such a point is the best one found.
    let (mut y, mut value) = finite_y(search, settings)?;

    // Coordinate polish.
    let mut converged = false;
    let mut span: f64 = 1e-2;
    for _ in 0..settings.max_polish_sweeps {
        let (y_new, _) = golden_max(|y| objective.eval(r, y), y - span, y + span, settings.bracket_tol)?;
        let r_lo = (r - span).max(bounds.min);
        let r_hi = (r + span).min(bounds.max);
        let (r_new, v_new) = golden_max(|r| objective.eval(r, y_new), r_lo, r_hi, settings.bracket_tol)?;
        let moved = (r_new - r).abs().max((y_new - y).abs());
        if v_new >= value {
            r = r_new;
            y = y_new;
            value = v_new;
        }
        if moved < settings.move_tol {
            converged = true;
            break;
        }
        span = (4.0 * moved).clamp(10.0 * settings.move_tol, 1e-2);
    }

    let origin = objective.eval(0.0, 0.0)?;
    if origin >= value {
        return Ok(finish(0.0, 0.0, origin, converged));
    }
    Ok(finish(r, y, value, converged))
}
