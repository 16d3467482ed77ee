//! Parameter sweeps behind the figure tables, evaluated in parallel.
//!
//! Every sweep is a list of independent grid points. Points are evaluated
//! with rayon and the rows come back in grid order, so output does not
//! depend on the thread count.

use rayon::prelude::*;

use crate::channel::{ChannelParams, Modes};
use crate::error::{Error, Result};
use crate::optimize::{maximize_over_r_y, search_interval, search_over_y, Objective, OptimizationResult, OptimizerSettings};
use crate::rates::RateKind;
use crate::table::{Cell, Table};

/// What a sweep varies and which table it produces.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Finite-`n` maxima, one row per `(kind, s, n)`.
    FiniteN { kinds: Vec<RateKind>, memories: Vec<f64>, ns: Vec<usize> },
    /// Asymptotic `max_y rate(r, y)` along an even `r` grid of the allowed
    /// interval. Where the supremum over `y` lies at infinity the value is
    /// the best one found with `|y| <= y_limit`.
    RProfile { kinds: Vec<RateKind>, memories: Vec<f64>, points: usize },
    /// Asymptotic maxima over `(r, y)`, one row per `(kind, s)`.
    Maxima { kinds: Vec<RateKind>, memories: Vec<f64> },
    /// Asymptotic Holevo maximum on an `(eta, s)` grid.
    EtaMemory { etas: Vec<f64>, memories: Vec<f64> },
}

/// Sweep plus the fixed channel quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub spec: SweepSpec,
    pub photons: f64,
    /// Transmittivity; ignored by [`SweepSpec::EtaMemory`].
    pub eta: f64,
    pub settings: OptimizerSettings,
}

pub const FINITE_COLUMNS: [&str; 8] = ["kind", "n", "s", "N", "eta", "r_opt", "y_opt", "value_bits_per_mode"];
pub const PROFILE_COLUMNS: [&str; 4] = ["kind", "s", "r", "value"];
pub const MAXIMA_COLUMNS: [&str; 9] = ["kind", "s", "N", "eta", "r_opt", "y_opt", "value_bits_per_mode", "evaluations", "converged"];
pub const ETA_MEMORY_COLUMNS: [&str; 3] = ["eta", "s", "C"];

fn strictly_increasing<T: PartialOrd + Copy>(name: &'static str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter { name, reason: "grid is empty".into() });
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter { name, reason: "grid must be strictly increasing".into() });
    }
    Ok(())
}

fn distinct_kinds(kinds: &[RateKind]) -> Result<()> {
    if kinds.is_empty() {
        return Err(Error::InvalidParameter { name: "kind", reason: "no rate selected".into() });
    }
    for (i, k) in kinds.iter().enumerate() {
        if kinds[..i].contains(k) {
            return Err(Error::InvalidParameter { name: "kind", reason: format!("`{k}` listed twice") });
        }
    }
    Ok(())
}

impl Sweep {
    /// Checks the grids and channel constants before any work is done.
    pub fn validate(&self) -> Result<()> {
        ChannelParams::new(self.eta, self.photons, 0.0)?;
        self.settings.quad.validate()?;
        match &self.spec {
            SweepSpec::FiniteN { kinds, memories, ns } => {
                distinct_kinds(kinds)?;
                strictly_increasing("s", memories)?;
                strictly_increasing("n", ns)?;
                if ns[0] == 0 {
                    return Err(Error::InvalidParameter { name: "n", reason: "block length must be at least 1".into() });
                }
            }
            SweepSpec::RProfile { kinds, memories, points } => {
                distinct_kinds(kinds)?;
                strictly_increasing("s", memories)?;
                if *points < 2 {
                    return Err(Error::InvalidParameter { name: "r-points", reason: "need at least 2 points".into() });
                }
            }
            SweepSpec::Maxima { kinds, memories } => {
                distinct_kinds(kinds)?;
                strictly_increasing("s", memories)?;
            }
            SweepSpec::EtaMemory { etas, memories } => {
                strictly_increasing("eta", etas)?;
                strictly_increasing("s", memories)?;
                for &eta in etas {
                    ChannelParams::new(eta, self.photons, 0.0)?;
                }
            }
        }
        for &s in self.memories() {
            ChannelParams::new(self.eta, self.photons, s)?;
        }
        Ok(())
    }

    fn memories(&self) -> &[f64] {
        match &self.spec {
            SweepSpec::FiniteN { memories, .. }
            | SweepSpec::RProfile { memories, .. }
            | SweepSpec::Maxima { memories, .. }
            | SweepSpec::EtaMemory { memories, .. } => memories,
        }
    }

    /// Number of grid points, i.e. rows of the result.
    pub fn len(&self) -> usize {
        match &self.spec {
            SweepSpec::FiniteN { kinds, memories, ns } => kinds.len() * memories.len() * ns.len(),
            SweepSpec::RProfile { kinds, memories, points } => kinds.len() * memories.len() * points,
            SweepSpec::Maxima { kinds, memories } => kinds.len() * memories.len(),
            SweepSpec::EtaMemory { etas, memories } => etas.len() * memories.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Runs the sweep. The first failing grid point, in grid order, is
    /// reported as [`Error::GridPoint`].
    pub fn run(&self) -> Result<Table> {
        self.validate()?;
        match &self.spec {
            SweepSpec::FiniteN { kinds, memories, ns } => self.run_finite(kinds, memories, ns),
            SweepSpec::RProfile { kinds, memories, points } => self.run_profile(kinds, memories, *points),
            SweepSpec::Maxima { kinds, memories } => self.run_maxima(kinds, memories),
            SweepSpec::EtaMemory { etas, memories } => self.run_eta_memory(etas, memories),
        }
    }

    fn params(&self, s: f64) -> ChannelParams {
        ChannelParams { eta: self.eta, photons: self.photons, memory: s }
    }

    fn run_finite(&self, kinds: &[RateKind], memories: &[f64], ns: &[usize]) -> Result<Table> {
        let points: Vec<(RateKind, f64, usize)> = kinds
            .iter()
            .flat_map(|&k| memories.iter().flat_map(move |&s| ns.iter().map(move |&n| (k, s, n))))
            .collect();
        let results = evaluate(&points, |&(kind, s, n)| {
            maximize_over_r_y(kind, Modes::Finite(n), &self.params(s), &self.settings)
        }, |&(kind, s, n)| format!("kind={kind}, s={s}, n={n}"))?;

        let mut table = Table::new(&FINITE_COLUMNS);
        for ((kind, s, n), res) in points.into_iter().zip(results) {
            table.push(vec![
                kind.name().into(),
                n.into(),
                s.into(),
                self.photons.into(),
                self.eta.into(),
                res.r_star.into(),
                res.y_star.into(),
                res.value.into(),
            ]);
        }
        Ok(table)
    }

    fn run_profile(&self, kinds: &[RateKind], memories: &[f64], count: usize) -> Result<Table> {
        let bounds = search_interval(Modes::Infinite, self.photons)?;
        let step = (bounds.max - bounds.min) / (count - 1) as f64;
        let rs: Vec<f64> = (0..count).map(|i| (bounds.min + step * i as f64).min(bounds.max)).collect();
        let rs = &rs;
        let points: Vec<(RateKind, f64, f64)> = kinds
            .iter()
            .flat_map(|&k| memories.iter().flat_map(move |&s| rs.iter().map(move |&r| (k, s, r))))
            .collect();
        let results = evaluate(&points, |&(kind, s, r)| {
            let objective = Objective::new(kind, Modes::Infinite, &self.params(s), &self.settings.quad)?;
            Ok(search_over_y(&objective, r, &self.settings)?.value)
        }, |&(kind, s, r)| format!("kind={kind}, s={s}, r={r}"))?;

        let mut table = Table::new(&PROFILE_COLUMNS);
        for ((kind, s, r), value) in points.into_iter().zip(results) {
            table.push(vec![kind.name().into(), s.into(), r.into(), value.into()]);
        }
        Ok(table)
    }

    fn run_maxima(&self, kinds: &[RateKind], memories: &[f64]) -> Result<Table> {
        let points: Vec<(RateKind, f64)> =
            kinds.iter().flat_map(|&k| memories.iter().map(move |&s| (k, s))).collect();
        let results = evaluate(&points, |&(kind, s)| {
            maximize_over_r_y(kind, Modes::Infinite, &self.params(s), &self.settings)
        }, |&(kind, s)| format!("kind={kind}, s={s}"))?;

        let mut table = Table::new(&MAXIMA_COLUMNS);
        for ((kind, s), res) in points.into_iter().zip(results) {
            table.push(maxima_row(kind, s, self.photons, self.eta, &res));
        }
        Ok(table)
    }

    fn run_eta_memory(&self, etas: &[f64], memories: &[f64]) -> Result<Table> {
        let points: Vec<(f64, f64)> =
            etas.iter().flat_map(|&eta| memories.iter().map(move |&s| (eta, s))).collect();
        let results = evaluate(&points, |&(eta, s)| {
            let params = ChannelParams { eta, photons: self.photons, memory: s };
            maximize_over_r_y(RateKind::Holevo, Modes::Infinite, &params, &self.settings)
        }, |&(eta, s)| format!("eta={eta}, s={s}"))?;

        let mut table = Table::new(&ETA_MEMORY_COLUMNS);
        for ((eta, s), res) in points.into_iter().zip(results) {
            table.push(vec![eta.into(), s.into(), res.value.into()]);
        }
        Ok(table)
    }
}

fn maxima_row(kind: RateKind, s: f64, photons: f64, eta: f64, res: &OptimizationResult) -> Vec<Cell> {
    vec![
        kind.name().into(),
        s.into(),
        photons.into(),
        eta.into(),
        res.r_star.into(),
        res.y_star.into(),
        res.value.into(),
        res.evaluations.into(),
        res.converged.into(),
    ]
}

fn evaluate<P, T, F, L>(points: &[P], f: F, label: L) -> Result<Vec<T>>
where
    P: Sync,
    T: Send,
    F: Fn(&P) -> Result<T> + Sync,
    L: Fn(&P) -> String,
{
    let results: Vec<Result<T>> = points.par_iter().map(&f).collect();
    results
        .into_iter()
        .zip(points)
        .map(|(res, p)| res.map_err(|e| Error::GridPoint { point: label(p), source: Box::new(e) }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_settings() -> OptimizerSettings {
        OptimizerSettings { grid_points: 9, ..OptimizerSettings::default() }
    }

    #[test]
    fn finite_rows_follow_grid_order() {
        let sweep = Sweep {
            spec: SweepSpec::FiniteN { kinds: vec![RateKind::Heterodyne], memories: vec![0.0, 0.8], ns: vec![1, 2] },
            photons: 8.0,
            eta: 0.7,
            settings: quick_settings(),
        };
        let table = sweep.run().unwrap();
        assert_eq!(table.len(), 4);
        let key: Vec<(Cell, Cell)> = table.rows().iter().map(|r| (r[2].clone(), r[1].clone())).collect();
        assert_eq!(
            key,
            vec![
                (Cell::Float(0.0), Cell::Int(1)),
                (Cell::Float(0.0), Cell::Int(2)),
                (Cell::Float(0.8), Cell::Int(1)),
                (Cell::Float(0.8), Cell::Int(2)),
            ]
        );
    }

    #[test]
    fn profile_covers_allowed_interval() {
        let sweep = Sweep {
            spec: SweepSpec::RProfile { kinds: vec![RateKind::Homodyne], memories: vec![0.0], points: 5 },
            photons: 8.0,
            eta: 0.7,
            settings: quick_settings(),
        };
        let table = sweep.run().unwrap();
        assert_eq!(table.len(), 5);
        let Cell::Float(first) = table.rows()[0][2] else { panic!() };
        let Cell::Float(last) = table.rows()[4][2] else { panic!() };
        assert!((first + last).abs() < 1e-12);
        assert!((last - 2.234_139).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_grids() {
        let mut sweep = Sweep {
            spec: SweepSpec::Maxima { kinds: vec![RateKind::Holevo], memories: vec![0.8, 0.0] },
            photons: 8.0,
            eta: 0.7,
            settings: quick_settings(),
        };
        assert!(sweep.run().is_err());
        sweep.spec = SweepSpec::Maxima { kinds: vec![RateKind::Holevo], memories: vec![0.0] };
        sweep.eta = 1.5;
        assert!(matches!(sweep.run(), Err(Error::InvalidParameter { name: "eta", .. })));
        sweep.eta = 0.7;
        sweep.spec = SweepSpec::FiniteN { kinds: vec![RateKind::Holevo], memories: vec![0.0], ns: vec![0, 1] };
        assert!(sweep.run().is_err());
    }

    #[test]
    fn failing_point_is_named() {
        let quad = crate::quadrature::QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-300, max_subdivisions: 2 };
        let settings = OptimizerSettings { quad, ..quick_settings() };
        let sweep = Sweep {
            spec: SweepSpec::Maxima { kinds: vec![RateKind::Heterodyne], memories: vec![1.6] },
            photons: 8.0,
            eta: 0.7,
            settings,
        };
        match sweep.run() {
            Err(Error::GridPoint { point, .. }) => assert!(point.contains("s=1.6"), "{point}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
