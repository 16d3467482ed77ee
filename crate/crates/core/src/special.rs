//! Modified Bessel function of the first kind, order zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest `|x|` accepted by [`bessel_i0`]; `e^x` overflows soon after.
pub const I0_MAX_ARG: f64 = 700.0;

const SERIES_CUTOFF: f64 = 15.0;

/// `I0(x) = (1/pi) int_0^pi exp(x cos t) dt`.
///
/// Power series for `|x| <= 15`, large-argument asymptotic expansion
/// beyond. Relative accuracy is about 1e-14 over the whole range.
pub fn bessel_i0(x: f64) -> Result<f64> {
    let ax = x.abs();
    if !(ax <= I0_MAX_ARG) {
        return Err(Error::Range { x, limit: I0_MAX_ARG });
    }
    if ax <= SERIES_CUTOFF {
        Ok(series(ax))
    } else {
        Ok(asymptotic(ax))
    }
}

// sum_m (x/2)^{2m} / (m!)^2, all terms positive.
fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * m);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

// e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated at the
// smallest term.
fn asymptotic(x: f64) -> f64 {
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    // Split the exponential so x near the cap does not overflow early.
    let half = (0.5 * x).exp();
    half * (half / (2.0 * PI * x).sqrt()) * sum
}
