//! The `n -> infinity` limit: mode sums become integrals over the angle
//! `xi in [0, pi]`, and `theta_n`, `K_n` tend to Bessel-function limits.

use std::f64::consts::PI;

use crate::channel::{check_theta, ChannelParams, EncodingParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::rates::{rate_term, RateKind};
use crate::special::bessel_i0;

/// Limits `(theta, K)`: `theta = (I0(2r) - 1) / (2N)` and
/// `K = (2N + 1 - I0(2r)) / I0(2y)`.
pub fn limits_theta_k(r: f64, y: f64, photons: f64) -> Result<(f64, f64)> {
    if !(photons > 0.0) {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("photon number must be positive, got {photons}"),
        });
    }
    let i0r = bessel_i0(2.0 * r)?;
    let theta = (i0r - 1.0) / (2.0 * photons);
    check_theta(theta)?;
    let k = ((2.0 * photons + 1.0 - i0r) / bessel_i0(2.0 * y)?).max(0.0);
    Ok((theta, k))
}

/// Asymptotic channel with a fixed encoding.
#[derive(Debug, Clone, Copy)]
pub struct LimitModel {
    params: ChannelParams,
    enc: EncodingParams,
    theta: f64,
    k: f64,
}

impl LimitModel {
    pub fn new(params: &ChannelParams, enc: &EncodingParams) -> Result<Self> {
        params.validate()?;
        let (theta, k) = limits_theta_k(enc.r, enc.y, params.photons)?;
        Ok(Self { params: *params, enc: *enc, theta, k })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Integrand of the asymptotic rate at angle `xi`.
    pub fn density(&self, kind: RateKind, xi: f64) -> Result<f64> {
        kind.check_scheme(self.enc.scheme)?;
        rate_term(kind, xi.cos(), &self.params, self.enc.r, self.enc.y, self.k)
    }

    /// `(1/pi) int_0^pi density(xi) dxi`, bits per mode.
    pub fn rate(&self, kind: RateKind, quad: &QuadratureSpec) -> Result<f64> {
        kind.check_scheme(self.enc.scheme)?;
        let integral = integrate(
            |xi| rate_term(kind, xi.cos(), &self.params, self.enc.r, self.enc.y, self.k),
            0.0,
            PI,
            quad,
        )?;
        Ok(integral / PI)
    }
}

/// Integrand of the asymptotic rate of `kind` at angle `xi`.
pub fn rate_density(
    kind: RateKind,
    xi: f64,
    params: &ChannelParams,
    enc: &EncodingParams,
) -> Result<f64> {
    LimitModel::new(params, enc)?.density(kind, xi)
}

/// Asymptotic rate per mode, `lim_{n -> inf} rate_n / n`.
pub fn asymptotic_rate(
    kind: RateKind,
    params: &ChannelParams,
    enc: &EncodingParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    LimitModel::new(params, enc)?.rate(kind, quad)
}
