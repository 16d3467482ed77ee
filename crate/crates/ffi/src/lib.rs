//! C ABI over the `bmcap` library.
//!
//! Every function returns a [`BmcapStatus`] and writes its result through an
//! out-pointer. On failure a message is kept per thread and can be read
//! with [`bmcap_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bmcap::channel::r_bounds;
use bmcap::special::bessel_i0;
use bmcap::spectral::entropy_g;
use bmcap::{
    maximize_over_r_y, ChannelParams, Error, Modes, OptimizerSettings, QuadratureSpec, RateKind,
};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmcapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The energy constraint `theta <= 1` is violated.
    ConstraintViolation = 3,
    /// Non-convergence or another numerical failure.
    Numerical = 4,
    /// Internal panic; the library state is unaffected.
    Panic = 5,
}

/// Values accepted for the `kind` argument.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmcapRateKind {
    Holevo = 0,
    Heterodyne = 1,
    Homodyne = 2,
}

/// Opaque channel handle.
pub struct BmcapChannel {
    params: ChannelParams,
    quad: QuadratureSpec,
}

/// Maximum of a rate over `(r, y)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmcapOptimum {
    pub r: f64,
    pub y: f64,
    /// Bits per mode.
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Energy-allowed interval of `r`; infinite bounds when unconstrained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmcapBounds {
    pub min: f64,
    pub max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

struct Failure(BmcapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn status_of(e: &Error) -> BmcapStatus {
    match e {
        Error::InvalidDimension(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidParameter { .. }
        | Error::InvalidScheme { .. }
        | Error::Domain(_)
        | Error::Range { .. } => BmcapStatus::InvalidArgument,
        Error::ConstraintViolation { .. } => BmcapStatus::ConstraintViolation,
        Error::GridPoint { source, .. } => status_of(source),
        Error::Spectral(_) | Error::Solver(_) | Error::Quadrature { .. } | Error::Divergence { .. } => {
            BmcapStatus::Numerical
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(BmcapStatus::NullPointer, format!("`{name}` is null"))
}

fn guard<F>(body: F) -> BmcapStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BmcapStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {message}"));
            BmcapStatus::Panic
        }
    }
}

fn rate_kind(kind: u32) -> Result<RateKind, Failure> {
    match kind {
        0 => Ok(RateKind::Holevo),
        1 => Ok(RateKind::Heterodyne),
        2 => Ok(RateKind::Homodyne),
        other => Err(Failure(BmcapStatus::InvalidArgument, format!("unknown rate kind {other}"))),
    }
}

fn modes(n: usize) -> Modes {
    if n == 0 {
        Modes::Infinite
    } else {
        Modes::Finite(n)
    }
}

/// Creates a channel with transmittivity `eta`, photon number `photons`
/// and memory strength `s`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn bmcap_channel_new(eta: f64, photons: f64, s: f64, out: *mut *mut BmcapChannel) -> BmcapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = ChannelParams::new(eta, photons, s)?;
        let handle = Box::new(BmcapChannel { params, quad: QuadratureSpec::default() });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// Releases a channel. Null is ignored.
///
/// # Safety
/// `channel` must be null or a handle from [`bmcap_channel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bmcap_channel_free(channel: *mut BmcapChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Changes the memory strength of an existing channel.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmcap_channel_set_memory(channel: *mut BmcapChannel, s: f64) -> BmcapStatus {
    guard(|| {
        let ch = channel.as_mut().ok_or_else(|| null("channel"))?;
        let params = ch.params.with_memory(s);
        params.validate()?;
        ch.params = params;
        Ok(())
    })
}

/// Sets the absolute and relative tolerance of the asymptotic integrals.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmcap_channel_set_quad_tol(channel: *mut BmcapChannel, tol: f64) -> BmcapStatus {
    guard(|| {
        let ch = channel.as_mut().ok_or_else(|| null("channel"))?;
        let quad = QuadratureSpec { abs_tol: tol, rel_tol: tol, ..ch.quad };
        quad.validate()?;
        ch.quad = quad;
        Ok(())
    })
}

/// Rate of `kind` in bits per mode at `(r, y)` for `n` uses, or in the
/// `n -> infinity` limit when `n == 0`. Homodyne uses the single-quadrature
/// modulation, the others the symmetric one.
///
/// # Safety
/// `channel` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bmcap_rate(
    channel: *const BmcapChannel,
    kind: u32,
    n: usize,
    r: f64,
    y: f64,
    out: *mut f64,
) -> BmcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = rate_kind(kind)?;
        let objective = bmcap::optimize::Objective::new(kind, modes(n), &ch.params, &ch.quad)?;
        *out = objective.eval(r, y)?;
        Ok(())
    })
}

/// Maximum of the rate of `kind` over `(r, y)`; `n == 0` for the limit.
///
/// # Safety
/// `channel` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bmcap_maximize(
    channel: *const BmcapChannel,
    kind: u32,
    n: usize,
    out: *mut BmcapOptimum,
) -> BmcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = rate_kind(kind)?;
        let settings = OptimizerSettings { quad: ch.quad, ..OptimizerSettings::default() };
        let res = maximize_over_r_y(kind, modes(n), &ch.params, &settings)?;
        *out = BmcapOptimum {
            r: res.r_star,
            y: res.y_star,
            value: res.value,
            evaluations: res.evaluations as u64,
            converged: res.converged,
        };
        Ok(())
    })
}

/// Energy-allowed interval of `r` for `n` uses (`n == 0`: the limit).
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bmcap_r_bounds(n: usize, photons: f64, out: *mut BmcapBounds) -> BmcapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = r_bounds(modes(n), photons)?;
        *out = BmcapBounds { min: b.min, max: b.max };
        Ok(())
    })
}

/// `g(x) = (x + 1) log2(x + 1) - x log2 x`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bmcap_entropy_g(x: f64, out: *mut f64) -> BmcapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = entropy_g(x)?;
        Ok(())
    })
}

/// Modified Bessel function `I0(x)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bmcap_bessel_i0(x: f64, out: *mut f64) -> BmcapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = bessel_i0(x)?;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bmcap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bmcap_version() -> *const c_char {
    const VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
