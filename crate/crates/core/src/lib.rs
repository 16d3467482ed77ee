//! Classical information rates of a lossy bosonic channel whose environment
//! is a multimode squeezed vacuum correlating successive channel uses.
//!
//! The crate evaluates the Holevo-chi quantity and the heterodyne and
//! homodyne mutual informations for blocks of `n` uses and in the
//! `n -> infinity` limit, and maximizes them over the input squeezing `r`
//! and modulation correlation `y` under a mean photon-number budget.
//!
//! Covariance matrices use the block ordering `(q_1..q_n, p_1..p_n)` with
//! vacuum variance `1/2`.

pub mod asymptotics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod rates;
pub mod special;
pub mod spectral;
pub mod sweep;
pub mod table;
pub mod verify;

pub use channel::{ChannelParams, EncodingParams, Modes, Scheme};
pub use error::{Error, Result};
pub use optimize::{maximize_over_r_y, OptimizationResult, OptimizerSettings};
pub use quadrature::QuadratureSpec;
pub use rates::RateKind;
