//! Dense-matrix reference routes for the closed-form rates.
//!
//! These assemble the full `2n x 2n` covariances and use generic linear
//! algebra only (general eigenvalues, Cholesky log-determinants). They are
//! O(n^3) and intended for cross-checking, not production sweeps.

use nalgebra::DMatrix;

use crate::channel::{
    averaged_output_covariance, build_model_covariances, output_covariance, ChannelParams,
    EncodingParams, Scheme,
};
use crate::error::{Error, Result};
use crate::spectral::{von_neumann_entropy, CovarianceMatrix};

/// `(V_out, V_out_bar)` assembled from the model matrices.
pub fn output_pair(
    n: usize,
    params: &ChannelParams,
    enc: &EncodingParams,
) -> Result<(CovarianceMatrix, CovarianceMatrix)> {
    let model = build_model_covariances(n, params, enc)?;
    let out = output_covariance(&model.input, &model.env, params.eta)?;
    let avg = averaged_output_covariance(&out, &model.classical, params.eta)?;
    Ok((out, avg))
}

fn log2_det(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Spectral("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..m.nrows()).map(|i| l[(i, i)].log2()).sum::<f64>())
}

/// `S(V_out_bar) - S(V_out)` with generic symplectic spectra.
pub fn holevo_chi_dense(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    let (out, avg) = output_pair(n, params, enc)?;
    Ok(von_neumann_entropy(&avg)? - von_neumann_entropy(&out)?)
}

/// `(1/2) log2 |(V_out_bar + 1/2)(V_out + 1/2)^{-1}|`.
pub fn heterodyne_info_dense(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    let (out, avg) = output_pair(n, params, enc)?;
    let half = DMatrix::<f64>::identity(2 * n, 2 * n) * 0.5;
    let num = log2_det(&(avg.as_matrix() + &half))?;
    let den = log2_det(&(out.as_matrix() + &half))?;
    Ok(0.5 * (num - den))
}

/// `(1/2) log2 |V_out_bar^{(11)} (V_out^{(11)})^{-1}|` on the q blocks.
/// Requires the single-quadrature modulation.
pub fn homodyne_info_dense(n: usize, params: &ChannelParams, enc: &EncodingParams) -> Result<f64> {
    if enc.scheme != Scheme::SingleQuadrature {
        return Err(Error::InvalidScheme { kind: "homodyne determinant", scheme: enc.scheme.name() });
    }
    let (out, avg) = output_pair(n, params, enc)?;
    Ok(0.5 * (log2_det(&avg.qq_block())? - log2_det(&out.qq_block())?))
}
