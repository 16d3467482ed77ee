//! Coupling matrix, covariance matrices and Gaussian-state entropies.
//!
//! All covariance matrices use the block quadrature ordering
//! `(q_1, ..., q_n, p_1, ..., p_n)` with `hbar = 1`, so the vacuum has
//! variance `1/2` in every quadrature. Many Gaussian-state libraries
//! interleave `(q_1, p_1, q_2, p_2, ...)`; convert before mixing the two.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Round-off allowance below zero for arguments of [`entropy_g`].
pub const ENTROPY_CLAMP: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;
const PAIRING_TOL: f64 = 1e-9;

/// Angle `x_k = pi k / (n + 1)` of the k-th normal mode, `1 <= k <= n`.
#[inline]
pub fn mode_angle(k: usize, n: usize) -> f64 {
    PI * k as f64 / (n + 1) as f64
}

/// `cos(x_k)` for `k = 1..=n`, strictly decreasing.
pub fn mode_cosines(n: usize) -> Vec<f64> {
    (1..=n).map(|k| mode_angle(k, n).cos()).collect()
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    Ok(())
}

/// Nearest-neighbour coupling matrix: zero diagonal, ones on both first
/// off-diagonals.
pub fn build_omega(n: usize) -> Result<DMatrix<f64>> {
    check_dimension(n)?;
    Ok(DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }))
}

/// Closed-form eigenvalues `2 cos(pi j / (n + 1))`, `j = 1..=n`, in
/// descending order.
pub fn omega_eigenvalues(n: usize) -> Result<Vec<f64>> {
    check_dimension(n)?;
    Ok(mode_cosines(n).into_iter().map(|c| 2.0 * c).collect())
}

/// Orthonormal sine eigenbasis of the coupling matrix. Column `j` is the
/// eigenvector for `omega_eigenvalues(n)[j]`. The matrix is symmetric.
pub fn omega_eigenbasis(n: usize) -> Result<DMatrix<f64>> {
    check_dimension(n)?;
    let norm = (2.0 / (n + 1) as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        norm * (PI * ((i + 1) * (j + 1)) as f64 / (n + 1) as f64).sin()
    }))
}

/// `exp(gamma * Omega)` assembled from the sine eigenbasis.
pub fn exp_omega(n: usize, gamma: f64) -> Result<DMatrix<f64>> {
    let basis = omega_eigenbasis(n)?;
    let weights = omega_eigenvalues(n)?;
    let mut scaled = basis.clone();
    for (j, lambda) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut((gamma * lambda).exp());
    }
    Ok(&scaled * basis.transpose())
}

/// Real symmetric `2n x 2n` quadrature covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps a `2n x 2n` matrix, checking shape and symmetry.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::InvalidDimension(format!(
                "covariance matrix must be 2n x 2n, got {rows} x {cols}"
            )));
        }
        let scale = data.amax().max(1.0);
        for i in 0..rows {
            for j in (i + 1)..cols {
                if (data[(i, j)] - data[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::Spectral(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n: rows / 2, data })
    }

    /// Block-diagonal matrix `diag(qq, pp)`.
    pub fn from_blocks(qq: &DMatrix<f64>, pp: &DMatrix<f64>) -> Result<Self> {
        if qq.shape() != pp.shape() {
            return Err(Error::DimensionMismatch { left: qq.nrows(), right: pp.nrows() });
        }
        let n = qq.nrows();
        let mut data = DMatrix::zeros(2 * n, 2 * n);
        data.view_mut((0, 0), (n, n)).copy_from(qq);
        data.view_mut((n, n), (n, n)).copy_from(pp);
        Self::new(data)
    }

    /// `scale * I_{2n}`.
    pub fn scaled_identity(n: usize, scale: f64) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self { n, data: DMatrix::identity(2 * n, 2 * n) * scale })
    }

    /// Vacuum state, `(1/2) I`.
    pub fn vacuum(n: usize) -> Result<Self> {
        Self::scaled_identity(n, 0.5)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::scaled_identity(n, 0.0)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Position-quadrature block.
    pub fn qq_block(&self) -> DMatrix<f64> {
        self.data.view((0, 0), (self.n, self.n)).into_owned()
    }

    /// Momentum-quadrature block.
    pub fn pp_block(&self) -> DMatrix<f64> {
        self.data.view((self.n, self.n), (self.n, self.n)).into_owned()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(Self { n: self.n, data: &self.data * a + &other.data * b })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { n: self.n, data: &self.data * factor }
    }

    /// Reorders mode pairs: mode `i` of the result is mode `perm[i]` of
    /// `self`, applied to the q and p blocks simultaneously.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidDimension("not a permutation of the modes".into()));
        }
        let index = |i: usize| if i < n { perm[i] } else { n + perm[i - n] };
        let data = DMatrix::from_fn(2 * n, 2 * n, |i, j| self.data[(index(i), index(j))]);
        Ok(Self { n, data })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok((&self.data - &other.data).amax())
    }
}

/// `(1/2) diag(exp(gamma Omega), exp(-gamma Omega))`, a pure multimode
/// squeezed vacuum.
pub fn exp_omega_covariance(n: usize, gamma: f64) -> Result<CovarianceMatrix> {
    let qq = exp_omega(n, gamma)? * 0.5;
    let pp = exp_omega(n, -gamma)? * 0.5;
    CovarianceMatrix::from_blocks(&qq, &pp)
}

/// Symplectic eigenvalues, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum(Vec<f64>);

impl SymplecticSpectrum {
    /// Sorts the values; rejects empty input and non-positive entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Spectral("symplectic eigenvalues must be positive".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Entropy of a single-mode thermal state with mean photon number `x`,
/// in bits: `(x+1) log2(x+1) - x log2 x`.
pub fn entropy_g(x: f64) -> Result<f64> {
    if x.is_nan() || x < -ENTROPY_CLAMP {
        return Err(Error::Domain(format!("entropy argument {x} is negative")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Generic symplectic eigenvalues: the moduli of the eigenvalue pairs
/// `+-i nu` of `Sigma^{-1} V`. No structure of `V` is assumed.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let n = v.modes();
    let m = v.as_matrix();
    if m.clone().cholesky().is_none() {
        return Err(Error::Spectral("covariance matrix is not positive definite".into()));
    }
    // Sigma^{-1} = [[0, -I], [I, 0]]
    let mut product = DMatrix::zeros(2 * n, 2 * n);
    product.rows_mut(0, n).copy_from(&(-m.rows(n, n)));
    product.rows_mut(n, n).copy_from(&m.rows(0, n));

    let mut moduli: Vec<f64> = product.complex_eigenvalues().iter().map(|z| z.im.abs()).collect();
    moduli.sort_by(f64::total_cmp);

    let values = moduli
        .chunks_exact(2)
        .map(|pair| {
            let scale = pair[1].abs().max(f64::MIN_POSITIVE);
            if (pair[1] - pair[0]).abs() > PAIRING_TOL * scale {
                Err(Error::Spectral(format!(
                    "unpaired eigenvalue moduli {} and {}",
                    pair[0], pair[1]
                )))
            } else {
                Ok(0.5 * (pair[0] + pair[1]))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SymplecticSpectrum::new(values)
}

/// Entropy contribution `g(nu - 1/2)` of one symplectic eigenvalue.
pub fn mode_entropy(nu: f64) -> Result<f64> {
    entropy_g(nu - 0.5)
}

/// Von Neumann entropy in bits, `sum_k g(nu_k - 1/2)`.
pub fn von_neumann_entropy(v: &CovarianceMatrix) -> Result<f64> {
    symplectic_eigenvalues(v)?
        .values()
        .iter()
        .try_fold(0.0, |acc, &nu| Ok(acc + mode_entropy(nu)?))
}
