//! Dense complex linear algebra helpers shared by the combiner designs.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Thin singular value decomposition `M = U diag(sigma) V^H` with
/// `sigma` sorted in non-increasing order.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// `m x k` left singular vectors, `k = min(m, n)`.
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    /// `n x k` right singular vectors (not transposed).
    pub v: CMatrix,
}

impl ThinSvd {
    pub fn new(m: &CMatrix, context: &str) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::numeric(context, "empty matrix"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::numeric(context, "matrix has non-finite entries"));
        }
        let svd = m
            .clone()
            .try_svd(true, true, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::numeric(context, "SVD did not converge"))?;
        let u = svd
            .u
            .ok_or_else(|| Error::numeric(context, "SVD returned no left vectors"))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::numeric(context, "SVD returned no right vectors"))?;
        Ok(Self {
            u,
            sigma: svd.singular_values.iter().copied().collect(),
            v: v_t.adjoint(),
        })
    }

    pub fn rank(&self, rtol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > top * rtol).count()
    }
}

/// Nearest matrix with orthonormal columns in Frobenius norm (the polar factor).
///
/// For `W = A S B^H` (thin SVD) the projection is `A B^H`.
pub fn polar_factor(w: &CMatrix) -> Result<CMatrix> {
    let svd = ThinSvd::new(w, "polar factor")?;
    Ok(&svd.u * svd.v.adjoint())
}

/// `|| W^H W - I ||_F`.
pub fn orthonormality_residual(w: &CMatrix) -> f64 {
    let gram = w.adjoint() * w;
    let n = gram.nrows();
    (gram - CMatrix::identity(n, n)).norm()
}

/// Natural log-determinant of a Hermitian positive definite matrix.
pub fn hermitian_ln_det(m: CMatrix, context: &str) -> Result<f64> {
    let n = m.nrows();
    let not_pd = || Error::numeric(context, format!("{n}x{n} matrix is not positive definite"));
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::numeric(context, "matrix has non-finite entries"));
    }
    // Negative pivots surface as imaginary diagonal entries of the factor.
    let l = Cholesky::new(m).ok_or_else(not_pd)?.l();
    let mut ln_det = 0.0;
    for d in l.diagonal().iter() {
        if d.re.is_nan() || d.re <= 0.0 || d.im.abs() > 1e-12 * d.re {
            return Err(not_pd());
        }
        ln_det += 2.0 * d.re.ln();
    }
    Ok(ln_det)
}

/// Elementwise phase projection onto the set of vectors or matrices whose
/// entries all have modulus `modulus`. Zero entries map to phase 0.
pub fn constant_modulus(m: &CMatrix, modulus: f64) -> CMatrix {
    m.map(|z| Complex64::from_polar(modulus, z.arg()))
}

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}
