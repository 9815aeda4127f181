//! Hermitian eigensolver wrapper with residual and orthogonality checks.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex<f64>>;

/// Componentwise Hermitian tolerance, relative to the largest entry (at least 1).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Bound on `‖Hv − λv‖ / ‖H‖` and on `max |V*V − I|`.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Nonincreasing.
    pub values: Vec<f64>,
    /// Column `k` pairs with `values[k]`.
    pub vectors: CMatrix,
    pub residual: f64,
    pub orthogonality: f64,
}

/// Builds an `n×n` matrix from `2n²` floats, row-major `(re, im)` pairs.
pub fn from_interleaved(n: usize, data: &[f64]) -> Result<CMatrix> {
    if data.len() != 2 * n * n {
        return Err(Error::Parse(format!("expected {} floats, got {}", 2 * n * n, data.len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let at = 2 * (i * n + j);
        Complex::new(data[at], data[at + 1])
    }))
}

pub fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Precondition("matrix is not square".into()));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let n = h.nrows();
    for i in 0..n {
        for j in i..n {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::Precondition(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix; fails if the residual contract is not met.
pub fn eig_hermitian(h: &CMatrix) -> Result<Eigen> {
    check_hermitian(h)?;
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym
        .clone()
        .try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

    let norm = sym.norm();
    let mut residual: f64 = 0.0;
    if norm > 0.0 {
        for (k, &lambda) in values.iter().enumerate() {
            let v = vectors.column(k);
            let r = &sym * v - v.scale(lambda);
            residual = residual.max(r.norm() / norm);
        }
    }
    let gram = vectors.adjoint() * &vectors - CMatrix::identity(n, n);
    let orthogonality = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL || orthogonality > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "eigen-decomposition failed its checks: residual {residual:e}, orthogonality {orthogonality:e}"
        )));
    }
    Ok(Eigen {
        values,
        vectors,
        residual,
        orthogonality,
    })
}
