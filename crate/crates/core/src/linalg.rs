//! Dense symmetric helpers shared by the state, spectrum and dynamics modules.
//!
//! Every inverse and square root here goes through a symmetric
//! eigendecomposition so that the offending direction of a near-singular
//! matrix can be reported.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(symmetrize(m));
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        SymEigen { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V f(D) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * f(self.values[j])
        });
        symmetrize(&(scaled * self.vectors.transpose()))
    }
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest entry of `|M - Mᵀ|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Largest entry of `|M + Mᵀ|`.
pub fn antisymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m + m.transpose()))
}

/// Divides by the matrix scale, treating an all-zero matrix as scale 1.
pub fn relative(violation: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        violation / scale
    } else {
        violation
    }
}

/// Inverse of a symmetric positive-definite matrix together with its
/// spectral condition number.
pub fn spd_inverse(m: &DMatrix<f64>, what: &'static str) -> Result<(DMatrix<f64>, f64)> {
    let eig = SymEigen::new(m);
    let lo = eig.min();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { what, eigenvalue: lo });
    }
    Ok((eig.map(|x| 1.0 / x), eig.max() / lo))
}

pub fn spd_sqrt(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let eig = SymEigen::new(m);
    let lo = eig.min();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { what, eigenvalue: lo });
    }
    Ok(eig.map(f64::sqrt))
}

/// Symplectic values `2ν` of the covariance matrix `[[Q, S], [Sᵀ, P]]`,
/// descending. A pure mode has value 1.
///
/// Uses `K = γ^{1/2} J γ^{1/2}`: `KᵀK` is symmetric with every `ν²`
/// appearing twice.
pub fn williamson_values(q: &DMatrix<f64>, p: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = q.nrows();
    let mut gamma = DMatrix::zeros(2 * n, 2 * n);
    gamma.view_mut((0, 0), (n, n)).copy_from(q);
    gamma.view_mut((n, n), (n, n)).copy_from(p);
    gamma.view_mut((0, n), (n, n)).copy_from(s);
    gamma.view_mut((n, 0), (n, n)).copy_from(&s.transpose());
    let root = spd_sqrt(&gamma, "covariance matrix")?;
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    let k = &root * j * &root;
    let ktk = k.transpose() * &k;
    let eig = SymEigen::new(&ktk);
    let mut nu2: Vec<f64> = eig.values.iter().copied().collect();
    nu2.sort_by(|a, b| b.total_cmp(a));
    Ok(nu2
        .chunks(2)
        .map(|pair| 2.0 * (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}
