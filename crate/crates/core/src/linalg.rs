//! Real symmetric matrices and their eigendecomposition.
//!
//! In the bases used throughout the crate every Hamiltonian is real
//! symmetric; the dense eigensolver is faer's self-adjoint solver.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Dense real symmetric matrix. Writes go through [`SymmetricMatrix::set`],
/// which stores both `(i, j)` and `(j, i)`, so the matrix is symmetric
/// bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j) + value;
        self.set(i, j, v);
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut vals = self
            .to_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Full eigendecomposition, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Eigen> {
        let evd = self.to_faer().self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let raw: Vec<f64> = (0..self.dim).map(|i| evd.S()[i]).collect();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        let u = evd.U();
        let vectors = Mat::from_fn(self.dim, self.dim, |i, j| u[(i, order[j])]);
        let values = order.iter().map(|&j| raw[j]).collect();
        Ok(Eigen { values, vectors })
    }
}

/// `matrix = vectors * diag(values) * vectors^T`; column `j` of `vectors` is
/// the eigenvector for `values[j]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// `<v_j | x>` for every eigenvector.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let v = self.vectors.as_ref();
        (0..self.dim())
            .map(|j| {
                let col = v.col(j);
                x.iter().enumerate().map(|(i, xi)| col[i] * xi).sum()
            })
            .collect()
    }
}
