//! Dense vectors and the two matrix shapes used for quadratic regularization:
//! nonnegative diagonal matrices and full symmetric positive-definite ones.
//!
//! Everything here is `f64`, finite by construction, and immutable once built.

use nalgebra as na;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("negative entry at index {0} (diagonal must be nonnegative)")]
    NegativeEntry(usize),
    #[error("matrix is not positive-definite (min eigenvalue {min_eig:e}, max {max_eig:e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },
    #[error("matrix is not square: {rows} rows, row {bad_row} has {cols} entries")]
    NotSquare {
        rows: usize,
        bad_row: usize,
        cols: usize,
    },
    #[error("empty input")]
    Empty,
}

/// Dense real vector of fixed length; entries are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        for (i, v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite(i));
            }
        }
        Ok(Vector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Result<Self, LinalgError> {
        Self::new(vec![value; n])
    }

    /// Internal constructor for values produced by our own arithmetic.
    /// Callers that can overflow must re-validate with [`Vector::validate`].
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.clone()
    }

    /// Re-check finiteness after arithmetic that may overflow.
    pub fn validate(&self) -> Result<(), LinalgError> {
        for (i, v) in self.0.iter().enumerate() {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite(i));
            }
        }
        Ok(())
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "vector dimension mismatch: {} vs {}",
            self.dim(),
            other.dim()
        );
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.assert_same_dim(other);
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.assert_same_dim(other);
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Lp norm for p in [1, inf]; `f64::INFINITY` selects the max norm.
    /// Scaled by the largest entry so large exponents stay stable.
    pub fn norm_lp(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "Lp norm requires p >= 1, got {p}");
        if p.is_infinite() {
            return self.norm_linf();
        }
        if p == 1.0 {
            return self.0.iter().map(|a| a.abs()).sum();
        }
        if p == 2.0 {
            return self.norm_l2();
        }
        let m = self.norm_linf();
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = self.0.iter().map(|a| (a.abs() / m).powf(p)).sum();
        m * s.powf(1.0 / p)
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Diagonal positive-semidefinite matrix, stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagPsd {
    diag: Vector,
}

impl DiagPsd {
    pub fn new(diag: Vector) -> Result<Self, LinalgError> {
        for (i, v) in diag.iter().enumerate() {
            if *v < 0.0 {
                return Err(LinalgError::NegativeEntry(i));
            }
        }
        Ok(DiagPsd { diag })
    }

    pub fn identity(n: usize) -> Self {
        DiagPsd {
            diag: Vector::from_raw(vec![1.0; n]),
        }
    }

    /// `a * I`; requires `a >= 0`.
    pub fn uniform(n: usize, a: f64) -> Result<Self, LinalgError> {
        Self::new(Vector::new(vec![a; n])?)
    }

    pub fn dim(&self) -> usize {
        self.diag.dim()
    }

    pub fn diag(&self) -> &Vector {
        &self.diag
    }

    pub fn is_positive_definite(&self) -> bool {
        self.diag.iter().all(|v| *v > 0.0)
    }

    /// Entrywise square root.
    pub fn sqrt(&self) -> Self {
        DiagPsd {
            diag: Vector::from_raw(self.diag.iter().map(|v| v.sqrt()).collect()),
        }
    }

    /// Entrywise inverse; defined only for positive-definite diagonals.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_positive_definite() {
            let min = self.diag.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = self.diag.iter().cloned().fold(0.0, f64::max);
            return Err(LinalgError::NotPositiveDefinite {
                min_eig: min,
                max_eig: max,
            });
        }
        Ok(DiagPsd {
            diag: Vector::from_raw(self.diag.iter().map(|v| 1.0 / v).collect()),
        })
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        self.diag.hadamard(v)
    }

    pub fn max_entry(&self) -> f64 {
        self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.diag.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Returns `Some(a)` when the matrix equals `a * I` exactly.
    pub fn as_uniform(&self) -> Option<f64> {
        let first = *self.diag.first()?;
        if self.diag.iter().all(|v| *v == first) {
            Some(first)
        } else {
            None
        }
    }
}

/// Eigendecomposition of a symmetric matrix, `M = P diag(values) P^T`
/// with orthonormal `P`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    vectors: na::DMatrix<f64>,
    values: Vec<f64>,
}

impl SymEigen {
    fn from_matrix(m: na::DMatrix<f64>) -> Self {
        let eig = na::SymmetricEigen::new(m);
        SymEigen {
            values: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Coordinates of `v` in the eigenbasis: `P^T v`.
    pub fn to_basis(&self, v: &Vector) -> Vector {
        let dv = na::DVector::from_column_slice(v.as_slice());
        let out = self.vectors.transpose() * dv;
        Vector::from_raw(out.iter().cloned().collect())
    }

    /// Map eigenbasis coordinates back: `P c`.
    pub fn from_basis(&self, c: &Vector) -> Vector {
        let dv = na::DVector::from_column_slice(c.as_slice());
        let out = &self.vectors * dv;
        Vector::from_raw(out.iter().cloned().collect())
    }
}

/// Relative eigenvalue floor below which a symmetric matrix is rejected
/// as not positive-definite.
const PD_REL_TOL: f64 = 1e-12;

/// Dense symmetric positive-definite matrix.
///
/// The input is symmetrized as `(A + A^T)/2` before factorization and the
/// eigendecomposition `A = P D P^T` is kept alongside the entries, so inverse
/// and square root are exact functions of the same factorization.
#[derive(Debug, Clone)]
pub struct SymPd {
    mat: na::DMatrix<f64>,
    eig: SymEigen,
}

impl SymPd {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(LinalgError::NotSquare {
                    rows: n,
                    bad_row: i,
                    cols: r.len(),
                });
            }
            for v in r {
                if !v.is_finite() {
                    return Err(LinalgError::NonFinite(i));
                }
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
        let m = na::DMatrix::from_row_slice(n, n, &flat);
        let sym = (&m + m.transpose()) * 0.5;
        Self::from_symmetric(sym)
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut rows = vec![vec![0.0; n]; n];
        for (i, v) in diag.iter().enumerate() {
            rows[i][i] = *v;
        }
        Self::new(rows)
    }

    fn from_symmetric(sym: na::DMatrix<f64>) -> Result<Self, LinalgError> {
        let eig = SymEigen::from_matrix(sym.clone());
        let max_eig = eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_eig = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig.is_nan() || min_eig <= PD_REL_TOL * max_eig || min_eig <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite { min_eig, max_eig });
        }
        Ok(SymPd { mat: sym, eig })
    }

    /// Rebuild from an existing factorization with transformed eigenvalues.
    /// Keeps the eigenvectors shared so `A` and `f(A)` stay consistent.
    fn with_values(&self, values: Vec<f64>) -> Self {
        let d = na::DMatrix::from_diagonal(&na::DVector::from_vec(values.clone()));
        let mat = &self.eig.vectors * d * self.eig.vectors.transpose();
        let mat = (&mat + mat.transpose()) * 0.5;
        SymPd {
            mat,
            eig: SymEigen {
                vectors: self.eig.vectors.clone(),
                values,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.dim(), "SymPd::apply dimension mismatch");
        let out = &self.mat * na::DVector::from_column_slice(v.as_slice());
        Vector::from_raw(out.iter().cloned().collect())
    }

    /// `A^{-1} v` through the factorization: `P (P^T v ./ values)`.
    pub fn apply_inverse(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.dim(), "SymPd::apply_inverse dimension mismatch");
        let c = self.eig.to_basis(v);
        let scaled =
            Vector::from_raw(c.iter().zip(&self.eig.values).map(|(x, l)| x / l).collect());
        self.eig.from_basis(&scaled)
    }

    pub fn inverse(&self) -> SymPd {
        self.with_values(self.eig.values.iter().map(|l| 1.0 / l).collect())
    }

    pub fn sqrt(&self) -> SymPd {
        self.with_values(self.eig.values.iter().map(|l| l.sqrt()).collect())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.min_value()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig.max_value()
    }

    /// Eigendecomposition of `A^{-1} diag(d) A^{-1}`.
    ///
    /// This is the shape every transformed-ball computation needs: weighted
    /// projections and the quadratic-form maximum both reduce to it.
    pub fn inverse_sandwich_eigen(&self, d: &Vector) -> SymEigen {
        assert_eq!(self.dim(), d.dim(), "inverse_sandwich_eigen dimension mismatch");
        let inv = self.inverse();
        let dm = na::DMatrix::from_diagonal(&na::DVector::from_column_slice(d.as_slice()));
        let b = &inv.mat * dm * &inv.mat;
        let b = (&b + b.transpose()) * 0.5;
        SymEigen::from_matrix(b)
    }
}
