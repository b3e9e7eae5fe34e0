//! Shared numerical kernels: Hermitian matrices, eigensolvers, time-ordered
//! Schrödinger integration and adaptive quadrature.

pub mod eigen;
pub mod ode;
pub mod quad;

pub use eigen::{eigensolve, eigensolve_op};
pub use ode::{evolve, evolve_sampled, ConstGenerator, FnGenerator, TimeDependentOp};
pub use quad::quadrature;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity check tolerance, absolute on matrix entries.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Matrices above this dimension are diagonalized iteratively.
pub const DENSE_EIGEN_LIMIT: usize = 512;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: max |H(i,j) - conj(H(j,i))| = {violation:.3e}")]
    NotHermitian { violation: f64 },
    #[error("requested {k} eigenpairs of a dimension-{dim} matrix")]
    EigenCountOutOfRange { k: usize, dim: usize },
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix entry index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
}

/// A complex state vector. Construction does not enforce normalization;
/// callers that require it check [`StateVector::is_normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Basis vector |i> of the given dimension.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-9
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Anything that acts like a Hermitian operator on a state vector.
///
/// The iterative eigensolver and the Schrödinger integrator only need
/// matrix-vector products, so large models (e.g. spin chains beyond
/// dense reach) implement this directly instead of storing entries.
pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;

    /// y = H x; implementations must overwrite `y` completely.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);

    /// Cheap upper estimate of an operator norm, used to scale residual
    /// tolerances. Any norm within a small factor of ||H||_2 works.
    fn norm_estimate(&self) -> f64;
}

/// Dense or sparse Hermitian matrix storage.
///
/// Sparse entries are coordinate triplets kept in canonical row-major order
/// with duplicates summed at construction.
#[derive(Debug, Clone)]
pub enum HermitianMatrix {
    Dense(DMatrix<Complex64>),
    Sparse {
        dim: usize,
        triplets: Vec<(usize, usize, Complex64)>,
    },
}

impl HermitianMatrix {
    /// Wrap a dense matrix, rejecting symmetry violations beyond tolerance.
    pub fn dense(m: DMatrix<Complex64>) -> Result<Self, NumericsError> {
        let n = m.nrows();
        if n != m.ncols() || n == 0 {
            return Err(NumericsError::DimensionMismatch {
                expected: n.max(1),
                got: m.ncols(),
            });
        }
        let mut violation = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                violation = violation.max(d);
            }
        }
        if violation > HERMITICITY_TOL * scale_of(&m) {
            return Err(NumericsError::NotHermitian { violation });
        }
        Ok(HermitianMatrix::Dense(m))
    }

    /// Build from coordinate triplets; duplicates are summed, entries are
    /// sorted row-major, and Hermiticity is verified.
    pub fn from_triplets(
        dim: usize,
        triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self, NumericsError> {
        if dim == 0 {
            return Err(NumericsError::DimensionMismatch { expected: 1, got: 0 });
        }
        for &(r, c, _) in &triplets {
            if r >= dim || c >= dim {
                return Err(NumericsError::IndexOutOfRange { row: r, col: c, dim });
            }
        }
        let mut t = triplets;
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v.norm() > 0.0);
        // Hermiticity: every (r, c, v) must have a partner (c, r, conj v).
        let scale = merged
            .iter()
            .map(|&(_, _, v)| v.norm())
            .fold(1.0f64, f64::max);
        let mut violation = 0.0f64;
        for &(r, c, v) in &merged {
            if r > c {
                continue;
            }
            let partner = merged
                .binary_search_by_key(&(c, r), |&(rr, cc, _)| (rr, cc))
                .ok()
                .map(|idx| merged[idx].2)
                .unwrap_or(Complex64::new(0.0, 0.0));
            violation = violation.max((v - partner.conj()).norm());
        }
        if violation > HERMITICITY_TOL * scale {
            return Err(NumericsError::NotHermitian { violation });
        }
        Ok(HermitianMatrix::Sparse { dim, triplets: merged })
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Dense(m) => m.nrows(),
            HermitianMatrix::Sparse { dim, .. } => *dim,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            HermitianMatrix::Dense(m) => m.clone(),
            HermitianMatrix::Sparse { dim, triplets } => {
                let mut m = DMatrix::zeros(*dim, *dim);
                for &(r, c, v) in triplets {
                    m[(r, c)] += v;
                }
                m
            }
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            HermitianMatrix::Dense(m) => m[(i, j)],
            HermitianMatrix::Sparse { triplets, .. } => triplets
                .binary_search_by_key(&(i, j), |&(r, c, _)| (r, c))
                .ok()
                .map(|idx| triplets[idx].2)
                .unwrap_or(Complex64::new(0.0, 0.0)),
        }
    }

    /// Expectation value <x|H|x>.
    pub fn expectation(&self, x: &StateVector) -> f64 {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(&x.amplitudes, &mut y);
        x.amplitudes
            .iter()
            .zip(&y)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

fn scale_of(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(1.0f64, f64::max)
}

impl HermitianOp for HermitianMatrix {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        match self {
            HermitianMatrix::Dense(m) => {
                let n = m.nrows();
                for i in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += m[(i, j)] * x[j];
                    }
                    y[i] = acc;
                }
            }
            HermitianMatrix::Sparse { triplets, .. } => {
                y.fill(Complex64::new(0.0, 0.0));
                for &(r, c, v) in triplets {
                    y[r] += v * x[c];
                }
            }
        }
    }

    fn norm_estimate(&self) -> f64 {
        // max row sum (infinity norm), an upper bound on ||H||_2
        match self {
            HermitianMatrix::Dense(m) => (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max),
            HermitianMatrix::Sparse { dim, triplets } => {
                let mut row_sums = vec![0.0f64; *dim];
                for &(r, _, v) in triplets {
                    row_sums[r] += v.norm();
                }
                row_sums.into_iter().fold(0.0, f64::max)
            }
        }
    }
}
