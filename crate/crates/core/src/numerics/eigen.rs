//! Hermitian eigensolvers: direct dense diagonalization below
//! [`DENSE_EIGEN_LIMIT`](super::DENSE_EIGEN_LIMIT), deflated Lanczos with
//! full reorthogonalization above it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HermitianMatrix, HermitianOp, NumericsError, StateVector, DENSE_EIGEN_LIMIT};

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_LANCZOS_DIM: usize = 600;
const MAX_RESTARTS: usize = 30;

/// Lowest `k` eigenpairs of a Hermitian matrix, eigenvalues ascending.
///
/// Residuals satisfy ||Hv - lambda v|| <= 1e-9 ||H|| per pair. Degenerate
/// eigenvalues come back as any orthonormal basis of the eigenspace.
pub fn eigensolve(
    h: &HermitianMatrix,
    k: usize,
) -> Result<(Vec<f64>, Vec<StateVector>), NumericsError> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(NumericsError::EigenCountOutOfRange { k, dim });
    }
    match h {
        HermitianMatrix::Dense(m) => dense_eigensolve(m, k),
        HermitianMatrix::Sparse { .. } if dim <= DENSE_EIGEN_LIMIT => {
            dense_eigensolve(&h.to_dense(), k)
        }
        _ => eigensolve_op(h, k),
    }
}

/// Iterative path for anything exposing matrix-vector products.
pub fn eigensolve_op(
    op: &dyn HermitianOp,
    k: usize,
) -> Result<(Vec<f64>, Vec<StateVector>), NumericsError> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(NumericsError::EigenCountOutOfRange { k, dim });
    }
    let scale = op.norm_estimate().max(1.0);
    let mut values = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    // One eigenpair at a time; each run deflates against converged vectors,
    // which also resolves exact degeneracies.
    for j in 0..k {
        let (lambda, v) = lanczos_ground(op, &vectors, scale, j as u64)?;
        values.push(lambda);
        vectors.push(v);
    }
    let states = vectors.into_iter().map(StateVector::new).collect();
    Ok((values, states))
}

fn dense_eigensolve(
    m: &DMatrix<Complex64>,
    k: usize,
) -> Result<(Vec<f64>, Vec<StateVector>), NumericsError> {
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(NumericsError::NonFinite { context: "eigensolve input" });
    }
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<StateVector> = order[..k]
        .iter()
        .map(|&i| {
            let col = eig.eigenvectors.column(i);
            let mut s = StateVector::new(col.iter().copied().collect());
            s.normalize();
            s
        })
        .collect();
    Ok((values, vectors))
}

/// Ground pair of the operator restricted to the orthogonal complement of
/// `deflate`. Lanczos with full reorthogonalization and thick restarts.
fn lanczos_ground(
    op: &dyn HermitianOp,
    deflate: &[Vec<Complex64>],
    scale: f64,
    seed_salt: u64,
) -> Result<(f64, Vec<Complex64>), NumericsError> {
    let dim = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a77_ce5e ^ seed_salt);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let m_max = MAX_LANCZOS_DIM.min(dim - deflate.len());

    let mut best_residual = f64::INFINITY;
    for restart in 0..MAX_RESTARTS {
        project_out(&mut start, deflate);
        if normalize(&mut start) < 1e-14 {
            // start vector fell entirely inside the deflated space; reseed
            start = (0..dim)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            continue;
        }

        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];

        for j in 0..m_max {
            op.apply(&basis[j], &mut w);
            if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(NumericsError::NonFinite { context: "operator apply" });
            }
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            // full reorthogonalization against Krylov basis and deflated pairs
            project_out(&mut w, deflate);
            for b in &basis {
                let c = dot(b, &w);
                axpy(&mut w, -c, b);
            }
            for b in &basis {
                let c = dot(b, &w);
                axpy(&mut w, -c, b);
            }
            let beta = normalize(&mut w);
            let converged_enough = j + 1 >= 2 && (j + 1) % 10 == 0;
            if beta < 1e-13 * scale || j + 1 == m_max || converged_enough {
                // check Ritz convergence on the current tridiagonal
                let (theta, y) = tridiag_ground(&alphas, &betas);
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                for (coeff, b) in y.iter().zip(&basis) {
                    axpy(&mut v, Complex64::new(*coeff, 0.0), b);
                }
                project_out(&mut v, deflate);
                normalize(&mut v);
                let residual = residual_norm(op, theta, &v);
                if residual <= RESIDUAL_TOL * scale {
                    return Ok((theta, v));
                }
                best_residual = best_residual.min(residual);
                if beta < 1e-13 * scale || j + 1 == m_max {
                    // restart from the best Ritz vector
                    start = v;
                    break;
                }
            }
            if beta >= 1e-13 * scale {
                betas.push(beta);
                basis.push(w.clone());
            }
        }
        let _ = restart;
    }
    Err(NumericsError::NoConvergence {
        residual: best_residual,
        iterations: MAX_RESTARTS * MAX_LANCZOS_DIM,
    })
}

fn residual_norm(op: &dyn HermitianOp, theta: f64, v: &[Complex64]) -> f64 {
    let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * theta).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Ground eigenpair of the real symmetric tridiagonal (alphas, betas).
fn tridiag_ground(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let n = alphas.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = alphas[i];
        if i + 1 < n {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut idx = 0;
    for i in 1..n {
        if eig.eigenvalues[i] < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let c = dot(b, v);
        axpy(v, -c, b);
    }
}
