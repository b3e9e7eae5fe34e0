//! Time-ordered Schrödinger integration, i dpsi/dt = H(t) psi with hbar = 1.
//!
//! Adaptive Dormand-Prince 5(4) with PI step control. Norm renormalization is
//! deliberately off: norm drift is a step-size diagnostic, not something to
//! hide.

use num_complex::Complex64;

use super::{HermitianMatrix, HermitianOp, NumericsError, StateVector};

/// A (possibly time-dependent) Hermitian generator.
pub trait TimeDependentOp: Sync {
    fn dim(&self) -> usize;
    /// y = H(t) x, overwriting y.
    fn apply(&self, t: f64, x: &[Complex64], y: &mut [Complex64]);
}

/// Constant generator backed by a matrix.
pub struct ConstGenerator<'a>(pub &'a HermitianMatrix);

impl TimeDependentOp for ConstGenerator<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, _t: f64, x: &[Complex64], y: &mut [Complex64]) {
        HermitianOp::apply(self.0, x, y);
    }
}

/// Generator built from a closure returning the matrix at time t. Convenient
/// for small systems; larger models implement [`TimeDependentOp`] directly.
pub struct FnGenerator<F: Fn(f64) -> HermitianMatrix + Sync> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> HermitianMatrix + Sync> TimeDependentOp for FnGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, t: f64, x: &[Complex64], y: &mut [Complex64]) {
        HermitianOp::apply(&(self.f)(t), x, y);
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Propagate psi0 from t0 to t1 under H(t) with local error tolerance `tol`.
pub fn evolve(
    psi0: &StateVector,
    generator: &dyn TimeDependentOp,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<StateVector, NumericsError> {
    if tol <= 0.0 {
        return Err(NumericsError::BadTolerance(tol));
    }
    if generator.dim() != psi0.dim() {
        return Err(NumericsError::DimensionMismatch {
            expected: generator.dim(),
            got: psi0.dim(),
        });
    }
    if t1 == t0 {
        return Ok(psi0.clone());
    }
    let dim = psi0.dim();
    let mut y = psi0.amplitudes.clone();
    let mut t = t0;
    let span = t1 - t0;

    let rhs = |t: f64, x: &[Complex64], out: &mut [Complex64]| -> Result<(), NumericsError> {
        generator.apply(t, x, out);
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(NumericsError::NonFinite { context: "generator apply" });
        }
        let mi = Complex64::new(0.0, -1.0);
        for v in out.iter_mut() {
            *v *= mi;
        }
        Ok(())
    };

    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); dim]; 7];
    rhs(t, &y, &mut k[0])?;

    // initial step from the first derivative magnitude
    let d0 = norm(&y).max(1e-10);
    let d1 = norm(&k[0]).max(1e-10);
    let mut h = (0.01 * d0 / d1).min(span.abs()) * span.signum();
    let mut err_prev: f64 = 1.0;
    let mut ytmp = vec![Complex64::new(0.0, 0.0); dim];
    let mut y5 = vec![Complex64::new(0.0, 0.0); dim];
    let mut steps = 0usize;

    while (t1 - t) * span.signum() > 0.0 {
        if (t + h - t1) * span.signum() > 0.0 {
            h = t1 - t;
        }
        for s in 0..6 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * (h * A[s][j]);
                    }
                }
                ytmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            rhs(t + C[s] * h, &ytmp, &mut tail[0])?;
        }
        // FSAL: the s = 5 stage point is the 5th-order solution and
        // k[6] = f(t + h, y5) is already in place.
        for i in 0..dim {
            let mut acc = y[i];
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[5][j] != 0.0 {
                    acc += kj[i] * (h * A[5][j]);
                }
            }
            y5[i] = acc;
        }
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (h * E[j]);
                }
            }
            let sc = tol * (1.0 + y[i].norm().max(y5[i].norm()));
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / dim as f64).sqrt().max(1e-16);

        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y5);
            k.swap(0, 6);
            // PI controller
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        steps += 1;
        if steps > 50_000_000 {
            return Err(NumericsError::NoConvergence { residual: err, iterations: steps });
        }
    }
    Ok(StateVector::new(y))
}

/// Like [`evolve`] but returns the state at each requested sample time.
/// Sample times must be sorted and lie within [t0, t1].
pub fn evolve_sampled(
    psi0: &StateVector,
    generator: &dyn TimeDependentOp,
    t0: f64,
    sample_times: &[f64],
    tol: f64,
) -> Result<Vec<StateVector>, NumericsError> {
    let mut out = Vec::with_capacity(sample_times.len());
    let mut state = psi0.clone();
    let mut t = t0;
    for &ts in sample_times {
        state = evolve(&state, generator, t, ts, tol)?;
        t = ts;
        out.push(state.clone());
    }
    Ok(out)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rabi_h(omega: f64) -> HermitianMatrix {
        HermitianMatrix::dense(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(-omega / 2.0, 0.0), c(-omega / 2.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn rabi_pi_pulse() {
        let omega = 1.3;
        let h = rabi_h(omega);
        let psi = evolve(
            &StateVector::basis(2, 0),
            &ConstGenerator(&h),
            0.0,
            std::f64::consts::PI / omega,
            1e-12,
        )
        .unwrap();
        // full transfer, amplitude i up to sign convention of the coupling
        assert!(psi.amplitudes[0].norm() < 1e-8);
        assert!((psi.amplitudes[1] - c(0.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = HermitianMatrix::from_triplets(4, vec![]).unwrap();
        let psi0 = StateVector::new(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
        let psi = evolve(&psi0, &ConstGenerator(&h), 0.0, 7.0, 1e-10).unwrap();
        for (a, b) in psi.amplitudes.iter().zip(&psi0.amplitudes) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn diagonal_phase() {
        let e = 0.7;
        let t = 3.1;
        let h = HermitianMatrix::from_triplets(2, vec![(0, 0, c(e, 0.0)), (1, 1, c(e, 0.0))])
            .unwrap();
        let psi0 = StateVector::new(vec![
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 1.0 / 2f64.sqrt()),
        ]);
        let psi = evolve(&psi0, &ConstGenerator(&h), 0.0, t, 1e-12).unwrap();
        let phase = Complex64::from_polar(1.0, -e * t);
        for (a, b) in psi.amplitudes.iter().zip(&psi0.amplitudes) {
            assert!((a - b * phase).norm() < 1e-8);
        }
    }

    #[test]
    fn norm_preservation_and_linearity() {
        let h = rabi_h(2.0);
        let g = ConstGenerator(&h);
        let a = StateVector::basis(2, 0);
        let b = StateVector::basis(2, 1);
        let (ca, cb) = (c(0.6, 0.2), c(0.3, -0.7));
        let mut superpos = StateVector::new(vec![ca, cb]);
        superpos.normalize();
        let norm0 = superpos.norm();
        let fa = evolve(&a, &g, 0.0, 5.0, 1e-11).unwrap();
        let fb = evolve(&b, &g, 0.0, 5.0, 1e-11).unwrap();
        let fs = evolve(&superpos, &g, 0.0, 5.0, 1e-11).unwrap();
        assert!((fs.norm() - norm0).abs() < 1e-8);
        let scale = 1.0 / norm0_of(ca, cb);
        for i in 0..2 {
            let lin = (ca * fa.amplitudes[i] + cb * fb.amplitudes[i]) * scale;
            assert!((lin - fs.amplitudes[i]).norm() < 1e-7);
        }
    }

    fn norm0_of(a: Complex64, b: Complex64) -> f64 {
        (a.norm_sqr() + b.norm_sqr()).sqrt()
    }

    #[test]
    fn tolerance_halving_does_not_hurt() {
        let h = rabi_h(1.0);
        let g = ConstGenerator(&h);
        let psi0 = StateVector::basis(2, 0);
        let reference = evolve(&psi0, &g, 0.0, 20.0, 1e-13).unwrap();
        let mut prev_err = f64::INFINITY;
        for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
            let psi = evolve(&psi0, &g, 0.0, 20.0, tol).unwrap();
            let err: f64 = psi
                .amplitudes
                .iter()
                .zip(&reference.amplitudes)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= prev_err * 1.05, "err {err:.3e} prev {prev_err:.3e}");
            prev_err = err;
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let h = rabi_h(1.0);
        assert!(evolve(&StateVector::basis(2, 0), &ConstGenerator(&h), 0.0, 1.0, 0.0).is_err());
    }
}
