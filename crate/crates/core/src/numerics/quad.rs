//! Adaptive Simpson quadrature.

use super::NumericsError;

/// Integrate `f` over [a, b] to absolute tolerance `tol`.
pub fn quadrature<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    if tol <= 0.0 {
        return Err(NumericsError::BadTolerance(tol));
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if !v.is_finite() {
            return Err(NumericsError::NonFinite { context: "quadrature integrand" });
        }
        Ok(v)
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&eval, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> Result<f64, NumericsError>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, NumericsError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}
