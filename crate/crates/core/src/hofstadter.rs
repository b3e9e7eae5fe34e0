//! Hofstadter butterfly: magnetic Bloch bands of a charged particle hopping
//! on a 2D square lattice pierced by a uniform flux of `alpha = p/q` quanta
//! per plaquette.
//!
//! In Landau gauge the magnetic unit cell spans `q` sites along x, and the
//! Bloch Hamiltonian at quasimomentum `(kx, ky)` reduces to the q×q Harper
//! matrix. Energies are reported in units of the hopping energy `eps0`; the
//! physical band is `-eps0` times the Harper eigenvalues so that the
//! zero-flux band attains its minimum at k = 0.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::gcd;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::HermitianMatrix;

#[derive(Debug, Error)]
pub enum HofstadterError {
    #[error("flux p/q = {p}/{q} is not in lowest terms (gcd {g}); reduce the fraction first")]
    NotReduced { p: u32, q: u32, g: u32 },
    #[error("denominator q must be at least 1")]
    ZeroDenominator,
    #[error("flux numerator p = {p} exceeds denominator q = {q}")]
    FluxOutOfRange { p: u32, q: u32 },
    #[error("k-grid resolution {0} is below the minimum of 4 points per axis")]
    ResolutionTooLow(usize),
}

/// Eigenvalues of one reduced flux over a k-grid, in units of `eps0`.
#[derive(Debug, Clone)]
pub struct FluxSpectrum {
    pub p: u32,
    pub q: u32,
    /// Sorted union of band energies over the grid, units of eps0.
    pub energies: Vec<f64>,
    /// Grid points per axis.
    pub k_resolution: usize,
}

impl FluxSpectrum {
    pub fn alpha(&self) -> f64 {
        f64::from(self.p) / f64::from(self.q)
    }

    /// Largest gap between consecutive sorted energies, with its midpoint.
    /// Returns `None` for fewer than two distinct values.
    pub fn largest_gap(&self) -> Option<(f64, f64)> {
        self.energies
            .windows(2)
            .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }
}

fn check_flux(p: u32, q: u32) -> Result<(), HofstadterError> {
    if q == 0 {
        return Err(HofstadterError::ZeroDenominator);
    }
    if p > q {
        return Err(HofstadterError::FluxOutOfRange { p, q });
    }
    let g = gcd(p.max(1), q);
    if p != 0 && g != 1 {
        return Err(HofstadterError::NotReduced { p, q, g });
    }
    Ok(())
}

/// The q×q Landau-gauge magnetic Bloch (Harper) matrix at flux α = p/q.
///
/// Diagonal entries are `2 cos(ky + 2π α m)` for `m = 0..q`, the
/// super/sub-diagonals are 1, and the corners carry `exp(∓i q kx)`.
/// Physical energies are `-eps0` times the eigenvalues of this matrix.
pub fn harper_matrix(
    p: u32,
    q: u32,
    kx: f64,
    ky: f64,
) -> Result<HermitianMatrix, HofstadterError> {
    check_flux(p, q)?;
    let n = q as usize;
    let alpha = f64::from(p) / f64::from(q);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = Complex64::new(2.0 * (ky + 2.0 * std::f64::consts::PI * alpha * j as f64).cos(), 0.0);
    }
    let corner = Complex64::from_polar(1.0, -(f64::from(q)) * kx);
    if n == 1 {
        // The two corner terms coincide with the sub/super diagonal.
        m[(0, 0)] += corner + corner.conj();
    } else if n == 2 {
        // Off-diagonal hop and the wrap-around term add on the same entry.
        m[(0, 1)] = Complex64::new(1.0, 0.0) + corner.conj();
        m[(1, 0)] = Complex64::new(1.0, 0.0) + corner;
    } else {
        for j in 0..n - 1 {
            m[(j, j + 1)] = Complex64::new(1.0, 0.0);
            m[(j + 1, j)] = Complex64::new(1.0, 0.0);
        }
        m[(0, n - 1)] = corner.conj();
        m[(n - 1, 0)] = corner;
    }
    Ok(HermitianMatrix::Dense(m))
}

/// Band energies (units of eps0, i.e. `-1 ×` Harper eigenvalues), sorted.
pub fn band_energies(p: u32, q: u32, kx: f64, ky: f64) -> Result<Vec<f64>, HofstadterError> {
    let h = harper_matrix(p, q, kx, ky)?;
    let (values, _) = crate::numerics::eigensolve(&h, q as usize)
        .expect("Harper matrix diagonalization cannot fail for valid flux");
    let mut e: Vec<f64> = values.iter().map(|x| -x).collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// Spectrum of one reduced flux over a uniform k-grid.
///
/// The grid covers the magnetic Brillouin zone: `kx ∈ [0, 2π/q)` and
/// `ky ∈ [0, 2π)`, each sampled at `k_resolution` points.
pub fn flux_spectrum(p: u32, q: u32, k_resolution: usize) -> Result<FluxSpectrum, HofstadterError> {
    check_flux(p, q)?;
    if k_resolution < 4 {
        return Err(HofstadterError::ResolutionTooLow(k_resolution));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut energies = Vec::with_capacity(k_resolution * k_resolution * q as usize);
    for ix in 0..k_resolution {
        let kx = tau / f64::from(q) * ix as f64 / k_resolution as f64;
        for iy in 0..k_resolution {
            let ky = tau * iy as f64 / k_resolution as f64;
            energies.extend(band_energies(p, q, kx, ky)?);
        }
    }
    energies.sort_by(f64::total_cmp);
    Ok(FluxSpectrum { p, q, energies, k_resolution })
}

/// All reduced fractions p/q with `q ≤ q_max` and `0 ≤ p ≤ q`.
pub fn reduced_fluxes(q_max: u32) -> Vec<(u32, u32)> {
    let mut fluxes = vec![(0u32, 1u32), (1, 1)];
    for q in 2..=q_max {
        for p in 1..q {
            if gcd(p, q) == 1 {
                fluxes.push((p, q));
            }
        }
    }
    fluxes.sort_by_key(|&(p, q)| (q, p));
    fluxes
}

/// All reduced fractions p/q with `q ≤ q_max` and `0 ≤ p ≤ q`, diagonalized
/// over a `k_resolution²` grid each. Rows are ordered by (q, p); fluxes are
/// computed in parallel.
pub fn butterfly(q_max: u32, k_resolution: usize) -> Result<Vec<FluxSpectrum>, HofstadterError> {
    if q_max < 1 {
        return Err(HofstadterError::ZeroDenominator);
    }
    if k_resolution < 4 {
        return Err(HofstadterError::ResolutionTooLow(k_resolution));
    }
    reduced_fluxes(q_max)
        .into_par_iter()
        .map(|(p, q)| flux_spectrum(p, q, k_resolution))
        .collect()
}

/// One scatter-plot row of the butterfly table.
#[derive(Debug, Clone, Copy)]
pub struct ButterflyRow {
    pub p: u32,
    pub q: u32,
    pub kx_index: usize,
    pub ky_index: usize,
    /// Energy in units of eps0.
    pub energy: f64,
}

/// Per-(flux, k-point, band) rows suitable for direct scatter-plotting,
/// ordered by (q, p, kx index, ky index, band). Fluxes run in parallel.
pub fn butterfly_rows(
    q_max: u32,
    k_resolution: usize,
) -> Result<Vec<ButterflyRow>, HofstadterError> {
    if q_max < 1 {
        return Err(HofstadterError::ZeroDenominator);
    }
    if k_resolution < 4 {
        return Err(HofstadterError::ResolutionTooLow(k_resolution));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let tables: Result<Vec<Vec<ButterflyRow>>, HofstadterError> = reduced_fluxes(q_max)
        .into_par_iter()
        .map(|(p, q)| {
            let mut rows = Vec::with_capacity(k_resolution * k_resolution * q as usize);
            for ix in 0..k_resolution {
                let kx = tau / f64::from(q) * ix as f64 / k_resolution as f64;
                for iy in 0..k_resolution {
                    let ky = tau * iy as f64 / k_resolution as f64;
                    for energy in band_energies(p, q, kx, ky)? {
                        rows.push(ButterflyRow { p, q, kx_index: ix, ky_index: iy, energy });
                    }
                }
            }
            Ok(rows)
        })
        .collect();
    Ok(tables?.into_iter().flatten().collect())
}
