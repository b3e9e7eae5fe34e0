//! Closed-form single-atom lattice physics: optical potential, harmonic trap
//! frequency, effective spontaneous emission in a blue lattice, and the
//! Gaussian-overlap collisional energy shift. All formulas use hbar = 1.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("detuning must be nonzero")]
    ZeroDetuning,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("linewidth must be nonnegative, got {0}")]
    NegativeLinewidth(f64),
    #[error("spontaneous_rate_blue requires blue detuning (delta < 0); the red-detuned regime is unsupported")]
    RedDetuned,
    #[error("wells must share widths per axis: {0:?} vs {1:?}")]
    MismatchedWidths([f64; 3], [f64; 3]),
}

/// Single-atom lattice parameters: peak Rabi frequency, detuning, laser
/// wavenumber, atomic mass and excited-state linewidth.
#[derive(Debug, Clone, Copy)]
pub struct LatticeParams {
    pub rabi_peak: f64,
    pub detuning: f64,
    pub wavenumber: f64,
    pub mass: f64,
    pub linewidth: f64,
}

impl LatticeParams {
    pub fn new(
        rabi_peak: f64,
        detuning: f64,
        wavenumber: f64,
        mass: f64,
        linewidth: f64,
    ) -> Result<Self, LatticeError> {
        if detuning == 0.0 {
            return Err(LatticeError::ZeroDetuning);
        }
        for (name, value) in [
            ("rabi_peak", rabi_peak),
            ("wavenumber", wavenumber),
            ("mass", mass),
        ] {
            if !(value > 0.0) {
                return Err(LatticeError::NonPositive { name, value });
            }
        }
        if linewidth < 0.0 {
            return Err(LatticeError::NegativeLinewidth(linewidth));
        }
        Ok(Self { rabi_peak, detuning, wavenumber, mass, linewidth })
    }

    /// Ratio Omega0/|Delta|; the far-detuned treatment assumes this is small,
    /// reported rather than enforced.
    pub fn validity_ratio(&self) -> f64 {
        self.rabi_peak / self.detuning.abs()
    }

    /// Recoil energy E_R = k^2/2m, a diagnostic for E_R << |Delta|.
    pub fn recoil_energy(&self) -> f64 {
        self.wavenumber * self.wavenumber / (2.0 * self.mass)
    }
}

/// V0(x) = -Omega(x)^2 / 4 Delta with Omega(x) = Omega0 sin(kx).
/// Periodic with period a = lambda/2 = pi/k.
pub fn optical_potential(x: f64, p: &LatticeParams) -> f64 {
    let omega = p.rabi_peak * (p.wavenumber * x).sin();
    -omega * omega / (4.0 * p.detuning)
}

/// Harmonic frequency near a lattice minimum, omega_T = |Omega0 k| / sqrt(2 |Delta| m).
pub fn trap_frequency(p: &LatticeParams) -> f64 {
    (p.rabi_peak * p.wavenumber).abs() / (2.0 * p.detuning.abs() * p.mass).sqrt()
}

/// Effective spontaneous emission rate of a trapped atom in a blue lattice,
/// gamma_eff = (gamma / 4 |Delta|) omega_T. Only defined for Delta < 0.
pub fn spontaneous_rate_blue(p: &LatticeParams) -> Result<f64, LatticeError> {
    if p.detuning >= 0.0 {
        return Err(LatticeError::RedDetuned);
    }
    Ok(p.linewidth / (4.0 * p.detuning.abs()) * trap_frequency(p))
}

/// A 3D Gaussian ground-state wavepacket with a (1D, along x) center
/// trajectory.
#[derive(Clone)]
pub struct GaussianWell {
    pub widths: [f64; 3],
    center: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for GaussianWell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussianWell").field("widths", &self.widths).finish()
    }
}

impl GaussianWell {
    pub fn new(
        widths: [f64; 3],
        center: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, LatticeError> {
        for w in widths {
            if !(w > 0.0) {
                return Err(LatticeError::NonPositive { name: "width", value: w });
            }
        }
        Ok(Self { widths, center: Arc::new(center) })
    }

    pub fn fixed(widths: [f64; 3], x0: f64) -> Result<Self, LatticeError> {
        Self::new(widths, move |_| x0)
    }

    pub fn center_at(&self, t: f64) -> f64 {
        (self.center)(t)
    }

    /// Trap frequency implied by the ground-state width along x. Widths are
    /// rms position spreads, a0^2 = 1/(2 m omega) => omega = 1/(2 m a0^2).
    pub fn trap_frequency(&self, mass: f64) -> f64 {
        1.0 / (2.0 * mass * self.widths[0] * self.widths[0])
    }
}

/// Collision energy shift of two Gaussian wavepackets at time t:
///
/// dE(t) = (4 pi a_s / m) prod_nu (2 sqrt(pi) a_nu)^-1 exp(-d(t)^2 / 4 a_x^2),
///
/// the full 3D overlap of separable Gaussians displaced by d(t) along x.
pub fn interaction_shift(
    a_s: f64,
    well_a: &GaussianWell,
    well_b: &GaussianWell,
    t: f64,
    mass: f64,
) -> Result<f64, LatticeError> {
    if well_a.widths != well_b.widths {
        return Err(LatticeError::MismatchedWidths(well_a.widths, well_b.widths));
    }
    let d = well_a.center_at(t) - well_b.center_at(t);
    Ok(interaction_shift_at_displacement(a_s, &well_a.widths, d, mass))
}

/// Same as [`interaction_shift`] for an explicit displacement.
pub fn interaction_shift_at_displacement(
    a_s: f64,
    widths: &[f64; 3],
    d: f64,
    mass: f64,
) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let overlap_yz: f64 = widths.iter().map(|a0| 1.0 / (2.0 * sqrt_pi * a0)).product();
    4.0 * std::f64::consts::PI * a_s / mass
        * overlap_yz
        * (-d * d / (4.0 * widths[0] * widths[0])).exp()
}
