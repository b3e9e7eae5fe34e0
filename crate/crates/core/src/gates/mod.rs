//! Two-qubit gate protocols for trapped neutral atoms: the adiabatic
//! collisional phase gate (interaction-shift integral along a trap
//! trajectory) and the Rydberg dipole gate in its fast, blockade, and
//! chirped-adiabatic variants.

pub mod collisional;
pub mod rydberg;

pub use collisional::{
    collisional_phase, collisional_truth_table, solve_hold_time, GatePhaseReport, Trajectory,
};
pub use rydberg::{
    adiabatic_gate_phase, adiabatic_schedule, blockade_schedule, fast_schedule, max_rr_population,
    rydberg_evolve, rydberg_truth_table, Envelope, PulseSchedule, RydbergOutcome,
};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("trajectory endpoints leave a Gaussian overlap of {0:.3e} (> 1e-12); \
             the atoms are not separated initially")]
    EndpointOverlap(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("well widths differ between the two atoms: {0:?} vs {1:?}")]
    MismatchedWidths([f64; 3], [f64; 3]),
    #[error("phase target {target} is unreachable: interaction shift at the hold point is {shift:.3e}")]
    UnreachableTarget { target: f64, shift: f64 },
    #[error("adiabatic phase integrand is singular near t = {t}: {reason}")]
    Singularity { t: f64, reason: &'static str },
    #[error("envelope produced a non-finite value at t = {0}")]
    NonFiniteEnvelope(f64),
    #[error("numerics failure: {0}")]
    Numerics(#[from] NumericsError),
    #[error("lattice model error: {0}")]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Diagonal-gate truth table over the logical basis {00, 01, 10, 11}.
#[derive(Debug, Clone, Copy)]
pub struct TruthTable {
    /// Acquired phases in basis order [00, 01, 10, 11], radians.
    pub phases: [f64; 4],
    /// Return populations on the respective input states.
    pub populations: [f64; 4],
}

impl TruthTable {
    /// Worst-case population lost from the logical input.
    pub fn leakage(&self) -> f64 {
        1.0 - self.populations.iter().fold(f64::MAX, |m, &p| m.min(p))
    }

    /// The basis-gauge-invariant entangling phase
    /// φ_ent = φ11 − φ10 − φ01 + φ00, wrapped to (−π, π].
    ///
    /// Adding arbitrary single-atom phase offsets (a per-atom z rotation)
    /// shifts the four phases as φ_jk → φ_jk + j·a + k·b and cancels here.
    pub fn entangling_phase(&self) -> f64 {
        wrap_phase(self.phases[3] - self.phases[2] - self.phases[1] + self.phases[0])
    }
}

/// Wrap an angle to (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut x = phi % tau;
    if x <= -std::f64::consts::PI {
        x += tau;
    } else if x > std::f64::consts::PI {
        x -= tau;
    }
    x
}
