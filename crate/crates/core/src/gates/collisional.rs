//! Adiabatic collisional phase gate: two atoms in state-dependent Gaussian
//! wells are brought together, held, and separated again; the |01⟩ branch
//! picks up the collisional phase φ^{ab} = ∫ dt ΔE(t) from the mean-field
//! interaction shift of the overlapping wavepackets.

use crate::lattice::{interaction_shift_at_displacement, GaussianWell};
use crate::numerics::quadrature;

use super::{GateError, TruthTable};

/// Gaussian overlap factor below which the atoms count as fully separated.
const SEPARATION_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-12;

/// Smooth approach–hold–return displacement profile.
///
/// Over t ∈ [−τ, τ] with τ = approach_time + hold_time/2, the displacement
/// starts at `d_start`, descends to `d_hold` along a raised cosine during
/// the approach, stays at `d_hold` for the hold window, and retraces the
/// approach in mirror image, so d(−τ) = d(τ) = d_start.
#[derive(Debug, Clone, Copy)]
pub struct Trajectory {
    pub d_start: f64,
    pub d_hold: f64,
    pub approach_time: f64,
    pub hold_time: f64,
}

impl Trajectory {
    pub fn new(
        d_start: f64,
        d_hold: f64,
        approach_time: f64,
        hold_time: f64,
    ) -> Result<Self, GateError> {
        for (name, value) in [
            ("d_start", d_start),
            ("approach_time", approach_time),
        ] {
            if !(value > 0.0) {
                return Err(GateError::NonPositive { name, value });
            }
        }
        if !(d_hold >= 0.0) {
            return Err(GateError::NonPositive { name: "d_hold", value: d_hold });
        }
        if !(hold_time >= 0.0) {
            return Err(GateError::NonPositive { name: "hold_time", value: hold_time });
        }
        Ok(Self { d_start, d_hold, approach_time, hold_time })
    }

    /// Half duration τ; the trajectory spans [−τ, τ].
    pub fn half_duration(&self) -> f64 {
        self.approach_time + self.hold_time / 2.0
    }

    /// Displacement between the two trap centers at time t.
    pub fn displacement(&self, t: f64) -> f64 {
        let half_hold = self.hold_time / 2.0;
        let at = t.abs();
        if at <= half_hold {
            return self.d_hold;
        }
        let s = ((at - half_hold) / self.approach_time).min(1.0);
        // Raised cosine from d_hold (s = 0) back up to d_start (s = 1).
        self.d_hold + (self.d_start - self.d_hold) * 0.5 * (1.0 - (std::f64::consts::PI * s).cos())
    }
}

/// The shipped default: a gentle approach from 12 widths out to one width,
/// held for `hold_time`.
pub fn default_trajectory(width_x: f64, hold_time: f64) -> Result<Trajectory, GateError> {
    Trajectory::new(12.0 * width_x, 1.0 * width_x, 400.0, hold_time)
}

/// Phase budget of one collisional gate run.
#[derive(Debug, Clone, Copy)]
pub struct GatePhaseReport {
    /// Total acquired phase φ = φ^a + φ^b + φ^{ab}.
    pub total: f64,
    /// Single-particle kinematic phases; zero under the adiabatic
    /// convention used here (they cancel in the entangling phase anyway).
    pub phi_a: f64,
    pub phi_b: f64,
    /// Collisional phase ∫ dt ΔE(t).
    pub phi_ab: f64,
    /// max |ΔE(t)| / ω_T; must stay ≪ 1 for the frozen-motional-state
    /// picture to hold.
    pub adiabaticity_ratio: f64,
}

fn check_widths(well_a: &GaussianWell, well_b: &GaussianWell) -> Result<[f64; 3], GateError> {
    if well_a.widths != well_b.widths {
        return Err(GateError::MismatchedWidths(well_a.widths, well_b.widths));
    }
    Ok(well_a.widths)
}

/// Collisional phase accumulated along `traj` for two atoms of mass `m` and
/// s-wave scattering length `a_s` in identical Gaussian wells.
pub fn collisional_phase(
    traj: &Trajectory,
    well_a: &GaussianWell,
    well_b: &GaussianWell,
    a_s: f64,
    mass: f64,
) -> Result<GatePhaseReport, GateError> {
    let widths = check_widths(well_a, well_b)?;
    let ax = widths[0];
    let tau = traj.half_duration();
    let endpoint_overlap = (-traj.displacement(tau).powi(2) / (4.0 * ax * ax)).exp();
    if endpoint_overlap > SEPARATION_TOL {
        return Err(GateError::EndpointOverlap(endpoint_overlap));
    }

    let shift = |t: f64| interaction_shift_at_displacement(a_s, &widths, traj.displacement(t), mass);
    let shift_hold = interaction_shift_at_displacement(a_s, &widths, traj.d_hold, mass);

    // Integrate the two smooth approach/return flanks by quadrature; the
    // hold window contributes exactly ΔE(d_hold) · hold_time.
    let half_hold = traj.hold_time / 2.0;
    let scale = shift_hold.abs().max(1e-300);
    let flank = quadrature(shift, half_hold, tau, QUAD_TOL * scale * traj.approach_time)?;
    let phi_ab = 2.0 * flank + shift_hold * traj.hold_time;

    // |ΔE| is maximal at the smallest displacement, reached during the hold
    // (or at t = 0 for hold_time = 0).
    let omega_t = well_a.trap_frequency(mass);
    let adiabaticity_ratio = shift(0.0).abs() / omega_t;

    Ok(GatePhaseReport {
        total: phi_ab,
        phi_a: 0.0,
        phi_b: 0.0,
        phi_ab,
        adiabaticity_ratio,
    })
}

/// Hold time that makes `collisional_phase` hit `target` for the given
/// trajectory template (its hold_time field is ignored). The phase is linear
/// in the hold time with slope ΔE(d_hold), so this is a direct inversion.
pub fn solve_hold_time(
    template: &Trajectory,
    well_a: &GaussianWell,
    well_b: &GaussianWell,
    a_s: f64,
    mass: f64,
    target: f64,
) -> Result<f64, GateError> {
    if !(target > 0.0) {
        return Err(GateError::NonPositive { name: "target", value: target });
    }
    let widths = check_widths(well_a, well_b)?;
    let shift_hold = interaction_shift_at_displacement(a_s, &widths, template.d_hold, mass);
    if !(shift_hold > 0.0) {
        return Err(GateError::UnreachableTarget { target, shift: shift_hold });
    }
    let moves = Trajectory { hold_time: 0.0, ..*template };
    let phi_moves = collisional_phase(&moves, well_a, well_b, a_s, mass)?.phi_ab;
    if phi_moves > target {
        return Err(GateError::UnreachableTarget { target, shift: shift_hold });
    }
    Ok((target - phi_moves) / shift_hold)
}

/// Idealized adiabatic-limit truth table: only the |01⟩ branch (both atoms
/// transported into the same well) collides and picks up φ_ab.
pub fn collisional_truth_table(phi_ab: f64) -> TruthTable {
    TruthTable { phases: [0.0, phi_ab, 0.0, 0.0], populations: [1.0; 4] }
}
