//! Rydberg dipole gate on two three-level atoms {|0⟩, |1⟩, |r⟩}:
//!
//! H(t) = Σ_{j=1,2} [ δ_j(t) |r⟩⟨r|_j − (Ω_j(t)/2)(|1⟩⟨r| + |r⟩⟨1|)_j ]
//!        + u |rr⟩⟨rr|,
//!
//! integrated exactly on the 9-level product space. The laser couples the
//! logical |1⟩ to |r⟩, which reproduces the stated truth table (|00⟩
//! untouched, sign flips on the driven branches).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::numerics::ode::{evolve, evolve_sampled, TimeDependentOp};
use crate::numerics::{quadrature, StateVector};

use super::{wrap_phase, GateError, TruthTable};

const ODE_TOL: f64 = 1e-11;

/// Single-atom levels, in index order 0, 1, r.
const LEVEL_R: usize = 2;
/// Two-atom index of |rr⟩.
const RR: usize = 3 * LEVEL_R + LEVEL_R;

/// A piecewise time profile for a drive amplitude or detuning.
#[derive(Debug, Clone)]
pub enum Envelope {
    Const(f64),
    /// Segments (t_end, value): the envelope takes `value` up to `t_end`;
    /// zero after the last segment. Segment ends must be increasing.
    PiecewiseConst(Vec<(f64, f64)>),
    /// amplitude · sin²(π t / duration) on [0, duration], zero outside.
    SinSquared { amplitude: f64, duration: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Const(v) => *v,
            Envelope::PiecewiseConst(segments) => {
                if t < 0.0 {
                    return 0.0;
                }
                for &(t_end, v) in segments {
                    if t < t_end {
                        return v;
                    }
                }
                0.0
            }
            Envelope::SinSquared { amplitude, duration } => {
                if t < 0.0 || t > *duration {
                    0.0
                } else {
                    amplitude * (std::f64::consts::PI * t / duration).sin().powi(2)
                }
            }
        }
    }
}

/// Drive schedule for the two atoms plus the dipole-dipole energy `u`.
#[derive(Debug, Clone)]
pub struct PulseSchedule {
    pub omega1: Envelope,
    pub omega2: Envelope,
    pub delta1: Envelope,
    pub delta2: Envelope,
    pub u: f64,
    pub duration: f64,
}

struct RydbergOp<'a> {
    schedule: &'a PulseSchedule,
}

impl TimeDependentOp for RydbergOp<'_> {
    fn dim(&self) -> usize {
        9
    }

    fn apply(&self, t: f64, x: &[Complex64], y: &mut [Complex64]) {
        let s = self.schedule;
        let (o1, o2) = (s.omega1.value(t), s.omega2.value(t));
        let (d1, d2) = (s.delta1.value(t), s.delta2.value(t));
        for (i, out) in y.iter_mut().enumerate() {
            let (a, b) = (i / 3, i % 3);
            let mut diag = 0.0;
            if a == LEVEL_R {
                diag += d1;
            }
            if b == LEVEL_R {
                diag += d2;
            }
            if i == RR {
                diag += s.u;
            }
            let mut acc = Complex64::new(diag, 0.0) * x[i];
            // -(Ω1/2)(|1><r| + |r><1|) on atom 1
            if a == 1 {
                acc -= 0.5 * o1 * x[3 * LEVEL_R + b];
            } else if a == LEVEL_R {
                acc -= 0.5 * o1 * x[3 + b];
            }
            // same on atom 2
            if b == 1 {
                acc -= 0.5 * o2 * x[3 * a + LEVEL_R];
            } else if b == LEVEL_R {
                acc -= 0.5 * o2 * x[3 * a + 1];
            }
            *out = acc;
        }
    }
}

/// Outcome of driving one logical basis state through a schedule.
#[derive(Debug, Clone)]
pub struct RydbergOutcome {
    /// Final 9-level state.
    pub final_state: StateVector,
    /// arg of the amplitude left on the input state.
    pub phase: f64,
    /// |amplitude on the input state|².
    pub return_population: f64,
}

fn logical_index(input: (u8, u8)) -> usize {
    3 * input.0 as usize + input.1 as usize
}

/// Integrate the Schrödinger equation for one logical input (q1, q2),
/// each 0 or 1.
pub fn rydberg_evolve(
    schedule: &PulseSchedule,
    input: (u8, u8),
) -> Result<RydbergOutcome, GateError> {
    let idx = logical_index(input);
    let psi0 = StateVector::basis(9, idx);
    let op = RydbergOp { schedule };
    let mut psi = evolve(&psi0, &op, 0.0, schedule.duration, ODE_TOL)?;
    psi.normalize();
    let amp = psi.amplitudes[idx];
    Ok(RydbergOutcome {
        phase: amp.arg(),
        return_population: amp.norm_sqr(),
        final_state: psi,
    })
}

/// Largest population of the doubly excited |rr⟩ state along the evolution,
/// sampled on a uniform grid.
pub fn max_rr_population(
    schedule: &PulseSchedule,
    input: (u8, u8),
    samples: usize,
) -> Result<f64, GateError> {
    let idx = logical_index(input);
    let psi0 = StateVector::basis(9, idx);
    let op = RydbergOp { schedule };
    let times: Vec<f64> = (1..=samples.max(1))
        .map(|i| schedule.duration * i as f64 / samples.max(1) as f64)
        .collect();
    let states = evolve_sampled(&psi0, &op, 0.0, &times, ODE_TOL)?;
    Ok(states
        .iter()
        .map(|s| s.amplitudes[RR].norm_sqr() / s.norm().powi(2))
        .fold(0.0, f64::max))
}

/// Post-hoc spontaneous-loss estimate γ · (integrated population in |r⟩),
/// summed over both atoms and sampled on a uniform grid. The dynamics itself
/// stays lossless; this only quantifies the γΔt ≪ 1 validity condition.
pub fn loss_estimate(
    schedule: &PulseSchedule,
    input: (u8, u8),
    gamma: f64,
    samples: usize,
) -> Result<f64, GateError> {
    let idx = logical_index(input);
    let psi0 = StateVector::basis(9, idx);
    let op = RydbergOp { schedule };
    let n = samples.max(2);
    let times: Vec<f64> = (1..=n).map(|i| schedule.duration * i as f64 / n as f64).collect();
    let states = evolve_sampled(&psi0, &op, 0.0, &times, 1e-8)?;
    let rydberg_pop = |s: &StateVector| -> f64 {
        let mut p = 0.0;
        for i in 0..9 {
            let (a, b) = (i / 3, i % 3);
            let w = (a == LEVEL_R) as u8 + (b == LEVEL_R) as u8;
            p += f64::from(w) * s.amplitudes[i].norm_sqr();
        }
        p / s.norm().powi(2)
    };
    let dt = schedule.duration / n as f64;
    let mut integral = 0.5 * rydberg_pop(&psi0) * dt;
    for (k, s) in states.iter().enumerate() {
        let w = if k + 1 == n { 0.5 } else { 1.0 };
        integral += w * rydberg_pop(s) * dt;
    }
    Ok(gamma * integral)
}

/// Blockade (Ω ≪ u) pulse train: resonant π pulse on atom 1, 2π pulse on
/// atom 2, π pulse on atom 1.
pub fn blockade_schedule(omega: f64, u: f64) -> Result<PulseSchedule, GateError> {
    if !(omega > 0.0) {
        return Err(GateError::NonPositive { name: "omega", value: omega });
    }
    let t_pi = std::f64::consts::PI / omega;
    let t1 = t_pi;
    let t2 = t1 + 2.0 * t_pi;
    let t3 = t2 + t_pi;
    Ok(PulseSchedule {
        omega1: Envelope::PiecewiseConst(vec![(t1, omega), (t2, 0.0), (t3, omega)]),
        omega2: Envelope::PiecewiseConst(vec![(t1, 0.0), (t2, omega), (t3, 0.0)]),
        delta1: Envelope::Const(0.0),
        delta2: Envelope::Const(0.0),
        u,
        duration: t3,
    })
}

/// Fast (Ω ≫ u) scheme: simultaneous resonant π pulses on both atoms, a free
/// hold of τ = φ/u during which |rr⟩ accumulates the gate phase, and π
/// pulses back.
pub fn fast_schedule(omega: f64, u: f64, phi: f64) -> Result<PulseSchedule, GateError> {
    if !(omega > 0.0) {
        return Err(GateError::NonPositive { name: "omega", value: omega });
    }
    if !(phi > 0.0) {
        return Err(GateError::NonPositive { name: "phi", value: phi });
    }
    let t_pi = std::f64::consts::PI / omega;
    let hold = if u == 0.0 { phi } else { (phi / u).abs() };
    let t1 = t_pi;
    let t2 = t1 + hold;
    let t3 = t2 + t_pi;
    let drive = Envelope::PiecewiseConst(vec![(t1, omega), (t2, 0.0), (t3, omega)]);
    Ok(PulseSchedule {
        omega1: drive.clone(),
        omega2: drive,
        delta1: Envelope::Const(0.0),
        delta2: Envelope::Const(0.0),
        u,
        duration: t3,
    })
}

/// Adiabatic scheme: identical smooth sin² pulses on both atoms at constant
/// detuning δ; the dressed levels accumulate the gate phase.
pub fn adiabatic_schedule(
    omega_peak: f64,
    delta: f64,
    u: f64,
    duration: f64,
) -> Result<PulseSchedule, GateError> {
    if !(omega_peak > 0.0) {
        return Err(GateError::NonPositive { name: "omega_peak", value: omega_peak });
    }
    if !(duration > 0.0) {
        return Err(GateError::NonPositive { name: "duration", value: duration });
    }
    let pulse = Envelope::SinSquared { amplitude: omega_peak, duration };
    Ok(PulseSchedule {
        omega1: pulse.clone(),
        omega2: pulse,
        delta1: Envelope::Const(delta),
        delta2: Envelope::Const(delta),
        u,
        duration,
    })
}

/// Drive all four logical inputs through the schedule and assemble the
/// diagonal truth table. Inputs run in parallel.
pub fn rydberg_truth_table(schedule: &PulseSchedule) -> Result<TruthTable, GateError> {
    let inputs = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)];
    let outcomes: Result<Vec<RydbergOutcome>, GateError> = inputs
        .par_iter()
        .map(|&input| rydberg_evolve(schedule, input))
        .collect();
    let outcomes = outcomes?;
    let mut phases = [0.0; 4];
    let mut populations = [0.0; 4];
    for (k, o) in outcomes.iter().enumerate() {
        phases[k] = o.phase;
        populations[k] = o.return_population;
    }
    Ok(TruthTable { phases, populations })
}

/// The analytic adiabatic gate phase
///
/// φ(τ) = ∫ dt [ sgn(δ̃)(|δ̃| − √(δ̃² + 2Ω²))/2 − sgn(δ)(|δ| − √(δ² + Ω²)) ],
///
/// with δ̃ = δ − Ω²/(4δ + 2u) the Stark-shifted two-atom detuning. The
/// integrand compares the dressed two-atom level against twice the dressed
/// single-atom level, so −φ(τ) is the entangling phase the full dynamics
/// accumulates in the adiabatic limit.
pub fn adiabatic_gate_phase(
    omega: &Envelope,
    delta: &Envelope,
    u: f64,
    t0: f64,
    t1: f64,
) -> Result<f64, GateError> {
    // Guard against the δ = 0 and 4δ + 2u = 0 singularities along the path.
    let scan = 4096;
    let mut omega_peak = 0.0f64;
    for i in 0..=scan {
        let t = t0 + (t1 - t0) * i as f64 / scan as f64;
        let d = delta.value(t);
        let o = omega.value(t);
        if !d.is_finite() || !o.is_finite() {
            return Err(GateError::NonFiniteEnvelope(t));
        }
        omega_peak = omega_peak.max(o.abs());
        if o != 0.0 {
            if d == 0.0 {
                return Err(GateError::Singularity { t, reason: "detuning crosses zero" });
            }
            if (4.0 * d + 2.0 * u).abs() < 1e-12 * (d.abs() + u.abs()).max(1.0) {
                return Err(GateError::Singularity {
                    t,
                    reason: "Stark denominator 4*delta + 2*u vanishes",
                });
            }
        }
    }
    let integrand = |t: f64| {
        let o = omega.value(t);
        if o == 0.0 {
            return 0.0;
        }
        let d = delta.value(t);
        let dt = d - o * o / (4.0 * d + 2.0 * u);
        let two_atom = dt.signum() * (dt.abs() - (dt * dt + 2.0 * o * o).sqrt()) / 2.0;
        let one_atom = d.signum() * (d.abs() - (d * d + o * o).sqrt());
        two_atom - one_atom
    };
    let scale = (omega_peak * omega_peak).max(1e-12) * (t1 - t0).abs();
    Ok(quadrature(integrand, t0, t1, 1e-10 * scale.max(1.0))?)
}
