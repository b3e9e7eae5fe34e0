//! Bose-Hubbard exact diagonalization on small lattices, with the
//! superfluid/Mott-insulator diagnostics: single-particle correlations,
//! on-site number fluctuations, excitation gap and the quasimomentum
//! interference pattern.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::fock::{FockBasis, FockError};
use crate::numerics::{eigensolve, HermitianMatrix, NumericsError, StateVector};

/// Ground-state degeneracy flag threshold on E1 - E0.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum BoseHubbardError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("edge ({0}, {1}) is invalid for {2} sites")]
    BadEdge(usize, usize, usize),
    #[error("model has {model} sites but basis has {basis}")]
    SiteMismatch { model: usize, basis: usize },
    #[error("hopping J must be nonnegative, got {0}")]
    NegativeHopping(f64),
    #[error("correlation matrix is not Hermitian (violation {0:.3e})")]
    NonHermitianCorrelations(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Bose-Hubbard parameters on an explicit site graph.
#[derive(Debug, Clone)]
pub struct BHModel {
    pub hopping: f64,
    pub interaction: f64,
    pub chemical_potential: f64,
    pub sites: usize,
    /// undirected nearest-neighbour edges, each stored once
    pub edges: Vec<(usize, usize)>,
    pub boundary: Boundary,
    pub dimensionality: usize,
}

impl BHModel {
    pub fn new(
        hopping: f64,
        interaction: f64,
        chemical_potential: f64,
        sites: usize,
        edges: Vec<(usize, usize)>,
        boundary: Boundary,
        dimensionality: usize,
    ) -> Result<Self, BoseHubbardError> {
        if hopping < 0.0 {
            return Err(BoseHubbardError::NegativeHopping(hopping));
        }
        for &(a, b) in &edges {
            if a == b || a >= sites || b >= sites {
                return Err(BoseHubbardError::BadEdge(a, b, sites));
            }
        }
        Ok(Self {
            hopping,
            interaction,
            chemical_potential,
            sites,
            edges,
            boundary,
            dimensionality,
        })
    }

    /// 1D chain, periodic (ring) or open.
    pub fn chain(
        sites: usize,
        hopping: f64,
        interaction: f64,
        chemical_potential: f64,
        boundary: Boundary,
    ) -> Result<Self, BoseHubbardError> {
        let mut edges: Vec<(usize, usize)> = (0..sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if boundary == Boundary::Periodic && sites > 2 {
            edges.push((sites - 1, 0));
        }
        if boundary == Boundary::Periodic && sites == 2 {
            // a two-site ring coincides with the open pair; do not double the bond
        }
        Self::new(hopping, interaction, chemical_potential, sites, edges, boundary, 1)
    }

    /// Coordination number z = 2d.
    pub fn coordination(&self) -> usize {
        2 * self.dimensionality
    }
}

/// Single-particle correlations rho_{l,m} = <a_l^dag a_m>.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn sites(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.sites()).map(|i| self.entries[(i, i)].re).sum()
    }

    fn hermiticity_violation(&self) -> f64 {
        let m = &self.entries;
        let mut v = 0.0f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                v = v.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        v
    }
}

/// Ground-state diagnostics for one (model, basis) pair.
#[derive(Debug, Clone)]
pub struct GroundObservables {
    pub energy: f64,
    pub correlations: CorrelationMatrix,
    /// on-site number fluctuations (Delta n_l)^2 per site
    pub fluctuations: Vec<f64>,
    /// E1 - E0
    pub gap: f64,
    pub degenerate: bool,
    pub ground_state: StateVector,
}

/// Assemble the sparse Hamiltonian
/// H = -J sum_<l,m> (a_l^dag a_m + h.c.) + sum_l [U/2 n_l(n_l-1) - mu n_l].
pub fn build_hamiltonian(
    model: &BHModel,
    basis: &FockBasis,
) -> Result<HermitianMatrix, BoseHubbardError> {
    if model.sites != basis.sites {
        return Err(BoseHubbardError::SiteMismatch { model: model.sites, basis: basis.sites });
    }
    let dim = basis.len();
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    for (row, s) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for &n in &s.occupations {
            let n = n as f64;
            diag += 0.5 * model.interaction * n * (n - 1.0) - model.chemical_potential * n;
        }
        if diag != 0.0 {
            triplets.push((row, row, Complex64::new(diag, 0.0)));
        }
        if model.hopping != 0.0 {
            for &(l, m) in &model.edges {
                for (dst, src) in [(l, m), (m, l)] {
                    if let Some((t, amp)) = basis.apply_hop(s, dst, src)? {
                        let col = basis.rank(&t).expect("hop stays in fixed-N basis");
                        // H[col, row] element of a_dst^dag a_src acting on |row>
                        triplets.push((col, row, Complex64::new(-model.hopping * amp, 0.0)));
                    }
                }
            }
        }
    }
    Ok(HermitianMatrix::from_triplets(dim, triplets)?)
}

/// Diagonalize and compute ground-state observables.
pub fn ground_observables(
    model: &BHModel,
    basis: &FockBasis,
) -> Result<GroundObservables, BoseHubbardError> {
    let h = build_hamiltonian(model, basis)?;
    let k = 2.min(basis.len());
    let (vals, vecs) = eigensolve(&h, k)?;
    let ground = &vecs[0];
    let gap = if k == 2 { vals[1] - vals[0] } else { f64::NAN };

    let m = model.sites;
    let mut rho = DMatrix::<Complex64>::zeros(m, m);
    let mut n_avg = vec![0.0f64; m];
    let mut n2_avg = vec![0.0f64; m];
    for (row, s) in basis.states().iter().enumerate() {
        let w = ground.amplitudes[row].norm_sqr();
        for l in 0..m {
            let n = s.occupations[l] as f64;
            rho[(l, l)] += Complex64::new(w * n, 0.0);
            n_avg[l] += w * n;
            n2_avg[l] += w * n * n;
        }
        for l in 0..m {
            for mm in 0..m {
                if l == mm {
                    continue;
                }
                if let Some((t, amp)) = basis.apply_hop(s, l, mm)? {
                    let col = basis.rank(&t).expect("hop stays in basis");
                    rho[(l, mm)] +=
                        ground.amplitudes[col].conj() * amp * ground.amplitudes[row];
                }
            }
        }
    }
    let fluctuations = n_avg
        .iter()
        .zip(&n2_avg)
        .map(|(n, n2)| n2 - n * n)
        .collect();
    Ok(GroundObservables {
        energy: vals[0],
        correlations: CorrelationMatrix { entries: rho },
        fluctuations,
        gap,
        degenerate: gap.abs() < DEGENERACY_TOL,
        ground_state: vecs.into_iter().next().unwrap(),
    })
}

/// On-site interaction energy (U/2)<n_l (n_l - 1)> at one site.
///
/// In the U = 0 ground state this equals U N(N-1)/2M^2 per site; the full
/// interaction expectation is M times larger on a translation-invariant
/// graph.
pub fn site_interaction_energy(
    basis: &FockBasis,
    state: &StateVector,
    interaction: f64,
    site: usize,
) -> Result<f64, BoseHubbardError> {
    if site >= basis.sites {
        return Err(BoseHubbardError::Fock(FockError::InvalidSite {
            site,
            sites: basis.sites,
        }));
    }
    if state.dim() != basis.len() {
        return Err(BoseHubbardError::Numerics(NumericsError::DimensionMismatch {
            expected: basis.len(),
            got: state.dim(),
        }));
    }
    let mut acc = 0.0;
    for (i, fock) in basis.states().iter().enumerate() {
        let n = f64::from(fock.occupations[site]);
        acc += state.amplitudes[i].norm_sqr() * 0.5 * interaction * n * (n - 1.0);
    }
    Ok(acc)
}

/// Quasimomentum distribution S(k) = (1/M) sum_{l,m} e^{ik(l-m)} rho_{l,m}
/// on the M-point grid k_j = -pi + 2 pi j / M (lattice constant 1).
pub fn quasimomentum_distribution(
    rho: &CorrelationMatrix,
) -> Result<Vec<(f64, f64)>, BoseHubbardError> {
    let v = rho.hermiticity_violation();
    if v > 1e-9 {
        return Err(BoseHubbardError::NonHermitianCorrelations(v));
    }
    let m = rho.sites();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let k = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for l in 0..m {
            for mm in 0..m {
                s += Complex64::from_polar(1.0, k * (l as f64 - mm as f64))
                    * rho.entries[(l, mm)];
            }
        }
        out.push((k, s.re / m as f64));
    }
    Ok(out)
}

/// One row of a SF-MI crossover scan.
#[derive(Debug, Clone)]
pub struct CrossoverRow {
    pub u_over_j: f64,
    pub energy: f64,
    pub gap: f64,
    pub s0_over_n: f64,
    pub fluctuation_site0: f64,
    pub degenerate: bool,
}

/// Scan U/J at fixed J = template.hopping, computing the interference peak
/// height, fluctuations and gap per grid point. Grid points run in parallel;
/// output order follows the input grid.
pub fn crossover_scan(
    template: &BHModel,
    u_over_j: &[f64],
    basis: &FockBasis,
) -> Result<Vec<CrossoverRow>, BoseHubbardError> {
    let n = basis.particles as f64;
    u_over_j
        .par_iter()
        .map(|&r| {
            let mut model = template.clone();
            model.interaction = r * model.hopping;
            let obs = ground_observables(&model, basis)?;
            let sk = quasimomentum_distribution(&obs.correlations)?;
            // k = 0 sits at index M/2 of the grid; look it up by value
            let s0 = sk
                .iter()
                .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
                .map(|&(_, s)| s)
                .unwrap_or(f64::NAN);
            Ok(CrossoverRow {
                u_over_j: r,
                energy: obs.energy,
                gap: obs.gap,
                s0_over_n: s0 / n,
                fluctuation_site0: obs.fluctuations[0],
                degenerate: obs.degenerate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;

    fn ring(m: usize, j: f64, u: f64) -> BHModel {
        BHModel::chain(m, j, u, 0.0, Boundary::Periodic).unwrap()
    }

    #[test]
    fn two_site_free_spectrum() {
        // M = N = 2, single edge, U = 0: eigenvalues (-2J, 0, 2J)
        let j = 0.7;
        let model = BHModel::chain(2, j, 0.0, 0.0, Boundary::Open).unwrap();
        let basis = build_basis(2, 2, 100).unwrap();
        let h = build_hamiltonian(&model, &basis).unwrap();
        let (vals, _) = eigensolve(&h, 3).unwrap();
        assert!((vals[0] + 2.0 * j).abs() < 1e-12);
        assert!(vals[1].abs() < 1e-12);
        assert!((vals[2] - 2.0 * j).abs() < 1e-12);
    }

    #[test]
    fn atomic_limit_spectrum() {
        // J = 0, U = 1: diagonal spectrum (0, 1, 1)
        let model = BHModel::chain(2, 0.0, 1.0, 0.0, Boundary::Open).unwrap();
        let basis = build_basis(2, 2, 100).unwrap();
        let h = build_hamiltonian(&model, &basis).unwrap();
        let (vals, _) = eigensolve(&h, 3).unwrap();
        assert!(vals[0].abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] - 1.0).abs() < 1e-14);
        // MI ground energy is zero: no interaction energy at unit filling
        let obs = ground_observables(&model, &basis).unwrap();
        assert!(obs.energy.abs() < 1e-14);
    }

    #[test]
    fn sf_limit_correlations_and_fluctuations() {
        let m = 5;
        let n = 3u32;
        let model = ring(m, 1.0, 0.0);
        let basis = build_basis(m, n, 100_000).unwrap();
        let obs = ground_observables(&model, &basis).unwrap();
        let expect = n as f64 / m as f64;
        for l in 0..m {
            for mm in 0..m {
                assert!(
                    (obs.correlations.entries[(l, mm)].norm() - expect).abs() < 1e-9,
                    "rho({l},{mm})"
                );
            }
            assert!((obs.fluctuations[l] - expect * (1.0 - 0.0)).abs() < 0.2);
        }
        assert!((obs.correlations.trace() - n as f64).abs() < 1e-10);
    }

    #[test]
    fn mi_limit_exact() {
        let m = 4;
        let u = 2.5;
        let model = BHModel::chain(m, 0.0, u, 0.0, Boundary::Periodic).unwrap();
        let basis = build_basis(m, m as u32, 100_000).unwrap();
        let obs = ground_observables(&model, &basis).unwrap();
        for l in 0..m {
            for mm in 0..m {
                if l != mm {
                    assert!(obs.correlations.entries[(l, mm)].norm() < 1e-14);
                }
            }
            assert!(obs.fluctuations[l].abs() < 1e-14);
        }
        assert!((obs.gap - u).abs() < 1e-12);
    }

    #[test]
    fn sf_gap_matches_tight_binding_oracle() {
        // U = 0 ring: gap = 2J(1 - cos 2 pi / M), single-particle oracle
        for m in [4usize, 6, 8] {
            let model = ring(m, 1.0, 0.0);
            let basis = build_basis(m, 1, 100_000).unwrap();
            let obs = ground_observables(&model, &basis).unwrap();
            let oracle = 2.0 * (1.0 - (2.0 * std::f64::consts::PI / m as f64).cos());
            assert!((obs.gap - oracle).abs() < 1e-9, "M={m}: {} vs {oracle}", obs.gap);
        }
    }

    #[test]
    fn sk_limits_and_sum_rule() {
        let m = 6;
        let n = 6.0;
        // SF limit: rho_{l,m} = N/M everywhere
        let sf = CorrelationMatrix {
            entries: DMatrix::from_element(m, m, Complex64::new(n / m as f64, 0.0)),
        };
        let sk = quasimomentum_distribution(&sf).unwrap();
        // geometric-sum oracle: S(k) = |sum_l e^{ikl}|^2 N / M^2
        for &(k, s) in &sk {
            let geom: Complex64 = (0..m)
                .map(|l| Complex64::from_polar(1.0, k * l as f64))
                .sum();
            let oracle = geom.norm_sqr() * n / (m * m) as f64;
            assert!((s - oracle).abs() < 1e-10);
        }
        let peak = sk.iter().find(|(k, _)| k.abs() < 1e-12).unwrap().1;
        assert!((peak - n).abs() < 1e-10);
        assert!(
            sk.iter().filter(|(k, _)| k.abs() > 1e-12).all(|(_, s)| s.abs() < 1e-10)
        );
        // MI limit: diagonal rho -> flat S(k) = N/M
        let mi = CorrelationMatrix {
            entries: DMatrix::from_diagonal_element(m, m, Complex64::new(1.0, 0.0)),
        };
        let sk = quasimomentum_distribution(&mi).unwrap();
        for &(_, s) in &sk {
            assert!((s - 1.0).abs() < 1e-12);
        }
        // sum rule: sum_k S(k) = N on this grid
        let total: f64 = sk.iter().map(|&(_, s)| s).sum();
        assert!((total - m as f64).abs() < 1e-10);
    }

    #[test]
    fn number_conservation_in_eigenstates() {
        let m = 4;
        let model = ring(m, 1.0, 3.0);
        let basis = build_basis(m, 4, 100_000).unwrap();
        let h = build_hamiltonian(&model, &basis).unwrap();
        let (_, vecs) = eigensolve(&h, 3).unwrap();
        for v in &vecs {
            let total: f64 = basis
                .states()
                .iter()
                .zip(&v.amplitudes)
                .map(|(s, a)| a.norm_sqr() * s.particle_count() as f64)
                .sum();
            assert!((total - 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn correlation_matrix_positive_semidefinite() {
        let model = ring(4, 1.0, 2.0);
        let basis = build_basis(4, 4, 100_000).unwrap();
        let obs = ground_observables(&model, &basis).unwrap();
        let eig = obs.correlations.entries.clone().symmetric_eigen();
        for v in eig.eigenvalues.iter() {
            assert!(*v >= -1e-9);
        }
    }

    #[test]
    fn sf_interaction_energy_expectation() {
        // Per site, <Psi_SF| (U/2) n(n-1) |Psi_SF> = U N(N-1)/2M^2 in the
        // U = 0 ground state (multinomial occupation statistics); the full
        // interaction expectation is M times that by translation invariance.
        let m = 4;
        let n = 4u32;
        let u = 1.7;
        let model = ring(m, 1.0, 0.0);
        let basis = build_basis(m, n, 100_000).unwrap();
        let obs = ground_observables(&model, &basis).unwrap();
        let per_site = u * (n * (n - 1)) as f64 / (2 * m * m) as f64;
        for site in 0..m {
            let got = site_interaction_energy(&basis, &obs.ground_state, u, site).unwrap();
            assert!((got - per_site).abs() < 1e-8, "site {site}: {got} vs {per_site}");
        }
        let h_int = build_hamiltonian(
            &BHModel::chain(m, 0.0, u, 0.0, Boundary::Periodic).unwrap(),
            &basis,
        )
        .unwrap();
        let total = h_int.expectation(&obs.ground_state);
        assert!((total - m as f64 * per_site).abs() < 1e-8, "{total} vs {}", m as f64 * per_site);
    }

    #[test]
    fn spectrum_invariant_under_ring_relabeling() {
        let m = 4;
        let basis = build_basis(m, 3, 100_000).unwrap();
        let model = ring(m, 1.0, 2.0);
        // relabel sites by rotation i -> i + 1 (a ring automorphism)
        let edges: Vec<(usize, usize)> =
            model.edges.iter().map(|&(a, b)| ((a + 1) % m, (b + 1) % m)).collect();
        let rotated =
            BHModel::new(1.0, 2.0, 0.0, m, edges, Boundary::Periodic, 1).unwrap();
        let h1 = build_hamiltonian(&model, &basis).unwrap();
        let h2 = build_hamiltonian(&rotated, &basis).unwrap();
        let (v1, _) = eigensolve(&h1, basis.len()).unwrap();
        let (v2, _) = eigensolve(&h2, basis.len()).unwrap();
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn crossover_scan_limits() {
        let m = 4;
        let basis = build_basis(m, m as u32, 100_000).unwrap();
        let template = ring(m, 1.0, 0.0);
        let rows = crossover_scan(&template, &[0.0, 1e6], &basis).unwrap();
        // U/J = 0 row: SF limit, S(0)/N = 1 on a ring at N = M
        assert!((rows[0].s0_over_n - 1.0).abs() < 1e-6);
        // huge U/J: MI limit
        assert!(rows[1].fluctuation_site0 <= 1e-6);
        assert!(rows[1].s0_over_n < rows[0].s0_over_n);
    }

    #[test]
    fn chemical_potential_is_diagonal_shift_at_fixed_n() {
        let m = 3;
        let n = 3u32;
        let basis = build_basis(m, n, 100_000).unwrap();
        let a = ring(m, 1.0, 2.0);
        let mut b = a.clone();
        b.chemical_potential = 0.9;
        let (va, _) = eigensolve(&build_hamiltonian(&a, &basis).unwrap(), 3).unwrap();
        let (vb, _) = eigensolve(&build_hamiltonian(&b, &basis).unwrap(), 3).unwrap();
        for (x, y) in va.iter().zip(&vb) {
            assert!((x - 0.9 * n as f64 - y).abs() < 1e-10);
        }
    }
}
