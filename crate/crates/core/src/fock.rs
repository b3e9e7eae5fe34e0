//! Occupation-number basis of N bosons on M sites with rank/unrank lookup
//! and bosonic operator matrix elements.

use std::collections::HashMap;

use thiserror::Error;

/// Default number-of-states cap for basis construction.
pub const DEFAULT_DIMENSION_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("basis needs at least one site")]
    NoSites,
    #[error("basis dimension {dim} exceeds cap {cap} (M={sites}, N={particles})")]
    DimensionCap { dim: u128, cap: usize, sites: usize, particles: usize },
    #[error("site index {site} out of range for {sites} sites")]
    InvalidSite { site: usize, sites: usize },
    #[error("hop requires two distinct sites, got {0}")]
    SameSite(usize),
}

/// A single occupation-number state |n_0, n_1, ..., n_{M-1}>.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    pub occupations: Vec<u32>,
}

impl FockState {
    pub fn particle_count(&self) -> u32 {
        self.occupations.iter().sum()
    }
}

/// The full fixed-N basis, ordered lexicographically descending on
/// occupations, with a hash-map rank lookup.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub sites: usize,
    pub particles: u32,
    states: Vec<FockState>,
    index: HashMap<Vec<u32>, usize>,
}

/// Number of states, C(N+M-1, N), without overflow.
pub fn dimension(sites: usize, particles: u32) -> u128 {
    let n = particles as u128;
    let m = sites as u128;
    // C(n+m-1, m-1) by incremental product; saturate on overflow
    let mut num = 1u128;
    for i in 1..m {
        num = match num.checked_mul(n + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    num
}

/// Enumerate the complete basis for M sites and N particles.
pub fn build_basis(sites: usize, particles: u32, cap: usize) -> Result<FockBasis, FockError> {
    if sites == 0 {
        return Err(FockError::NoSites);
    }
    let dim = dimension(sites, particles);
    if dim > cap as u128 {
        return Err(FockError::DimensionCap {
            dim,
            cap,
            sites,
            particles: particles as usize,
        });
    }
    let mut states = Vec::with_capacity(dim as usize);
    let mut current = vec![0u32; sites];
    enumerate(&mut current, 0, particles, &mut states);
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.occupations.clone(), i))
        .collect();
    Ok(FockBasis { sites, particles, states, index })
}

// lexicographic descending: the first site takes the largest count first
fn enumerate(current: &mut Vec<u32>, site: usize, remaining: u32, out: &mut Vec<FockState>) {
    if site == current.len() - 1 {
        current[site] = remaining;
        out.push(FockState { occupations: current.clone() });
        current[site] = 0;
        return;
    }
    for n in (0..=remaining).rev() {
        current[site] = n;
        enumerate(current, site + 1, remaining - n, out);
    }
    current[site] = 0;
}

impl FockBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn unrank(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    pub fn rank(&self, s: &FockState) -> Option<usize> {
        self.index.get(&s.occupations).copied()
    }

    fn check_site(&self, site: usize) -> Result<(), FockError> {
        if site >= self.sites {
            return Err(FockError::InvalidSite { site, sites: self.sites });
        }
        Ok(())
    }

    /// Matrix element of a_l^dag a_m on |s>: the hopped state and its
    /// amplitude sqrt((n_l + 1) n_m), or None when site m is empty.
    pub fn apply_hop(
        &self,
        s: &FockState,
        l: usize,
        m: usize,
    ) -> Result<Option<(FockState, f64)>, FockError> {
        self.check_site(l)?;
        self.check_site(m)?;
        if l == m {
            return Err(FockError::SameSite(l));
        }
        let n_m = s.occupations[m];
        if n_m == 0 {
            return Ok(None);
        }
        let n_l = s.occupations[l];
        let mut occ = s.occupations.clone();
        occ[m] -= 1;
        occ[l] += 1;
        let amp = (((n_l + 1) * n_m) as f64).sqrt();
        Ok(Some((FockState { occupations: occ }, amp)))
    }

    /// n_l on a basis state.
    pub fn number_operator(&self, s: &FockState, l: usize) -> Result<u32, FockError> {
        self.check_site(l)?;
        Ok(s.occupations[l])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_dimensions() {
        assert_eq!(build_basis(3, 2, 100).unwrap().len(), 6);
        assert_eq!(build_basis(1, 17, 100).unwrap().len(), 1);
        // C(15, 7) by direct product formula
        let oracle: u128 = (9..=15).product::<u128>() / (1..=7).product::<u128>();
        assert_eq!(oracle, 6435);
        assert_eq!(build_basis(8, 8, 10_000).unwrap().len(), 6435);
    }

    #[test]
    fn cap_enforced_with_dimension_in_error() {
        let err = build_basis(30, 30, DEFAULT_DIMENSION_CAP).unwrap_err();
        match err {
            FockError::DimensionCap { dim, .. } => assert!(dim > 2_000_000),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ordering_lexicographic_descending() {
        let b = build_basis(3, 2, 100).unwrap();
        let occs: Vec<Vec<u32>> = b.states().iter().map(|s| s.occupations.clone()).collect();
        assert_eq!(
            occs,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2],
            ]
        );
    }

    #[test]
    fn hop_examples() {
        let b = build_basis(2, 2, 100).unwrap();
        // |2,0> with a_2^dag a_1 (indices 1 <- 0)
        let s = FockState { occupations: vec![2, 0] };
        let (t, amp) = b.apply_hop(&s, 1, 0).unwrap().unwrap();
        assert_eq!(t.occupations, vec![1, 1]);
        assert!((amp - 2f64.sqrt()).abs() < 1e-15);
        // annihilating an empty site
        let s = FockState { occupations: vec![0, 2] };
        assert!(b.apply_hop(&s, 1, 0).unwrap().is_none());
        // |1,1> with a_1^dag a_2
        let s = FockState { occupations: vec![1, 1] };
        let (t, amp) = b.apply_hop(&s, 0, 1).unwrap().unwrap();
        assert_eq!(t.occupations, vec![2, 0]);
        assert!((amp - 2f64.sqrt()).abs() < 1e-15);
        // bad sites
        assert!(b.apply_hop(&s, 0, 5).is_err());
        assert!(b.apply_hop(&s, 0, 0).is_err());
    }

    #[test]
    fn number_operator_and_conservation() {
        let b = build_basis(2, 2, 100).unwrap();
        let s = FockState { occupations: vec![2, 0] };
        assert_eq!(b.number_operator(&s, 0).unwrap(), 2);
        assert_eq!(b.number_operator(&s, 1).unwrap(), 0);
        assert!(b.number_operator(&s, 2).is_err());
        for s in b.states() {
            assert_eq!(s.particle_count(), 2);
        }
    }

    proptest! {
        #[test]
        fn rank_unrank_bijection(sites in 1usize..6, particles in 0u32..7) {
            let b = build_basis(sites, particles, 100_000).unwrap();
            for i in 0..b.len() {
                prop_assert_eq!(b.rank(b.unrank(i)).unwrap(), i);
            }
            // duplicate-free by construction of the index
            prop_assert_eq!(b.index.len(), b.len());
        }

        #[test]
        fn hop_reverse_matrix_element(seed in 0u64..200) {
            // <s| a_m^dag a_l a_l^dag a_m |s> = (n_l + 1) n_m
            let b = build_basis(4, 3, 100_000).unwrap();
            let s = b.unrank((seed as usize) % b.len());
            let (l, m) = (((seed / 7) % 4) as usize, ((seed / 31) % 4) as usize);
            prop_assume!(l != m);
            let expected = ((s.occupations[l] + 1) * s.occupations[m]) as f64;
            match b.apply_hop(s, l, m).unwrap() {
                None => prop_assert_eq!(expected, 0.0),
                Some((t, amp1)) => {
                    let (back, amp2) = b.apply_hop(&t, m, l).unwrap().unwrap();
                    prop_assert_eq!(&back, s);
                    prop_assert!((amp1 * amp2 - expected).abs() < 1e-12);
                }
            }
        }
    }
}
