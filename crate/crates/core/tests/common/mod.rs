//! Brute-force reference implementations used by the integration tests.
//!
//! Ladder operators are built as explicit matrices on the full occupation
//! space (Kronecker products of single-level blocks), so signs and
//! normalizations come from matrix algebra rather than from the occupation
//! bookkeeping in `egt_core::fock`.

#![allow(dead_code)]

use egt_core::{Basis, OccupationState, SpaceSpec, Statistics};
use nalgebra::{DMatrix, DVector};

fn kron_chain(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    blocks
        .iter()
        .skip(1)
        .fold(blocks[0].clone(), |acc, b| acc.kronecker(b))
}

/// Full-space operator algebra for `levels` modes.
pub struct FockOracle {
    pub statistics: Statistics,
    pub levels: usize,
    /// Annihilators, `annihilators[j]` for level `j + 1`.
    pub annihilators: Vec<DMatrix<f64>>,
    pub vacuum: DVector<f64>,
}

impl FockOracle {
    /// Fermions: Jordan–Wigner `a_j = Z ⊗ ... ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ ... ⊗ 1`.
    pub fn fermions(levels: usize) -> Self {
        let id = DMatrix::<f64>::identity(2, 2);
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        // basis (|0>, |1>); lowering maps |1> to |0>
        let lower = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let annihilators = (0..levels)
            .map(|j| {
                let blocks: Vec<DMatrix<f64>> = (0..levels)
                    .map(|i| match i.cmp(&j) {
                        std::cmp::Ordering::Less => z.clone(),
                        std::cmp::Ordering::Equal => lower.clone(),
                        std::cmp::Ordering::Greater => id.clone(),
                    })
                    .collect();
                kron_chain(&blocks)
            })
            .collect();
        let mut vacuum = DVector::zeros(1 << levels);
        vacuum[0] = 1.0;
        FockOracle {
            statistics: Statistics::Fermion,
            levels,
            annihilators,
            vacuum,
        }
    }

    /// Bosons truncated at `cutoff` quanta per level; exact on any sector
    /// whose occupations never exceed the cutoff.
    pub fn bosons(levels: usize, cutoff: usize) -> Self {
        let d = cutoff + 1;
        let id = DMatrix::<f64>::identity(d, d);
        let mut lower = DMatrix::<f64>::zeros(d, d);
        for m in 1..d {
            lower[(m - 1, m)] = (m as f64).sqrt();
        }
        let annihilators = (0..levels)
            .map(|j| {
                let blocks: Vec<DMatrix<f64>> = (0..levels)
                    .map(|i| if i == j { lower.clone() } else { id.clone() })
                    .collect();
                kron_chain(&blocks)
            })
            .collect();
        let mut vacuum = DVector::zeros(d.pow(levels as u32));
        vacuum[0] = 1.0;
        FockOracle {
            statistics: Statistics::Boson,
            levels,
            annihilators,
            vacuum,
        }
    }

    pub fn creator(&self, level: usize) -> DMatrix<f64> {
        self.annihilators[level - 1].transpose()
    }

    /// Normalized `N prod a†_{j_s} |0>` for the ordered labels of `state`,
    /// applied right to left.
    pub fn ket(&self, state: &OccupationState) -> DVector<f64> {
        let mut v = self.vacuum.clone();
        for level in state.levels().into_iter().rev() {
            v = self.creator(level) * v;
        }
        if self.statistics == Statistics::Boson {
            let norm: f64 = state
                .occupations()
                .iter()
                .map(|&o| (1..=o as u64).product::<u64>() as f64)
                .product();
            v /= norm.sqrt();
        }
        v
    }

    /// `psi_gamma |v>` with `psi_gamma = (N prod a†)^†`.
    pub fn annihilate_string(&self, string: &OccupationState, v: &DVector<f64>) -> DVector<f64> {
        // (a†_{g1} ... a†_{gk})† = a_{gk} ... a_{g1}: a_{g1} acts first
        let mut out = v.clone();
        for level in string.levels() {
            out = &self.annihilators[level - 1] * out;
        }
        if self.statistics == Statistics::Boson {
            let norm: f64 = string
                .occupations()
                .iter()
                .map(|&o| (1..=o as u64).product::<u64>() as f64)
                .product();
            out /= norm.sqrt();
        }
        out
    }

    /// `<mu| psi†_alpha psi_gamma |nu> = <psi_alpha mu | psi_gamma nu>`.
    pub fn transition_element(
        &self,
        mu: &OccupationState,
        alpha: &OccupationState,
        gamma: &OccupationState,
        nu: &OccupationState,
    ) -> f64 {
        let left = self.annihilate_string(alpha, &self.ket(mu));
        let right = self.annihilate_string(gamma, &self.ket(nu));
        left.dot(&right)
    }

    /// Transition tensor `T[(alpha, gamma)][mu, nu]` over the given bases.
    pub fn transition_tensor(&self, n_basis: &Basis, k_basis: &Basis) -> Vec<Vec<DMatrix<f64>>> {
        let n_kets: Vec<DVector<f64>> = n_basis.states().iter().map(|s| self.ket(s)).collect();
        let reduced: Vec<Vec<DVector<f64>>> = k_basis
            .states()
            .iter()
            .map(|g| n_kets.iter().map(|k| self.annihilate_string(g, k)).collect())
            .collect();
        let dn = n_basis.dimension();
        (0..k_basis.dimension())
            .map(|a| {
                (0..k_basis.dimension())
                    .map(|g| {
                        DMatrix::from_fn(dn, dn, |mu, nu| reduced[a][mu].dot(&reduced[g][nu]))
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn oracle_for(spec: SpaceSpec, particles: usize) -> FockOracle {
    match spec.statistics {
        Statistics::Fermion => FockOracle::fermions(spec.levels),
        Statistics::Boson => FockOracle::bosons(spec.levels, particles),
    }
}
