//! Second-quantized bases over `l` degenerate single-particle levels.
//!
//! An m-particle basis is the set of occupation vectors with total occupation
//! `m` (entries restricted to {0, 1} for fermions). Basis states are
//!
//! * fermions: `a†_{j1} a†_{j2} ... a†_{jm} |0>` with `j1 < j2 < ... < jm`,
//! * bosons: `N b†_{j1} ... b†_{jm} |0>` with `j1 <= ... <= jm` and `N` the
//!   factor normalizing the state (one `(k_j!)^{-1/2}` per repeated level).
//!
//! # Ordering
//!
//! States are ordered so that the level-reflection `j -> l - j + 1` acts as
//! `i -> dim - 1 - i` on every state it does not fix. Concretely, walk the
//! occupation vectors in ascending lexicographic order (level 1 most
//! significant) and collect the first member of every reflection pair; the
//! basis is those representatives, then the reflection-invariant states (in
//! lexicographic order), then the mirror images of the representatives in
//! reverse. For `l = 2` this is plain lexicographic order, so the bosonic
//! one-body Hamiltonian is tridiagonal in the occupation of level 1.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a state within an ordered [`Basis`].
pub type BasisIndex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Fermion => f.write_str("fermion"),
            Statistics::Boson => f.write_str("boson"),
        }
    }
}

/// Single-particle space: `levels` degenerate orbitals filled with particles of
/// the given statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub levels: usize,
    pub statistics: Statistics,
}

impl SpaceSpec {
    pub fn new(levels: usize, statistics: Statistics) -> Self {
        SpaceSpec { levels, statistics }
    }

    pub fn fermions(levels: usize) -> Self {
        Self::new(levels, Statistics::Fermion)
    }

    pub fn bosons(levels: usize) -> Self {
        Self::new(levels, Statistics::Boson)
    }

    /// Number of m-particle basis states: `C(l, m)` for fermions,
    /// `C(l + m - 1, m)` for bosons.
    pub fn dimension(&self, particles: usize) -> usize {
        match self.statistics {
            Statistics::Fermion if particles > self.levels => 0,
            Statistics::Fermion => binomial(self.levels, particles),
            Statistics::Boson if self.levels == 0 => usize::from(particles == 0),
            Statistics::Boson => binomial(self.levels + particles - 1, particles),
        }
    }

    fn check_particles(&self, particles: usize) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidConfig("l ≥ 1".into()));
        }
        if self.statistics == Statistics::Fermion && particles > self.levels {
            return Err(Error::FermionOverfill {
                levels: self.levels,
                particles,
            });
        }
        Ok(())
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Occupation-number vector; entry `j` is the occupation of level `j + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationState {
    occupations: Vec<u8>,
}

impl OccupationState {
    pub fn new(occupations: Vec<u8>) -> Self {
        OccupationState { occupations }
    }

    /// Builds a state from 1-based level labels, e.g. `(2, 3)` or `(1, 1, 2)`.
    pub fn from_levels(levels: usize, labels: &[usize]) -> Result<Self> {
        let mut occupations = vec![0u8; levels];
        for &label in labels {
            if label == 0 || label > levels {
                return Err(Error::InvalidOccupation {
                    occupations,
                    reason: "level label outside 1..=l",
                });
            }
            occupations[label - 1] += 1;
        }
        Ok(OccupationState { occupations })
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn particle_count(&self) -> usize {
        self.occupations.iter().map(|&o| o as usize).sum()
    }

    /// Ordered 1-based level labels, repeated according to occupation.
    pub fn levels(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(j, &o)| std::iter::repeat_n(j + 1, o as usize))
            .collect()
    }

    /// Image under the single-particle reflection `j -> l - j + 1`.
    pub fn reflected(&self) -> Self {
        let mut occupations = self.occupations.clone();
        occupations.reverse();
        OccupationState { occupations }
    }

    fn validate(&self, spec: &SpaceSpec) -> Result<()> {
        if self.occupations.len() != spec.levels {
            return Err(Error::InvalidOccupation {
                occupations: self.occupations.clone(),
                reason: "length differs from the number of levels",
            });
        }
        if spec.statistics == Statistics::Fermion && self.occupations.iter().any(|&o| o > 1) {
            return Err(Error::InvalidOccupation {
                occupations: self.occupations.clone(),
                reason: "fermionic occupation above 1",
            });
        }
        Ok(())
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (j, o) in self.occupations.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, ">")
    }
}

/// Lifted level reflection on an m-particle basis, as an index map with all
/// coefficients +1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangePermutation {
    pub image: Vec<BasisIndex>,
    pub fixed_points: Vec<BasisIndex>,
    pub is_full_exchange: bool,
}

impl ExchangePermutation {
    pub fn dimension(&self) -> usize {
        self.image.len()
    }

    pub fn is_involution(&self) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(i, &j)| j < self.image.len() && self.image[j] == i)
    }
}

/// Result of a transition string acting on a basis state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorAction {
    pub target: Option<BasisIndex>,
    pub coefficient: f64,
}

impl OperatorAction {
    const ANNIHILATED: OperatorAction = OperatorAction {
        target: None,
        coefficient: 0.0,
    };
}

/// Ordered m-particle basis with its reflection permutation.
#[derive(Clone, Debug)]
pub struct Basis {
    spec: SpaceSpec,
    particles: usize,
    states: Vec<OccupationState>,
    lookup: HashMap<Vec<u8>, BasisIndex>,
    exchange: ExchangePermutation,
}

impl Basis {
    pub fn new(spec: SpaceSpec, particles: usize) -> Result<Self> {
        spec.check_particles(particles)?;
        let lex = lexicographic_states(&spec, particles);
        let lex_rank: HashMap<&[u8], usize> = lex
            .iter()
            .enumerate()
            .map(|(i, s)| (s.occupations(), i))
            .collect();

        let mut taken = vec![false; lex.len()];
        let mut front = Vec::new();
        let mut fixed = Vec::new();
        for (i, state) in lex.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let mirror = state.reflected();
            let j = lex_rank[mirror.occupations()];
            taken[i] = true;
            taken[j] = true;
            if i == j {
                fixed.push(state.clone());
            } else {
                front.push(state.clone());
            }
        }

        let dim = lex.len();
        let mut states = Vec::with_capacity(dim);
        states.extend(front.iter().cloned());
        states.extend(fixed.iter().cloned());
        states.extend(front.iter().rev().map(OccupationState::reflected));

        let mut image: Vec<BasisIndex> = (0..dim).rev().collect();
        let fixed_start = front.len();
        let fixed_points: Vec<BasisIndex> = (fixed_start..fixed_start + fixed.len()).collect();
        for &p in &fixed_points {
            image[p] = p;
        }
        let is_full_exchange = fixed_points.len() <= 1;

        let lookup = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.occupations.clone(), i))
            .collect();

        Ok(Basis {
            spec,
            particles,
            states,
            lookup,
            exchange: ExchangePermutation {
                image,
                fixed_points,
                is_full_exchange,
            },
        })
    }

    pub fn spec(&self) -> SpaceSpec {
        self.spec
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn state(&self, index: BasisIndex) -> &OccupationState {
        &self.states[index]
    }

    pub fn exchange(&self) -> &ExchangePermutation {
        &self.exchange
    }

    pub fn index_of(&self, state: &OccupationState) -> Result<BasisIndex> {
        state.validate(&self.spec)?;
        if state.particle_count() != self.particles {
            return Err(Error::ParticleMismatch(format!(
                "state {state} has {} particles, basis has {}",
                state.particle_count(),
                self.particles
            )));
        }
        self.lookup
            .get(state.occupations())
            .copied()
            .ok_or_else(|| Error::InvalidOccupation {
                occupations: state.occupations.clone(),
                reason: "not a member of the basis",
            })
    }

    /// Computes `psi†_create psi_annihilate |target>` for the basis state at
    /// `target`, where `create` and `annihilate` are k-particle strings.
    pub fn apply_transition(
        &self,
        create: &OccupationState,
        annihilate: &OccupationState,
        target: BasisIndex,
    ) -> Result<OperatorAction> {
        create.validate(&self.spec)?;
        annihilate.validate(&self.spec)?;
        let k = create.particle_count();
        if annihilate.particle_count() != k {
            return Err(Error::ParticleMismatch(format!(
                "creation string has {k} particles, annihilation string has {}",
                annihilate.particle_count()
            )));
        }
        if k > self.particles {
            return Err(Error::ParticleMismatch(format!(
                "{k}-particle transition on a {}-particle state",
                self.particles
            )));
        }
        let source = self.states.get(target).ok_or(Error::DimensionMismatch {
            expected: self.dimension(),
            found: target,
        })?;
        let action = match self.spec.statistics {
            Statistics::Fermion => fermion_transition(create, annihilate, source),
            Statistics::Boson => boson_transition(create, annihilate, source),
        };
        Ok(match action {
            Some((occupations, coefficient)) => OperatorAction {
                target: Some(self.lookup[&occupations]),
                coefficient,
            },
            None => OperatorAction::ANNIHILATED,
        })
    }
}

/// All m-particle occupation vectors in ascending lexicographic order.
fn lexicographic_states(spec: &SpaceSpec, particles: usize) -> Vec<OccupationState> {
    fn fill(
        level: usize,
        remaining: usize,
        cap: usize,
        current: &mut Vec<u8>,
        out: &mut Vec<OccupationState>,
    ) {
        let levels = current.len();
        if level == levels - 1 {
            if remaining <= cap {
                current[level] = remaining as u8;
                out.push(OccupationState::new(current.clone()));
            }
            return;
        }
        for occ in 0..=remaining.min(cap) {
            current[level] = occ as u8;
            fill(level + 1, remaining - occ, cap, current, out);
        }
        current[level] = 0;
    }

    let cap = match spec.statistics {
        Statistics::Fermion => 1,
        Statistics::Boson => particles,
    };
    let mut out = Vec::with_capacity(spec.dimension(particles));
    let mut current = vec![0u8; spec.levels];
    fill(0, particles, cap, &mut current, &mut out);
    out
}

/// Enumerates the m-particle basis in canonical order.
pub fn enumerate_basis(spec: SpaceSpec, particles: usize) -> Result<Vec<OccupationState>> {
    Ok(Basis::new(spec, particles)?.states)
}

/// Position of `state` within the m-particle basis.
pub fn state_index(spec: SpaceSpec, particles: usize, state: &OccupationState) -> Result<BasisIndex> {
    Basis::new(spec, particles)?.index_of(state)
}

/// The lifted reflection `J_m` on the m-particle basis.
pub fn exchange_operator(spec: SpaceSpec, particles: usize) -> Result<ExchangePermutation> {
    Ok(Basis::new(spec, particles)?.exchange)
}

// Sign of a single fermionic ladder operator at `level`: (-1)^(occupied levels below).
fn parity_below(occ: &[u8], level: usize) -> f64 {
    let below: u32 = occ[..level].iter().map(|&o| o as u32).sum();
    if below.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn fermion_transition(
    create: &OccupationState,
    annihilate: &OccupationState,
    source: &OccupationState,
) -> Option<(Vec<u8>, f64)> {
    let mut occ = source.occupations.clone();
    let mut sign = 1.0;
    // psi_gamma = a_{g_k} ... a_{g_1}: a_{g_1} acts first.
    for level in annihilate.levels() {
        let j = level - 1;
        if occ[j] == 0 {
            return None;
        }
        sign *= parity_below(&occ, j);
        occ[j] = 0;
    }
    // psi†_alpha = a†_{a_1} ... a†_{a_k}: a†_{a_k} acts first.
    for level in create.levels().into_iter().rev() {
        let j = level - 1;
        if occ[j] == 1 {
            return None;
        }
        sign *= parity_below(&occ, j);
        occ[j] = 1;
    }
    Some((occ, sign))
}

fn boson_transition(
    create: &OccupationState,
    annihilate: &OccupationState,
    source: &OccupationState,
) -> Option<(Vec<u8>, f64)> {
    let mut occ = source.occupations.clone();
    // coefficient² = numerator / denominator, both integers; the normalizations
    // N_alpha, N_gamma contribute 1/k_j! each to the denominator.
    let mut numerator: u128 = 1;
    let mut denominator: u128 = 1;
    for (j, &count) in annihilate.occupations.iter().enumerate() {
        if occ[j] < count {
            return None;
        }
        for i in 1..=count as u128 {
            numerator *= occ[j] as u128;
            occ[j] -= 1;
            denominator *= i;
        }
    }
    for (j, &count) in create.occupations.iter().enumerate() {
        for i in 1..=count as u128 {
            occ[j] += 1;
            numerator *= occ[j] as u128;
            denominator *= i;
        }
    }
    Some((occ, (numerator as f64 / denominator as f64).sqrt()))
}
