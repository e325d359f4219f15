//! Random k-body couplings and their embedding into the n-particle space.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Basis, BasisIndex, ExchangePermutation, SpaceSpec, Statistics};

/// Dyson index of the coupling ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Beta {
    /// Time-reversal invariant: real symmetric couplings.
    Orthogonal,
    /// Broken time-reversal: complex hermitian couplings.
    Unitary,
}

impl Beta {
    pub fn index(self) -> u8 {
        match self {
            Beta::Orthogonal => 1,
            Beta::Unitary => 2,
        }
    }
}

impl TryFrom<u8> for Beta {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, String> {
        match value {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            other => Err(format!("beta must be 1 or 2, got {other}")),
        }
    }
}

impl From<Beta> for u8 {
    fn from(beta: Beta) -> u8 {
        beta.index()
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

fn default_v0() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub spec: SpaceSpec,
    /// Total particle number.
    pub n: usize,
    /// Interaction rank.
    pub k: usize,
    pub beta: Beta,
    pub centro: bool,
    #[serde(default = "default_v0")]
    pub v0: f64,
}

impl EnsembleConfig {
    pub fn new(spec: SpaceSpec, n: usize, k: usize, beta: Beta, centro: bool) -> Self {
        EnsembleConfig {
            spec,
            n,
            k,
            beta,
            centro,
            v0: 1.0,
        }
    }

    /// Every violated constraint, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.spec.levels == 0 {
            out.push("l ≥ 1".to_string());
        }
        if self.k == 0 {
            out.push("k ≥ 1".to_string());
        }
        if self.k > self.n {
            out.push("k ≤ n".to_string());
        }
        if self.spec.statistics == Statistics::Fermion && self.n >= self.spec.levels {
            out.push("fermion requires n < l".to_string());
        }
        if !(self.v0 > 0.0 && self.v0.is_finite()) {
            out.push("v0 > 0".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations.join("; ")))
        }
    }

    /// Dimension of the k-particle coupling space.
    pub fn coupling_dimension(&self) -> usize {
        self.spec.dimension(self.k)
    }

    /// Dimension of the n-particle space.
    pub fn hilbert_dimension(&self) -> usize {
        self.spec.dimension(self.n)
    }

    /// Self-describing identifier, e.g. `boson_l2_n9_k1_b1_centro`.
    pub fn cell_id(&self) -> String {
        format!(
            "{}_l{}_n{}_k{}_b{}_{}",
            self.spec.statistics,
            self.spec.levels,
            self.n,
            self.k,
            self.beta,
            if self.centro { "centro" } else { "plain" }
        )
    }
}

/// Random k-body coefficient matrix `v_{alpha, gamma}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    pub entries: DMatrix<Complex64>,
    pub beta: Beta,
}

impl CouplingMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        let d = self.dimension();
        (0..d).all(|i| {
            (0..d).all(|j| self.entries[(j, i)] == self.entries[(i, j)].conj())
        }) && (self.beta == Beta::Unitary || self.entries.iter().all(|z| z.im == 0.0))
    }
}

/// Draws a coupling matrix with zero mean and
/// `E[v_ag v_a'g'] = v0² (δ_ag' δ_a'g + δ_{β,1} δ_aa' δ_gg')`.
///
/// The upper triangle is drawn row by row (diagonal first) and mirrored.
/// β=1: off-diagonal variance v0², diagonal 2v0². β=2: off-diagonal real and
/// imaginary parts each v0²/2, diagonal real with variance v0².
pub fn sample_coupling<R: Rng + ?Sized>(config: &EnsembleConfig, rng: &mut R) -> CouplingMatrix {
    let dim = config.coupling_dimension();
    let v0 = config.v0;
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    for i in 0..dim {
        for j in i..dim {
            let z = match (config.beta, i == j) {
                (Beta::Orthogonal, true) => Complex64::new(std::f64::consts::SQRT_2 * v0 * normal(), 0.0),
                (Beta::Orthogonal, false) => Complex64::new(v0 * normal(), 0.0),
                (Beta::Unitary, true) => Complex64::new(v0 * normal(), 0.0),
                (Beta::Unitary, false) => {
                    let s = v0 * std::f64::consts::FRAC_1_SQRT_2;
                    let re = normal();
                    let im = normal();
                    Complex64::new(s * re, s * im)
                }
            };
            entries[(i, j)] = z;
            entries[(j, i)] = z.conj();
        }
    }
    CouplingMatrix {
        entries,
        beta: config.beta,
    }
}

/// Projects onto the centrosymmetric (β=1: `(v + JvJ)/2`) or centrohermitian
/// (β=2: `(v + J vᵀ J)/2`) subspace.
pub fn impose_centro(v: &CouplingMatrix, exchange: &ExchangePermutation) -> Result<CouplingMatrix> {
    let dim = v.dimension();
    if exchange.dimension() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: exchange.dimension(),
        });
    }
    let image = &exchange.image;
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mirrored = match v.beta {
                Beta::Orthogonal => v.entries[(image[i], image[j])],
                Beta::Unitary => v.entries[(image[j], image[i])],
            };
            entries[(i, j)] = (v.entries[(i, j)] + mirrored) * 0.5;
        }
    }
    Ok(CouplingMatrix {
        entries,
        beta: v.beta,
    })
}

/// Embedded n-particle Hamiltonian with its spectral decomposition.
#[derive(Clone, Debug)]
pub struct ManyBodyHamiltonian {
    pub matrix: DMatrix<Complex64>,
    /// Ascending.
    pub eigenvalues: DVector<f64>,
    /// Column `m` is the eigenvector of `eigenvalues[m]`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl ManyBodyHamiltonian {
    /// Diagonalizes a hermitian matrix. Only the lower triangle is trusted.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        let dim = matrix.nrows();
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&m| eig.eigenvalues[m]));
        let mut eigenvectors = DMatrix::<Complex64>::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        ManyBodyHamiltonian {
            matrix,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entrywise deviation from hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Spectral norm of `V diag(E) V† - H`.
    pub fn reconstruction_residual(&self) -> f64 {
        let diag = DMatrix::from_diagonal(&self.eigenvalues.map(|e| Complex64::new(e, 0.0)));
        let rebuilt = &self.eigenvectors * diag * self.eigenvectors.adjoint();
        (rebuilt - &self.matrix).svd(false, false).singular_values.max()
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    row: BasisIndex,
    col: BasisIndex,
    create: BasisIndex,
    annihilate: BasisIndex,
    coefficient: f64,
}

/// Precomputed nonzero `<mu| psi†_alpha psi_gamma |nu>` for one configuration,
/// reusable across realizations.
#[derive(Clone, Debug)]
pub struct Embedding {
    config: EnsembleConfig,
    n_basis: Basis,
    k_basis: Basis,
    terms: Vec<Term>,
}

impl Embedding {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        let n_basis = Basis::new(config.spec, config.n)?;
        let k_basis = Basis::new(config.spec, config.k)?;
        let mut terms = Vec::new();
        for col in 0..n_basis.dimension() {
            for (annihilate, gamma) in k_basis.states().iter().enumerate() {
                for (create, alpha) in k_basis.states().iter().enumerate() {
                    let action = n_basis.apply_transition(alpha, gamma, col)?;
                    if let Some(row) = action.target {
                        terms.push(Term {
                            row,
                            col,
                            create,
                            annihilate,
                            coefficient: action.coefficient,
                        });
                    }
                }
            }
        }
        Ok(Embedding {
            config,
            n_basis,
            k_basis,
            terms,
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn n_basis(&self) -> &Basis {
        &self.n_basis
    }

    pub fn k_basis(&self) -> &Basis {
        &self.k_basis
    }

    /// `H[mu, nu] = sum v[alpha, gamma] <mu| psi†_alpha psi_gamma |nu>`, without
    /// diagonalizing.
    pub fn embed_matrix(&self, v: &CouplingMatrix) -> Result<DMatrix<Complex64>> {
        let dk = self.k_basis.dimension();
        if v.dimension() != dk {
            return Err(Error::DimensionMismatch {
                expected: dk,
                found: v.dimension(),
            });
        }
        let dim = self.n_basis.dimension();
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            if t.row >= t.col {
                h[(t.row, t.col)] += v.entries[(t.create, t.annihilate)] * t.coefficient;
            }
        }
        for col in 0..dim {
            h[(col, col)].im = 0.0;
            for row in col + 1..dim {
                h[(col, row)] = h[(row, col)].conj();
            }
        }
        Ok(h)
    }

    pub fn embed(&self, v: &CouplingMatrix) -> Result<ManyBodyHamiltonian> {
        Ok(ManyBodyHamiltonian::from_matrix(self.embed_matrix(v)?))
    }

    /// Draws one realization: sample, optionally project, embed.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ManyBodyHamiltonian> {
        let mut v = sample_coupling(&self.config, rng);
        if self.config.centro {
            v = impose_centro(&v, self.k_basis.exchange())?;
        }
        self.embed(&v)
    }
}

/// Builds the n-particle Hamiltonian for `v` in one shot.
pub fn embed(config: &EnsembleConfig, v: &CouplingMatrix) -> Result<ManyBodyHamiltonian> {
    Embedding::new(*config)?.embed(v)
}

/// Max-norm of `[H, J]` (β=1) or `J Hᵀ J - H` (β=2).
pub fn centro_lift_check(beta: Beta, h: &ManyBodyHamiltonian, exchange: &ExchangePermutation) -> f64 {
    let dim = h.dimension();
    let image = &exchange.image;
    let m = &h.matrix;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let residual = match beta {
                // (HJ - JH)[i, j] = H[i, J j] - H[J i, j]
                Beta::Orthogonal => m[(i, image[j])] - m[(image[i], j)],
                // (J Hᵀ J)[i, j] = H[J j, J i]
                Beta::Unitary => m[(image[j], image[i])] - m[(i, j)],
            };
            worst = worst.max(residual.norm());
        }
    }
    worst
}
