//! Transfer efficiencies across disordered networks built from k-body
//! embedded Gaussian ensembles of bosons and fermions.
//!
//! The pipeline for one realization is: draw a random k-body coupling
//! ([`ensemble::sample_coupling`]), optionally project it onto the
//! centrosymmetric / centrohermitian subspace ([`ensemble::impose_centro`]),
//! embed it into the n-particle Fock space ([`ensemble::Embedding`]), and find
//! the best transfer probability between distinct basis states within a time
//! window ([`transport::best_efficiency`]). [`sweep`] runs seeded ensembles of
//! such realizations and [`stats_io`] aggregates and serializes them.

pub mod ensemble;
pub mod error;
pub mod fock;
pub mod stats_io;
pub mod sweep;
pub mod transport;

pub use ensemble::{
    centro_lift_check, embed, impose_centro, sample_coupling, Beta, CouplingMatrix, Embedding,
    EnsembleConfig, ManyBodyHamiltonian,
};
pub use error::{Error, Result};
pub use fock::{
    enumerate_basis, exchange_operator, state_index, Basis, BasisIndex, ExchangePermutation,
    OccupationState, OperatorAction, SpaceSpec, Statistics,
};
pub use stats_io::{summarize, write_summary, EnsembleSummary, Histogram, RealizationRecord};
pub use sweep::{run, validate, Cell, RunPlan, Workers};
pub use transport::{
    best_efficiency, pair_efficiency, spectral_linearity, EfficiencyQuery, EfficiencyRecord,
    TimeWindow,
};
