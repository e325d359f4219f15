//! Seeded ensemble sweeps over grids of (statistics, l, n, k, β, centro) cells.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Beta, EnsembleConfig, Embedding};
use crate::error::{Error, Result};
use crate::fock::{SpaceSpec, Statistics};
use crate::stats_io::{
    summarize, write_summary, EnsembleSummary, RealizationRecord, RunMetadata, DEFAULT_BENCHMARK,
    DEFAULT_BINS,
};
use crate::transport::{best_efficiency, TimeWindow};

pub const DEFAULT_REALIZATIONS: usize = 2000;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const PRESETS: &[&str] = &[
    "fig1",
    "fig2",
    "fig2a",
    "fig3",
    "fig4",
    "confirm-l7",
    "confirm-l8",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub config: EnsembleConfig,
    pub realizations: usize,
}

impl Cell {
    pub fn id(&self) -> String {
        self.config.cell_id()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Workers {
    #[default]
    Auto,
    Count(usize),
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Workers::Auto);
        }
        s.parse::<usize>()
            .map(Workers::Count)
            .map_err(|_| format!("workers must be a positive integer or \"auto\", got {s:?}"))
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workers::Auto => f.write_str("auto"),
            Workers::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub cells: Vec<Cell>,
    pub window: TimeWindow,
    pub benchmark: f64,
    pub bins: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub workers: Workers,
}

impl RunPlan {
    pub fn new(cells: Vec<Cell>, output_dir: impl Into<PathBuf>) -> Self {
        RunPlan {
            cells,
            window: TimeWindow::default(),
            benchmark: DEFAULT_BENCHMARK,
            bins: DEFAULT_BINS,
            master_seed: 0,
            output_dir: output_dir.into(),
            workers: Workers::Auto,
        }
    }
}

/// Every constraint the plan violates; empty when the plan is runnable.
pub fn validate(plan: &RunPlan) -> Vec<String> {
    let mut out = Vec::new();
    if plan.cells.is_empty() {
        out.push("plan has no cells".to_string());
    }
    for cell in &plan.cells {
        let id = cell.id();
        for v in cell.config.violations() {
            out.push(format!("{id}: {v}"));
        }
        if cell.config.violations().is_empty() && cell.config.hilbert_dimension() < 2 {
            out.push(format!("{id}: network needs at least two states"));
        }
        if cell.realizations == 0 {
            out.push(format!("{id}: realizations ≥ 1"));
        }
    }
    out.extend(plan.window.violations());
    if !(plan.benchmark > 0.0 && plan.benchmark < 1.0) {
        out.push("benchmark in (0, 1)".to_string());
    }
    if plan.bins == 0 {
        out.push("bins ≥ 1".to_string());
    }
    if plan.workers == Workers::Count(0) {
        out.push("workers ≥ 1".to_string());
    }
    out
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of the random stream for one realization, a pure function of
/// `(master_seed, cell_id, index)`.
pub fn realization_seed(master_seed: u64, cell_id: &str, index: usize) -> u64 {
    let cell_key = splitmix64(master_seed ^ splitmix64(fnv1a(cell_id.as_bytes())));
    splitmix64(cell_key ^ splitmix64(index as u64))
}

fn thread_pool(workers: Workers) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Workers::Count(n) = workers {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

/// Runs every realization of one cell. Output order follows the realization
/// index, whatever the worker count.
pub fn simulate_cell(
    cell: &Cell,
    window: TimeWindow,
    master_seed: u64,
    workers: Workers,
) -> Result<Vec<RealizationRecord>> {
    let embedding = Embedding::new(cell.config)?;
    let id = cell.id();
    thread_pool(workers)?.install(|| {
        (0..cell.realizations)
            .into_par_iter()
            .map(|index| {
                let seed = realization_seed(master_seed, &id, index);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = embedding.realize(&mut rng)?;
                let mut efficiency = best_efficiency(&h, window);
                efficiency.per_pair = None;
                Ok(RealizationRecord {
                    index,
                    seed,
                    efficiency,
                })
            })
            .collect()
    })
}

pub struct CellOutcome {
    pub cell_id: String,
    pub directory: PathBuf,
    pub summary: EnsembleSummary,
}

pub fn metadata_for(plan: &RunPlan, cell: &Cell) -> RunMetadata {
    RunMetadata {
        artifact_version: ARTIFACT_VERSION.to_string(),
        cell_id: cell.id(),
        config: cell.config,
        realizations: cell.realizations,
        window: plan.window,
        master_seed: plan.master_seed,
        bins: plan.bins,
        realization_count_assumed: cell.config.spec.statistics == Statistics::Fermion,
    }
}

/// Writes a cell into a sibling temp directory, then renames it into place.
fn write_cell_atomically(
    summary: &EnsembleSummary,
    metadata: &RunMetadata,
    out: &Path,
) -> Result<PathBuf> {
    let target = out.join(&metadata.cell_id);
    let staging = out.join(format!(".{}.tmp", metadata.cell_id));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    write_summary(summary, metadata, &staging)?;
    if target.exists() {
        fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
    }
    fs::rename(&staging, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

/// Executes a validated plan, writing one directory per cell under
/// `plan.output_dir`.
pub fn run(plan: &RunPlan) -> Result<Vec<CellOutcome>> {
    let violations = validate(plan);
    if !violations.is_empty() {
        return Err(Error::InvalidConfig(violations.join("; ")));
    }
    fs::create_dir_all(&plan.output_dir).map_err(|e| Error::io(&plan.output_dir, e))?;
    let mut outcomes = Vec::with_capacity(plan.cells.len());
    for cell in &plan.cells {
        let records = simulate_cell(cell, plan.window, plan.master_seed, plan.workers)?;
        let summary = summarize(records, plan.benchmark, plan.bins)?;
        let metadata = metadata_for(plan, cell);
        let directory = write_cell_atomically(&summary, &metadata, &plan.output_dir)?;
        outcomes.push(CellOutcome {
            cell_id: metadata.cell_id,
            directory,
            summary,
        });
    }
    Ok(outcomes)
}

fn grid(
    spec: SpaceSpec,
    particles: impl IntoIterator<Item = usize>,
    centro: bool,
    all_ranks: bool,
) -> Vec<Cell> {
    let mut cells = Vec::new();
    for n in particles {
        let ranks: Vec<usize> = if all_ranks { (1..=n).collect() } else { vec![1] };
        for k in ranks {
            for beta in [Beta::Orthogonal, Beta::Unitary] {
                cells.push(Cell {
                    config: EnsembleConfig::new(spec, n, k, beta, centro),
                    realizations: DEFAULT_REALIZATIONS,
                });
            }
        }
    }
    cells
}

/// Built-in parameter grids of the published figures and confirmation runs.
pub fn preset(name: &str) -> Option<Vec<Cell>> {
    let bosons = SpaceSpec::bosons(2);
    let cells = match name {
        "fig1" => grid(bosons, [9], false, true),
        "fig2" => grid(bosons, [9], true, true),
        "fig2a" => grid(bosons, [9], true, false),
        "fig3" => grid(SpaceSpec::fermions(6), 1..=5, false, true),
        "fig4" => grid(SpaceSpec::fermions(6), 1..=5, true, true),
        "confirm-l7" => grid(SpaceSpec::fermions(7), [6], true, true),
        "confirm-l8" => grid(SpaceSpec::fermions(8), [7], true, true),
        _ => return None,
    };
    Some(cells)
}

/// Declarative plan file (TOML). Every field is optional; explicit `cells`
/// are appended after those of `preset`.
///
/// ```toml
/// preset = "fig2a"
/// seed = 7
/// realizations = 500
///
/// [[cells]]
/// statistics = "fermion"
/// l = 6
/// n = 5
/// k = 3
/// beta = 1
/// centro = true
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub horizon: Option<f64>,
    pub grid_points: Option<usize>,
    pub refine_tolerance: Option<f64>,
    pub benchmark: Option<f64>,
    pub bins: Option<usize>,
    pub workers: Option<WorkersField>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub cells: Vec<CellEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WorkersField {
    Count(usize),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellEntry {
    pub statistics: Statistics,
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub beta: Beta,
    #[serde(default)]
    pub centro: bool,
    pub v0: Option<f64>,
    pub realizations: Option<usize>,
}

impl PlanFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Resolves presets and defaults into a plan. `realizations`, when set,
    /// applies to every cell that does not carry its own count.
    pub fn into_plan(self, default_out: &Path) -> Result<RunPlan> {
        let config_err = |reason: String| Error::InvalidConfig(reason);
        let mut cells = match &self.preset {
            Some(name) => preset(name).ok_or_else(|| config_err(format!("unknown preset {name:?}")))?,
            None => Vec::new(),
        };
        if let Some(r) = self.realizations {
            for cell in &mut cells {
                cell.realizations = r;
            }
        }
        for entry in &self.cells {
            let mut config = EnsembleConfig::new(
                SpaceSpec::new(entry.l, entry.statistics),
                entry.n,
                entry.k,
                entry.beta,
                entry.centro,
            );
            if let Some(v0) = entry.v0 {
                config.v0 = v0;
            }
            cells.push(Cell {
                config,
                realizations: entry
                    .realizations
                    .or(self.realizations)
                    .unwrap_or(DEFAULT_REALIZATIONS),
            });
        }
        let defaults = TimeWindow::default();
        let workers = match self.workers {
            None => Workers::Auto,
            Some(WorkersField::Count(n)) => Workers::Count(n),
            Some(WorkersField::Named(s)) => s.parse().map_err(config_err)?,
        };
        Ok(RunPlan {
            cells,
            window: TimeWindow {
                horizon: self.horizon.unwrap_or(defaults.horizon),
                grid_points: self.grid_points.unwrap_or(defaults.grid_points),
                refine_tolerance: self.refine_tolerance.unwrap_or(defaults.refine_tolerance),
            },
            benchmark: self.benchmark.unwrap_or(DEFAULT_BENCHMARK),
            bins: self.bins.unwrap_or(DEFAULT_BINS),
            master_seed: self.seed.unwrap_or(0),
            output_dir: self.out.unwrap_or_else(|| default_out.to_path_buf()),
            workers,
        })
    }
}
