use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use egt_core::sweep::{self, PlanFile, RunPlan, Workers, PRESETS};

/// Seeded ensemble sweeps of state-transfer efficiencies in k-body embedded
/// Gaussian ensembles.
#[derive(Debug, Parser)]
#[command(name = "egt", version)]
struct Args {
    /// Built-in parameter grid (fig1, fig2, fig2a, fig3, fig4, confirm-l7, confirm-l8).
    #[arg(long)]
    preset: Option<String>,

    /// TOML plan file; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed for all realization streams.
    #[arg(long)]
    seed: Option<u64>,

    /// Realizations per cell.
    #[arg(long)]
    realizations: Option<usize>,

    /// End of the time window.
    #[arg(long)]
    horizon: Option<f64>,

    #[arg(long)]
    grid_points: Option<usize>,

    /// Histogram bins on [0, 1].
    #[arg(long)]
    bins: Option<usize>,

    /// Efficiency threshold for the reported fraction.
    #[arg(long)]
    benchmark: Option<f64>,

    /// Worker threads, or "auto".
    #[arg(long)]
    workers: Option<Workers>,

    /// Output directory; one subdirectory per cell.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Args {
    fn plan(&self) -> anyhow::Result<RunPlan> {
        let mut file = match &self.config {
            Some(path) => PlanFile::load(path)?,
            None => PlanFile::default(),
        };
        if let Some(name) = &self.preset {
            if !PRESETS.contains(&name.as_str()) {
                anyhow::bail!("unknown preset {name:?}; available: {}", PRESETS.join(", "));
            }
            file.preset = Some(name.clone());
        }
        if file.preset.is_none() && file.cells.is_empty() {
            anyhow::bail!("nothing to run: pass --preset or --config");
        }
        if self.realizations.is_some() {
            file.realizations = self.realizations;
            for cell in &mut file.cells {
                cell.realizations = None;
            }
        }
        let mut plan = file.into_plan(&PathBuf::from("egt-out"))?;
        if let Some(seed) = self.seed {
            plan.master_seed = seed;
        }
        if let Some(h) = self.horizon {
            plan.window.horizon = h;
        }
        if let Some(g) = self.grid_points {
            plan.window.grid_points = g;
        }
        if let Some(b) = self.bins {
            plan.bins = b;
        }
        if let Some(b) = self.benchmark {
            plan.benchmark = b;
        }
        if let Some(w) = self.workers {
            plan.workers = w;
        }
        if let Some(out) = &self.out {
            plan.output_dir = out.clone();
        }
        Ok(plan)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let plan = match args.plan() {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let violations = sweep::validate(&plan);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("invalid plan: {v}");
        }
        return ExitCode::from(2);
    }
    match sweep::run(&plan).context("sweep failed") {
        Ok(outcomes) => {
            for o in outcomes {
                println!(
                    "{}\tmean={:.4}\tfraction>={}: {:.4}\t{}",
                    o.cell_id,
                    o.summary.mean_best,
                    o.summary.benchmark,
                    o.summary.fraction_above_benchmark,
                    o.directory.display()
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
