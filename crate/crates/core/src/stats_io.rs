//! Ensemble summaries and their CSV / JSON serialization.
//!
//! Each cell directory holds:
//!
//! * `realizations.csv`: `realization_index,seed,best_value,best_pair_in,best_pair_out,argmax_time`
//! * `histogram.csv`: `bin_left,bin_right,count,density`
//! * `metadata.json`: configuration, run parameters and aggregate statistics
//!
//! Floats are written in shortest round-trip form, so files re-parse to the
//! exact in-memory values and identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::fock::BasisIndex;
use crate::transport::{EfficiencyRecord, TimeWindow};

pub const DEFAULT_BENCHMARK: f64 = 0.95;
pub const DEFAULT_BINS: usize = 50;

pub const REALIZATIONS_FILE: &str = "realizations.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const METADATA_FILE: &str = "metadata.json";

/// One realization's record, tagged with its index and stream seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationRecord {
    pub index: usize,
    pub seed: u64,
    pub efficiency: EfficiencyRecord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
}

impl Histogram {
    /// Fixed-width bins on [0, 1]; the last bin is closed on the right and
    /// values are clamped into range.
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        let bin_edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
        let mut counts = vec![0usize; bins];
        for &v in values {
            let slot = (v.clamp(0.0, 1.0) * bins as f64).floor() as usize;
            counts[slot.min(bins - 1)] += 1;
        }
        let total = values.len() as f64;
        let density = counts
            .iter()
            .zip(bin_edges.windows(2))
            .map(|(&c, w)| c as f64 / (total * (w[1] - w[0])))
            .collect();
        Histogram {
            bin_edges,
            counts,
            density,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

/// Unordered basis-state pair keyed as `(smaller, larger)`.
pub type PairKey = (BasisIndex, BasisIndex);

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    pub records: Vec<RealizationRecord>,
    pub histogram: Histogram,
    pub mean_best: f64,
    pub benchmark: f64,
    pub fraction_above_benchmark: f64,
    pub pair_tally: BTreeMap<PairKey, usize>,
}

pub fn summarize(
    records: Vec<RealizationRecord>,
    benchmark: f64,
    bins: usize,
) -> Result<EnsembleSummary> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if !(benchmark > 0.0 && benchmark < 1.0) {
        return Err(Error::InvalidBenchmark(benchmark));
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bins ≥ 1".into()));
    }
    let values: Vec<f64> = records.iter().map(|r| r.efficiency.best_value).collect();
    let total = values.len() as f64;
    let mean_best = values.iter().sum::<f64>() / total;
    let above = values.iter().filter(|&&v| v >= benchmark).count();
    let mut pair_tally = BTreeMap::new();
    for r in &records {
        let (a, b) = r.efficiency.best_pair;
        *pair_tally.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    }
    Ok(EnsembleSummary {
        histogram: Histogram::from_values(&values, bins),
        records,
        mean_best,
        benchmark,
        fraction_above_benchmark: above as f64 / total,
        pair_tally,
    })
}

/// Everything needed to reproduce a cell, written alongside its summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub artifact_version: String,
    pub cell_id: String,
    pub config: EnsembleConfig,
    pub realizations: usize,
    pub window: TimeWindow,
    pub master_seed: u64,
    pub bins: usize,
    /// Set when the realization count is an assumption rather than a
    /// published value.
    pub realization_count_assumed: bool,
}

#[derive(Serialize)]
struct MetadataFile<'a> {
    #[serde(flatten)]
    run: &'a RunMetadata,
    benchmark: f64,
    mean_best: f64,
    fraction_above_benchmark: f64,
    pair_tally: BTreeMap<String, usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RealizationRow {
    realization_index: usize,
    seed: u64,
    best_value: f64,
    best_pair_in: BasisIndex,
    best_pair_out: BasisIndex,
    argmax_time: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct HistogramRow {
    bin_left: f64,
    bin_right: f64,
    count: usize,
    density: f64,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>, path: &Path) -> Result<Vec<u8>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(csv_err)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(bytes).map_err(|e| Error::io(path, e))?;
    file.sync_all().map_err(|e| Error::io(path, e))
}

/// Writes the three summary files into `dir`, creating it if needed.
pub fn write_summary(summary: &EnsembleSummary, metadata: &RunMetadata, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join(REALIZATIONS_FILE);
    let rows = summary.records.iter().map(|r| RealizationRow {
        realization_index: r.index,
        seed: r.seed,
        best_value: r.efficiency.best_value,
        best_pair_in: r.efficiency.best_pair.0,
        best_pair_out: r.efficiency.best_pair.1,
        argmax_time: r.efficiency.argmax_time,
    });
    write_file(&path, &csv_bytes(rows, &path)?)?;

    let path = dir.join(HISTOGRAM_FILE);
    let h = &summary.histogram;
    let rows = (0..h.bins()).map(|i| HistogramRow {
        bin_left: h.bin_edges[i],
        bin_right: h.bin_edges[i + 1],
        count: h.counts[i],
        density: h.density[i],
    });
    write_file(&path, &csv_bytes(rows, &path)?)?;

    let path = dir.join(METADATA_FILE);
    let file = MetadataFile {
        run: metadata,
        benchmark: summary.benchmark,
        mean_best: summary.mean_best,
        fraction_above_benchmark: summary.fraction_above_benchmark,
        pair_tally: summary
            .pair_tally
            .iter()
            .map(|(&(a, b), &c)| (format!("{a}-{b}"), c))
            .collect(),
    };
    let mut json = serde_json::to_vec_pretty(&file)?;
    json.push(b'\n');
    write_file(&path, &json)
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
}

/// Parses a `realizations.csv`; pair matrices are not stored, so `per_pair`
/// comes back empty.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RealizationRecord>> {
    let rows: Vec<RealizationRow> = read_rows(path.as_ref())?;
    Ok(rows
        .into_iter()
        .map(|r| RealizationRecord {
            index: r.realization_index,
            seed: r.seed,
            efficiency: EfficiencyRecord {
                best_value: r.best_value,
                best_pair: (r.best_pair_in, r.best_pair_out),
                argmax_time: r.argmax_time,
                per_pair: None,
            },
        })
        .collect())
}

pub fn read_histogram(path: impl AsRef<Path>) -> Result<Histogram> {
    let path = path.as_ref();
    let rows: Vec<HistogramRow> = read_rows(path)?;
    let mut bin_edges = Vec::with_capacity(rows.len() + 1);
    for (i, row) in rows.iter().enumerate() {
        if i == 0 {
            bin_edges.push(row.bin_left);
        } else if bin_edges[i] != row.bin_left {
            return Err(Error::Parse {
                path: PathBuf::from(path),
                reason: format!("bin {i} does not start where bin {} ends", i - 1),
            });
        }
        bin_edges.push(row.bin_right);
    }
    Ok(Histogram {
        bin_edges,
        counts: rows.iter().map(|r| r.count).collect(),
        density: rows.iter().map(|r| r.density).collect(),
    })
}
