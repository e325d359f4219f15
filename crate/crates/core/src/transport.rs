//! Transfer efficiencies `max_{t in [0,T]} |<out| exp(-iHt) |in>|²`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::ManyBodyHamiltonian;
use crate::fock::BasisIndex;

/// Efficiencies closer than this are treated as ties and resolved by the
/// lexicographically smallest pair.
pub const PAIR_TIE_TOLERANCE: f64 = 1e-9;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Time window and maximization controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub horizon: f64,
    pub grid_points: usize,
    /// Width, in time, at which the bracketed refinement stops.
    pub refine_tolerance: f64,
}

impl Default for TimeWindow {
    fn default() -> Self {
        TimeWindow {
            horizon: 15.0,
            grid_points: 2001,
            refine_tolerance: 1e-6,
        }
    }
}

impl TimeWindow {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            out.push("horizon > 0".to_string());
        }
        if self.grid_points < 2 {
            out.push("grid points ≥ 2".to_string());
        }
        if self.refine_tolerance.is_nan() || self.refine_tolerance <= 0.0 {
            out.push("refine tolerance > 0".to_string());
        }
        out
    }

    fn time(&self, i: usize) -> f64 {
        self.horizon * i as f64 / (self.grid_points - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyQuery {
    pub input: BasisIndex,
    pub output: BasisIndex,
    pub window: TimeWindow,
}

/// Best transfer of one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyRecord {
    pub best_value: f64,
    /// `(input, output)`.
    pub best_pair: (BasisIndex, BasisIndex),
    pub argmax_time: f64,
    /// `per_pair[(input, output)]`; the diagonal is left at zero.
    pub per_pair: Option<DMatrix<f64>>,
}

/// Spectral data shifted to zero mean energy, plus the phase table on the grid.
struct Evolution<'a> {
    energies: Vec<f64>,
    vectors: &'a DMatrix<Complex64>,
    window: TimeWindow,
    // phases[i * dim + m] = exp(-i E_m t_i)
    phases: Vec<Complex64>,
}

impl<'a> Evolution<'a> {
    fn new(h: &'a ManyBodyHamiltonian, window: TimeWindow) -> Self {
        let dim = h.dimension();
        let mean = h.eigenvalues.iter().sum::<f64>() / dim as f64;
        let energies: Vec<f64> = h.eigenvalues.iter().map(|e| e - mean).collect();
        let mut phases = Vec::with_capacity(window.grid_points * dim);
        for i in 0..window.grid_points {
            let t = window.time(i);
            phases.extend(energies.iter().map(|e| Complex64::cis(-e * t)));
        }
        Evolution {
            energies,
            vectors: &h.eigenvectors,
            window,
            phases,
        }
    }

    fn weights(&self, input: BasisIndex, output: BasisIndex) -> Vec<Complex64> {
        let v = self.vectors;
        (0..self.energies.len())
            .map(|m| v[(output, m)] * v[(input, m)].conj())
            .collect()
    }

    fn probability_at(&self, weights: &[Complex64], t: f64) -> f64 {
        weights
            .iter()
            .zip(&self.energies)
            .map(|(w, e)| w * Complex64::cis(-e * t))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Grid scan, then golden-section refinement around the best sample
    /// (earliest on ties).
    fn maximize(&self, weights: &[Complex64]) -> (f64, f64) {
        let dim = weights.len();
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, row) in self.phases.chunks_exact(dim).enumerate() {
            let p = weights
                .iter()
                .zip(row)
                .map(|(w, z)| w * z)
                .sum::<Complex64>()
                .norm_sqr();
            if p > best.0 {
                best = (p, i);
            }
        }
        let (value, time) = self.refine(weights, best.1, best.0);
        (value.clamp(0.0, 1.0), time)
    }

    /// Golden-section search on `[t_{i-1}, t_{i+1}]`; never returns less than
    /// the grid sample itself.
    fn refine(&self, weights: &[Complex64], i: usize, sample: f64) -> (f64, f64) {
        let grid = self.window.grid_points;
        let mut lo = self.window.time(i.saturating_sub(1));
        let mut hi = self.window.time((i + 1).min(grid - 1));
        let f = |t: f64| self.probability_at(weights, t);

        let mut x1 = hi - INV_GOLDEN * (hi - lo);
        let mut x2 = lo + INV_GOLDEN * (hi - lo);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        while hi - lo > self.window.refine_tolerance {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_GOLDEN * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_GOLDEN * (hi - lo);
                f1 = f(x1);
            }
        }
        let (value, time) = if f1 >= f2 { (f1, x1) } else { (f2, x2) };
        if value > sample {
            (value, time)
        } else {
            (sample, self.window.time(i))
        }
    }
}

/// Efficiency of one input/output pair and the time at which it is attained.
///
/// Panics if either index is outside the Hamiltonian's dimension.
pub fn pair_efficiency(h: &ManyBodyHamiltonian, query: &EfficiencyQuery) -> (f64, f64) {
    let dim = h.dimension();
    assert!(
        query.input < dim && query.output < dim,
        "pair ({}, {}) outside dimension {dim}",
        query.input,
        query.output
    );
    let evolution = Evolution::new(h, query.window);
    let weights = evolution.weights(query.input, query.output);
    evolution.maximize(&weights)
}

/// Best efficiency over all ordered pairs of distinct basis states.
///
/// A complex hermitian H need not transfer equally well in both directions,
/// so `(input, output)` and `(output, input)` are evaluated separately. Ties
/// within [`PAIR_TIE_TOLERANCE`] go to the lexicographically smallest pair.
pub fn best_efficiency(h: &ManyBodyHamiltonian, window: TimeWindow) -> EfficiencyRecord {
    let dim = h.dimension();
    let evolution = Evolution::new(h, window);
    let mut per_pair = DMatrix::<f64>::zeros(dim, dim);
    let mut best = EfficiencyRecord {
        best_value: f64::NEG_INFINITY,
        best_pair: (0, 0),
        argmax_time: 0.0,
        per_pair: None,
    };
    for input in 0..dim {
        for output in (0..dim).filter(|&o| o != input) {
            let (value, time) = evolution.maximize(&evolution.weights(input, output));
            per_pair[(input, output)] = value;
            if value > best.best_value + PAIR_TIE_TOLERANCE {
                best.best_value = value;
                best.best_pair = (input, output);
                best.argmax_time = time;
            }
        }
    }
    if dim < 2 {
        best.best_value = 0.0;
    }
    best.per_pair = Some(per_pair);
    best
}

/// Largest absolute residual of the least-squares line through the sorted
/// eigenvalues `E_m ≈ a m + b`.
pub fn spectral_linearity(h: &ManyBodyHamiltonian) -> f64 {
    let e = h.eigenvalues.as_slice();
    let n = e.len();
    if n <= 2 {
        return 0.0;
    }
    let mean_m = (n - 1) as f64 / 2.0;
    let mean_e = e.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (m, &y) in e.iter().enumerate() {
        let dx = m as f64 - mean_m;
        sxy += dx * (y - mean_e);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    e.iter()
        .enumerate()
        .map(|(m, &y)| (y - (mean_e + slope * (m as f64 - mean_m))).abs())
        .fold(0.0, f64::max)
}

/// [`spectral_linearity`] divided by the spectral width.
pub fn relative_spectral_linearity(h: &ManyBodyHamiltonian) -> f64 {
    let e = h.eigenvalues.as_slice();
    let width = e[e.len() - 1] - e[0];
    if width == 0.0 {
        0.0
    } else {
        spectral_linearity(h) / width
    }
}

/// `U(t) = V diag(exp(-i E t)) V†`.
pub fn propagator(h: &ManyBodyHamiltonian, t: f64) -> DMatrix<Complex64> {
    let phases = h.eigenvalues.map(|e| Complex64::cis(-e * t));
    let scaled = DMatrix::from_fn(h.dimension(), h.dimension(), |i, m| {
        h.eigenvectors[(i, m)] * phases[m]
    });
    scaled * h.eigenvectors.adjoint()
}
