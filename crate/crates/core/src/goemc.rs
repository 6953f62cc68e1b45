//! Monte Carlo estimate of the GOE two-level correlation in the bulk.
//!
//! Matrices have off-diagonal variance `1/(4N)` and diagonal variance
//! `1/(2N)`, so the spectrum fills `[−1, 1]` with density `(2/π)√(1−E²)`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::r2_exact;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_rule;
use crate::skewlinalg::{sym_eigenvalues, SymMatrix, MAX_EIGEN_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unfolding {
    /// `N·F(E)` with the leading finite-N correction to the level count.
    Corrected,
    /// Bare semicircle staircase `N·F(E)`.
    Semicircle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GoeConfig {
    pub matrix_size: usize,
    pub samples: usize,
    pub seed: u64,
    /// Reference levels are those with `|E| ≤ bulk_window`.
    pub bulk_window: f64,
    /// Bin width in units of the mean level spacing.
    pub bin_width: f64,
    /// Largest separation histogrammed.
    pub omega_max: f64,
    /// Lower edge of the bins compared against the exact curve.
    pub compare_min: f64,
    pub unfolding: Unfolding,
    /// Multiplies every unfolded position; `1.0` means no fault.
    pub fault_scale: f64,
    /// Fraction of bins that must lie within three standard errors.
    pub required_fraction: f64,
}

impl Default for GoeConfig {
    fn default() -> Self {
        Self {
            matrix_size: 400,
            samples: 3000,
            seed: 20240607,
            bulk_window: 0.35,
            bin_width: 0.25,
            omega_max: 3.0,
            compare_min: 0.25,
            unfolding: Unfolding::Corrected,
            fault_scale: 1.0,
            required_fraction: 0.9,
        }
    }
}

impl GoeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.matrix_size < 2 || self.matrix_size > MAX_EIGEN_DIM {
            return bad(format!("goe.matrix_size = {} outside [2, {MAX_EIGEN_DIM}]", self.matrix_size));
        }
        if self.samples < 2 {
            return bad(format!("goe.samples = {} must be at least 2", self.samples));
        }
        if !(self.bulk_window > 0.0 && self.bulk_window < 1.0) {
            return bad(format!("goe.bulk_window = {} outside (0, 1)", self.bulk_window));
        }
        if !(self.bin_width > 0.0 && self.omega_max > self.bin_width) {
            return bad("goe.bin_width must be > 0 and below goe.omega_max".into());
        }
        if !(self.compare_min >= 0.0 && self.compare_min < self.omega_max) {
            return bad("goe.compare_min must lie in [0, goe.omega_max)".into());
        }
        if !(self.fault_scale > 0.0 && self.fault_scale.is_finite()) {
            return bad("goe.fault_scale must be finite and > 0".into());
        }
        if !(self.required_fraction > 0.0 && self.required_fraction <= 1.0) {
            return bad("goe.required_fraction outside (0, 1]".into());
        }
        Ok(())
    }

    pub fn bin_count(&self) -> usize {
        (self.omega_max / self.bin_width).round() as usize
    }
}

/// Draws one GOE matrix. The upper triangle is filled row by row.
pub fn sample_goe(n: usize, rng: &mut ChaCha8Rng) -> Result<SymMatrix> {
    let off = (1.0 / (4.0 * n as f64)).sqrt();
    let diag = (1.0 / (2.0 * n as f64)).sqrt();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let z: f64 = StandardNormal.sample(rng);
            let v = z * if i == j { diag } else { off };
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SymMatrix::new(n, data)
}

/// Generator for sample `index`: one ChaCha8 stream per sample, so results
/// do not depend on the thread count.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Semicircle distribution function on `[−1, 1]`.
pub fn semicircle_cdf(e: f64) -> f64 {
    let e = e.clamp(-1.0, 1.0);
    0.5 + (e * (1.0 - e * e).sqrt() + e.asin()) / PI
}

/// Expected number of levels below `e` for size `n`.
pub fn level_count(e: f64, n: usize, unfolding: Unfolding) -> f64 {
    let bulk = n as f64 * semicircle_cdf(e);
    match unfolding {
        Unfolding::Semicircle => bulk,
        Unfolding::Corrected => bulk + 0.25 - (e.clamp(-1.0, 1.0).asin() + 0.5 * PI) / (2.0 * PI),
    }
}

/// Unfolded spectrum of one sample with its reference window.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedSample {
    /// Ascending unfolded positions.
    pub positions: Vec<f64>,
    /// Reference levels are those inside `[window.0, window.1]`.
    pub window: (f64, f64),
    /// Eigenvalues outside `[−1, 1]` that were clamped before unfolding.
    pub clipped: usize,
}

pub fn unfold(eigenvalues: &[f64], config: &GoeConfig) -> UnfoldedSample {
    let n = config.matrix_size;
    let clipped = eigenvalues.iter().filter(|e| e.abs() > 1.0).count();
    let positions = eigenvalues
        .iter()
        .map(|&e| config.fault_scale * level_count(e, n, config.unfolding))
        .collect();
    let w = config.bulk_window;
    let window = (
        config.fault_scale * level_count(-w, n, config.unfolding),
        config.fault_scale * level_count(w, n, config.unfolding),
    );
    UnfoldedSample { positions, window, clipped }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub bin_edges: Vec<f64>,
    pub r2: Vec<f64>,
    pub stderr: Vec<f64>,
    pub pair_counts: Vec<u64>,
    pub samples: usize,
    /// Mean and standard error of the unfolded level density in the window.
    pub density: (f64, f64),
    pub clipped: usize,
    pub clipped_fraction: f64,
}

impl CorrelationEstimate {
    pub fn bin_count(&self) -> usize {
        self.r2.len()
    }

    pub fn empty_bins(&self) -> Vec<usize> {
        (0..self.bin_count()).filter(|&b| self.pair_counts[b] == 0).collect()
    }
}

struct SampleTally {
    r2: Vec<f64>,
    pairs: Vec<u64>,
    density: f64,
    clipped: usize,
    levels: usize,
}

fn tally(sample: &UnfoldedSample, bins: usize, bin_width: f64) -> SampleTally {
    let (lo, hi) = sample.window;
    let len = hi - lo;
    let omega_max = bins as f64 * bin_width;
    let x = &sample.positions;
    let mut pairs = vec![0u64; bins];
    let mut references = 0usize;
    for (i, &xi) in x.iter().enumerate() {
        if xi < lo || xi > hi {
            continue;
        }
        references += 1;
        for &xj in x[i + 1..].iter().take_while(|&&xj| xj - xi < omega_max) {
            pairs[(((xj - xi) / bin_width) as usize).min(bins - 1)] += 1;
        }
        for &xj in x[..i].iter().rev().take_while(|&&xj| xi - xj < omega_max) {
            pairs[(((xi - xj) / bin_width) as usize).min(bins - 1)] += 1;
        }
    }
    let norm = 1.0 / (len * 2.0 * bin_width);
    SampleTally {
        r2: pairs.iter().map(|&c| c as f64 * norm).collect(),
        pairs,
        density: references as f64 / len,
        clipped: sample.clipped,
        levels: x.len(),
    }
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let n = count as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pair-separation histogram of already unfolded spectra, normalized so an
/// uncorrelated sequence of unit density gives 1 in every bin.
pub fn estimate_from_unfolded(samples: &[UnfoldedSample], bin_width: f64, bins: usize) -> Result<CorrelationEstimate> {
    if samples.len() < 2 {
        return Err(Error::Config("at least two samples are needed for error bars".into()));
    }
    if samples.iter().any(|s| !(s.window.1 > s.window.0)) {
        return Err(Error::Config("empty reference window".into()));
    }
    let tallies: Vec<SampleTally> = samples.par_iter().map(|s| tally(s, bins, bin_width)).collect();
    Ok(reduce(tallies, bin_width, bins))
}

fn reduce(tallies: Vec<SampleTally>, bin_width: f64, bins: usize) -> CorrelationEstimate {
    let count = tallies.len();
    let mut r2 = Vec::with_capacity(bins);
    let mut stderr = Vec::with_capacity(bins);
    let mut pair_counts = Vec::with_capacity(bins);
    for b in 0..bins {
        let (m, e) = mean_and_stderr(tallies.iter().map(|t| t.r2[b]), count);
        r2.push(m);
        stderr.push(e);
        pair_counts.push(tallies.iter().map(|t| t.pairs[b]).sum());
    }
    let density = mean_and_stderr(tallies.iter().map(|t| t.density), count);
    let clipped: usize = tallies.iter().map(|t| t.clipped).sum();
    let levels: usize = tallies.iter().map(|t| t.levels).sum();
    CorrelationEstimate {
        bin_edges: (0..=bins).map(|b| b as f64 * bin_width).collect(),
        r2,
        stderr,
        pair_counts,
        samples: count,
        density,
        clipped,
        clipped_fraction: clipped as f64 / levels.max(1) as f64,
    }
}

/// Samples, diagonalizes, unfolds and histograms. Each sample owns its
/// random stream and the reduction runs in sample order, so the output is
/// independent of the thread count.
pub fn estimate_r2(config: &GoeConfig) -> Result<CorrelationEstimate> {
    config.validate()?;
    let bins = config.bin_count();
    let tallies: Vec<SampleTally> = (0..config.samples)
        .into_par_iter()
        .map(|k| -> Result<SampleTally> {
            let mut rng = sample_rng(config.seed, k);
            let matrix = sample_goe(config.matrix_size, &mut rng)?;
            let spectrum = sym_eigenvalues(&matrix)?;
            Ok(tally(&unfold(&spectrum, config), bins, config.bin_width))
        })
        .collect::<Result<_>>()?;
    Ok(reduce(tallies, config.bin_width, bins))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    pub lo: f64,
    /// Whether the bin enters the summary statistics.
    pub included: bool,
    pub hi: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `R₂` averaged over the bin.
    pub exact: f64,
    /// `(estimate − exact)/stderr`; `None` for empty bins.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bins: Vec<BinComparison>,
    pub empty_bins: usize,
    pub fraction_within_3sigma: f64,
    pub chi2: f64,
    pub dof: usize,
    pub pass: bool,
}

/// Bin average of the exact curve by Gauss–Legendre quadrature.
pub fn exact_bin_average(lo: f64, hi: f64) -> Result<f64> {
    let rule = gauss_legendre_rule(32)?;
    let mut acc = 0.0;
    for (x, w) in rule.mapped(lo, hi) {
        acc += w * r2_exact(x)?;
    }
    Ok(acc / (hi - lo))
}

/// Compares every bin to the exact curve; only bins with lower edge at or
/// above `compare_min` enter the summary. Empty bins count as misses.
pub fn compare_to_exact(estimate: &CorrelationEstimate, compare_min: f64, required_fraction: f64) -> Result<ComparisonReport> {
    let mut bins = Vec::new();
    for b in 0..estimate.bin_count() {
        let (lo, hi) = (estimate.bin_edges[b], estimate.bin_edges[b + 1]);
        let exact = exact_bin_average(lo, hi)?;
        let z = (estimate.pair_counts[b] > 0 && estimate.stderr[b] > 0.0)
            .then(|| (estimate.r2[b] - exact) / estimate.stderr[b]);
        bins.push(BinComparison {
            lo,
            included: lo >= compare_min - 1e-12,
            hi,
            estimate: estimate.r2[b],
            stderr: estimate.stderr[b],
            exact,
            z,
        });
    }
    let used: Vec<&BinComparison> = bins.iter().filter(|b| b.included).collect();
    if used.is_empty() {
        return Err(Error::Config("no bins above compare_min".into()));
    }
    let empty_bins = used.iter().filter(|b| b.z.is_none()).count();
    let within = used.iter().filter(|b| b.z.is_some_and(|z| z.abs() <= 3.0)).count();
    let chi2 = used.iter().filter_map(|b| b.z).map(|z| z * z).sum();
    let fraction_within_3sigma = within as f64 / used.len() as f64;
    let dof = used.len() - empty_bins;
    Ok(ComparisonReport {
        dof,
        bins,
        empty_bins,
        fraction_within_3sigma,
        chi2,
        pass: fraction_within_3sigma >= required_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoeRun {
    pub estimate: CorrelationEstimate,
    pub comparison: ComparisonReport,
    /// `|density − 1| ≤ 2σ` in the reference window.
    pub density_ok: bool,
    /// More than 1% of the eigenvalues fell outside the support.
    pub excessive_clipping: bool,
    /// Below `N = 50` or 100 samples the statistics carry no weight.
    pub underpowered: bool,
}

impl GoeRun {
    pub fn pass(&self) -> bool {
        self.comparison.pass && self.density_ok
    }
}

pub fn run(config: &GoeConfig) -> Result<GoeRun> {
    let estimate = estimate_r2(config)?;
    let comparison = compare_to_exact(&estimate, config.compare_min, config.required_fraction)?;
    let (d, e) = estimate.density;
    let density_ok = (d - 1.0).abs() <= 2.0 * e;
    Ok(GoeRun {
        excessive_clipping: estimate.clipped_fraction > 0.01,
        underpowered: config.matrix_size < 50 || config.samples < 100,
        estimate,
        comparison,
        density_ok,
    })
}
