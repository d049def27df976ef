//! Ensemble statistics of the voluntary error: state ensembles, per-sample
//! evaluation, histograms, bootstrap intervals, power-law and linear fits,
//! and the landscape of optimal measurement directions.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{
    on_subsystem, reference_min_both, score_set, voluntary_error_both, Measure, ReferenceOptions,
};
use crate::linalg::Subsystem;
use crate::measurements::{EarmarkedSet, QubitProjectorParams, SetKind};
use crate::rng;
use crate::states::{
    be_2x4, be_3x3_horodecki, be_3x3_tiles, classify_ppt, sample_correlator_state, sample_haar_mixed_with,
    sample_rho_m, Axis, BipartiteDensityMatrix, PptClass,
};
use crate::{Error, Result};

/// Fewest states a filtered ensemble may contain.
pub const MIN_FILTERED_SAMPLES: usize = 100;

/// Draw budget of a filtered ensemble, as a multiple of the requested size.
pub const FILTER_DRAW_FACTOR: usize = 20;

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PptFilter {
    All,
    Ppt,
    Nppt,
}

impl PptFilter {
    pub fn accepts(self, class: PptClass) -> bool {
        match self {
            PptFilter::All => true,
            PptFilter::Ppt => class == PptClass::Ppt,
            PptFilter::Nppt => class == PptClass::Nppt,
        }
    }
}

impl std::fmt::Display for PptFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PptFilter::All => "ALL",
            PptFilter::Ppt => "PPT",
            PptFilter::Nppt => "NPPT",
        })
    }
}

/// Which random states to draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Haar-induced states of fixed rank.
    Haar { d_a: usize, d_b: usize, rank: usize },
    /// Nine-parameter correlator states, rejection sampled.
    Correlator,
    /// Correlator states with both magnetizations along one axis.
    RhoM { axis: Axis },
}

/// Ensemble description: family, PPT filter, size and seed.
///
/// Without a filter, states `0..samples` are drawn. With a filter, stream
/// indices are scanned in order until `samples` states pass, giving up after
/// `20 · samples` draws; fewer than 100 accepted states is an error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub filter: PptFilter,
    pub samples: usize,
    pub seed: u64,
}

/// One ensemble member.
#[derive(Clone, Debug)]
pub struct Sample {
    pub sample_id: u64,
    pub rank: usize,
    pub ppt: PptClass,
    pub state: BipartiteDensityMatrix,
}

impl EnsembleSpec {
    pub fn haar(d_a: usize, d_b: usize, rank: usize, filter: PptFilter, samples: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::Haar { d_a, d_b, rank },
            filter,
            samples,
            seed,
        }
    }

    pub fn draw_one(&self, index: u64) -> Result<Sample> {
        let mut rng = rng::stream(self.seed, index);
        let (state, rank) = match self.kind {
            EnsembleKind::Haar { d_a, d_b, rank } => (sample_haar_mixed_with(d_a, d_b, rank, &mut rng)?, rank),
            EnsembleKind::Correlator => {
                let (_, s) = sample_correlator_state(&mut rng);
                let r = s.numerical_rank(1e-10);
                (s, r)
            }
            EnsembleKind::RhoM { axis } => {
                let (_, s) = sample_rho_m(axis, &mut rng);
                let r = s.numerical_rank(1e-10);
                (s, r)
            }
        };
        Ok(Sample {
            sample_id: index,
            rank,
            ppt: classify_ppt(&state),
            state,
        })
    }

    pub fn draw(&self) -> Result<Vec<Sample>> {
        if let EnsembleKind::Haar { d_a, d_b, rank } = self.kind {
            if rank == 0 || rank > d_a * d_b {
                return Err(Error::InvalidRank { rank, dim: d_a * d_b });
            }
        }
        if self.filter == PptFilter::All {
            return (0..self.samples as u64).map(|i| self.draw_one(i)).collect();
        }
        let budget = (self.samples * FILTER_DRAW_FACTOR) as u64;
        let mut out = Vec::with_capacity(self.samples);
        let mut index = 0;
        while out.len() < self.samples && index < budget {
            let s = self.draw_one(index)?;
            if self.filter.accepts(s.ppt) {
                out.push(s);
            }
            index += 1;
        }
        if out.len() < MIN_FILTERED_SAMPLES.min(self.samples) {
            return Err(Error::InsufficientSamples {
                got: out.len(),
                needed: MIN_FILTERED_SAMPLES.min(self.samples),
            });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Per-sample evaluation
// ---------------------------------------------------------------------------

/// Constrained values (per set) and reference values of one state, indexed
/// by [`Measure`] as `[QD, QWD]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleEval {
    pub sample_id: u64,
    pub rank: usize,
    pub ppt: PptClass,
    pub actual: Option<[f64; 2]>,
    pub actual_params: Option<[QubitProjectorParams; 2]>,
    pub constrained: Vec<[f64; 2]>,
}

fn idx(m: Measure) -> usize {
    match m {
        Measure::Qd => 0,
        Measure::Qwd => 1,
    }
}

impl SampleEval {
    pub fn actual(&self, m: Measure) -> Option<f64> {
        self.actual.map(|a| a[idx(m)])
    }

    pub fn constrained(&self, set: usize, m: Measure) -> f64 {
        self.constrained[set][idx(m)]
    }

    /// `|Q_c − Q_a|` for set number `set`.
    pub fn ve(&self, set: usize, m: Measure) -> Option<f64> {
        self.actual(m).map(|a| (self.constrained(set, m) - a).abs())
    }

    pub fn optimizer(&self, m: Measure) -> Option<QubitProjectorParams> {
        self.actual_params.map(|p| p[idx(m)])
    }
}

/// Evaluates every sample against every set (and the reference minimum when
/// `reference` is given), in parallel on the current rayon pool; output
/// order follows the input order.
pub fn evaluate_samples(
    samples: &[Sample],
    sets: &[EarmarkedSet],
    reference: Option<&ReferenceOptions>,
) -> Result<Vec<SampleEval>> {
    samples
        .par_iter()
        .map(|s| {
            let constrained = sets
                .iter()
                .map(|set| {
                    let scores = score_set(&s.state, set)?;
                    Ok(Measure::BOTH.map(|m| scores.iter().map(|x| x.get(m)).fold(f64::INFINITY, f64::min)))
                })
                .collect::<Result<Vec<_>>>()?;
            let (actual, actual_params) = match reference {
                Some(opts) => {
                    let [qd, qwd] = reference_min_both(&s.state, opts)?;
                    let params = match (qd.params, qwd.params) {
                        (Some(a), Some(b)) => Some([a, b]),
                        _ => None,
                    };
                    (Some([qd.value, qwd.value]), params)
                }
                None => (None, None),
            };
            Ok(SampleEval {
                sample_id: s.sample_id,
                rank: s.rank,
                ppt: s.ppt,
                actual,
                actual_params,
                constrained,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

/// Uniform-bin histogram with density normalisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Self {
            lo,
            hi,
            counts: vec![0; bins],
        }
    }

    pub fn from_values(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut h = Self::new(lo, hi, bins);
        values.iter().for_each(|&v| h.add(v));
        h
    }

    /// Values outside `[lo, hi]` are clamped into the edge bins.
    pub fn add(&mut self, v: f64) {
        let bins = self.counts.len();
        let t = ((v - self.lo) / (self.hi - self.lo) * bins as f64).floor();
        let i = if t.is_nan() {
            0
        } else {
            t.clamp(0.0, (bins - 1) as f64) as usize
        };
        self.counts[i] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|i| self.lo + i as f64 * self.width())
            .collect()
    }

    pub fn densities(&self) -> Vec<f64> {
        let norm = self.total() as f64 * self.width();
        self.counts
            .iter()
            .map(|&c| if norm > 0.0 { c as f64 / norm } else { 0.0 })
            .collect()
    }
}

/// Mean voluntary error of an ensemble with its distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorStats {
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub max: f64,
    pub histogram: Histogram,
    pub rank: Option<usize>,
    pub ppt_class: PptFilter,
}

pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl ErrorStats {
    /// Histogram: 100 uniform bins on `[0, 1]`.
    pub fn from_errors(ve: &[f64], rank: Option<usize>, ppt_class: PptFilter) -> Result<Self> {
        if ve.is_empty() {
            return Err(Error::InsufficientSamples { got: 0, needed: 1 });
        }
        let (mean, stderr) = mean_stderr(ve);
        Ok(Self {
            samples: ve.len(),
            mean,
            stderr,
            max: ve.iter().copied().fold(0.0, f64::max),
            histogram: Histogram::from_values(ve, 0.0, 1.0, 100),
            rank,
            ppt_class,
        })
    }
}

/// Draws the ensemble, evaluates it against `set` and the reference
/// minimum, and summarises the voluntary error of `measure`.
pub fn average_ve(
    spec: &EnsembleSpec,
    set: &EarmarkedSet,
    measure: Measure,
    reference: &ReferenceOptions,
) -> Result<ErrorStats> {
    let samples = spec.draw()?;
    let evals = evaluate_samples(&samples, std::slice::from_ref(set), Some(reference))?;
    let ve: Vec<f64> = evals.iter().filter_map(|e| e.ve(0, measure)).collect();
    let rank = match spec.kind {
        EnsembleKind::Haar { rank, .. } => Some(rank),
        _ => None,
    };
    ErrorStats::from_errors(&ve, rank, spec.filter)
}

/// Percentile bootstrap interval of the mean.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    bootstrap_ci(resamples, level, seed, |rng| resample_mean(values, rng))
}

/// Percentile bootstrap interval of `mean(b) − mean(a)` for independent
/// samples.
pub fn bootstrap_diff_ci(a: &[f64], b: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    bootstrap_ci(resamples, level, seed, |rng| {
        resample_mean(b, rng) - resample_mean(a, rng)
    })
}

/// Percentile bootstrap interval of `mean(b_i − a_i)` for paired samples.
pub fn bootstrap_paired_diff_ci(a: &[f64], b: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    bootstrap_mean_ci(&d, resamples, level, seed)
}

fn resample_mean(values: &[f64], rng: &mut rng::StreamRng) -> f64 {
    let n = values.len();
    (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64
}

fn bootstrap_ci(
    resamples: usize,
    level: f64,
    seed: u64,
    mut stat: impl FnMut(&mut rng::StreamRng) -> f64,
) -> (f64, f64) {
    let mut rng = rng::stream(rng::derive_seed(seed, "bootstrap"), 0);
    let mut stats: Vec<f64> = (0..resamples).map(|_| stat(&mut rng)).collect();
    stats.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (resamples - 1) as f64;
        let (i, frac) = (pos.floor() as usize, pos.fract());
        if i + 1 < resamples {
            stats[i] * (1.0 - frac) + stats[i + 1] * frac
        } else {
            stats[i]
        }
    };
    let tail = 0.5 * (1.0 - level);
    (q(tail), q(1.0 - tail))
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

/// Ordinary least-squares line with standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_stderr: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{n} abscissae, {} ordinates",
            ys.len()
        )));
    }
    if n < 3 {
        return Err(Error::DegenerateFit(format!("{n} points, need >= 3")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = rss / (nf - 2.0);
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        residual_stderr: s2.sqrt(),
    })
}

/// `mean_ve = m · n2 + c` over `(n2, mean_ve)` pairs.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    linear_fit(&xs, &ys)
}

/// `ε̄_n = ε̄_∞ + κ n^{−τ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub kappa: f64,
    pub tau: f64,
    pub eps_inf: f64,
    pub kappa_err: f64,
    pub tau_err: f64,
    pub residual_stderr: f64,
    /// Set when `tau_err > 0.1 · tau`.
    pub flagged: bool,
}

/// Least squares of `ln(ε̄_n − ε̄_∞)` against `ln n` with `ε̄_∞` held fixed.
pub fn fit_power_law(points: &[(f64, f64)], eps_inf: f64) -> Result<PowerLawFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} points, need >= 4", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, mean) in points {
        if mean <= eps_inf {
            return Err(Error::NegativeResidual {
                n,
                mean,
                asymptote: eps_inf,
            });
        }
        xs.push(n.ln());
        ys.push((mean - eps_inf).ln());
    }
    let line = linear_fit(&xs, &ys)?;
    let kappa = line.intercept.exp();
    let tau = -line.slope;
    Ok(PowerLawFit {
        kappa,
        tau,
        eps_inf,
        kappa_err: kappa * line.intercept_stderr,
        tau_err: line.slope_stderr,
        residual_stderr: line.residual_stderr,
        flagged: line.slope_stderr > 0.1 * tau.abs(),
    })
}

/// Mean error per set size together with the asymptote and the fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    pub points: Vec<ScalingPoint>,
    pub eps_inf: f64,
    pub eps_inf_stderr: f64,
    pub fit: PowerLawFit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub mean_ve: f64,
    pub stderr: f64,
}

/// Scaling of the mean error with the size of a family of sets. The last
/// entry of `sets` is the large-n stand-in for the asymptote and is not
/// part of the fit.
pub fn scaling_from_evals(evals: &[SampleEval], sets: &[EarmarkedSet], measure: Measure) -> Result<ScalingResult> {
    if sets.len() < 5 {
        return Err(Error::DegenerateFit(
            "need >= 4 set sizes plus the asymptote set".into(),
        ));
    }
    let summary = |k: usize| -> (f64, f64) {
        let ve: Vec<f64> = evals.iter().filter_map(|e| e.ve(k, measure)).collect();
        mean_stderr(&ve)
    };
    let last = sets.len() - 1;
    let (eps_inf, eps_inf_stderr) = summary(last);
    let points: Vec<ScalingPoint> = (0..last)
        .map(|k| {
            let (mean_ve, stderr) = summary(k);
            ScalingPoint {
                n: sets[k].len(),
                mean_ve,
                stderr,
            }
        })
        .collect();
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_ve)).collect();
    let fit = fit_power_law(&pairs, eps_inf)?;
    Ok(ScalingResult {
        points,
        eps_inf,
        eps_inf_stderr,
        fit,
    })
}

// ---------------------------------------------------------------------------
// Optimizer landscape
// ---------------------------------------------------------------------------

/// Width of the disc-shaped marked regions.
pub const REGION_OMEGA: f64 = 0.3;

/// Index (1–5) of the first marked region containing a folded point, if
/// any: the two polar bands `|f_θ| ≥ 0.9` and discs of radius 0.3 around
/// `(0, 0)`, `(0, π)`, `(0, π/2)`.
pub fn marked_region(p: QubitProjectorParams) -> Option<usize> {
    let p = p.folded();
    let (f, phi) = (p.f_theta, p.phi);
    let w2 = REGION_OMEGA * REGION_OMEGA;
    if f <= -0.9 {
        Some(1)
    } else if f >= 0.9 {
        Some(2)
    } else if f * f + phi * phi <= w2 {
        Some(3)
    } else if f * f + (phi - PI).powi(2) <= w2 {
        Some(4)
    } else if f * f + (phi - PI / 2.0).powi(2) <= w2 {
        Some(5)
    } else {
        None
    }
}

/// 2-D histogram of optimal measurement directions on
/// `f_θ ∈ [−1, 1] × φ ∈ [0, π)` after antipodal folding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Landscape {
    pub f_bins: usize,
    pub phi_bins: usize,
    pub counts: Vec<u64>,
    pub points: Vec<QubitProjectorParams>,
}

impl Landscape {
    pub fn new(f_bins: usize, phi_bins: usize) -> Self {
        Self {
            f_bins,
            phi_bins,
            counts: vec![0; f_bins * phi_bins],
            points: Vec::new(),
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = QubitProjectorParams>, f_bins: usize, phi_bins: usize) -> Self {
        let mut l = Self::new(f_bins, phi_bins);
        points.into_iter().for_each(|p| l.add(p));
        l
    }

    pub fn add(&mut self, p: QubitProjectorParams) {
        let p = p.folded();
        let fi = (((p.f_theta + 1.0) / 2.0 * self.f_bins as f64).floor() as usize).min(self.f_bins - 1);
        let pj = ((p.phi / PI * self.phi_bins as f64).floor() as usize).min(self.phi_bins - 1);
        self.counts[fi * self.phi_bins + pj] += 1;
        self.points.push(p);
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn bin_area(&self) -> f64 {
        (2.0 / self.f_bins as f64) * (PI / self.phi_bins as f64)
    }

    /// Probability density of bin `(i, j)`; integrates to one.
    pub fn density(&self, i: usize, j: usize) -> f64 {
        let t = self.total();
        if t == 0 {
            return 0.0;
        }
        self.counts[i * self.phi_bins + j] as f64 / (t as f64 * self.bin_area())
    }

    /// Marginal density over `f_θ`.
    pub fn marginal_f_theta(&self) -> Vec<f64> {
        let w = 2.0 / self.f_bins as f64;
        let t = self.total().max(1) as f64;
        (0..self.f_bins)
            .map(|i| {
                (0..self.phi_bins)
                    .map(|j| self.counts[i * self.phi_bins + j])
                    .sum::<u64>() as f64
                    / (t * w)
            })
            .collect()
    }

    /// Marginal density over `φ`.
    pub fn marginal_phi(&self) -> Vec<f64> {
        let w = PI / self.phi_bins as f64;
        let t = self.total().max(1) as f64;
        (0..self.phi_bins)
            .map(|j| {
                (0..self.f_bins)
                    .map(|i| self.counts[i * self.phi_bins + j])
                    .sum::<u64>() as f64
                    / (t * w)
            })
            .collect()
    }

    /// Fraction of optimizers inside each marked region (index 0 is region
    /// 1) and inside their union.
    pub fn region_fractions(&self) -> ([f64; 5], f64) {
        let n = self.points.len().max(1) as f64;
        let mut per = [0.0; 5];
        let mut union = 0.0;
        for p in &self.points {
            if let Some(r) = marked_region(*p) {
                per[r - 1] += 1.0;
                union += 1.0;
            }
        }
        (per.map(|c| c / n), union / n)
    }
}

/// Optimizer landscape of one measure over an evaluated ensemble.
pub fn optimizer_landscape(evals: &[SampleEval], measure: Measure) -> Landscape {
    Landscape::from_points(evals.iter().filter_map(|e| e.optimizer(measure)), 40, 40)
}

// ---------------------------------------------------------------------------
// One-parameter sweeps
// ---------------------------------------------------------------------------

/// One-parameter bound-entangled families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeFamily {
    /// `be_2x4(b)`, `b ∈ [0, 1]`.
    Be24,
    /// `be_3x3_tiles(a)`, `a ∈ [0, 1]`.
    Tiles,
    /// `be_3x3_horodecki(α)`, `α ∈ [0, 5]`.
    Horodecki,
}

impl BeFamily {
    pub fn state(self, x: f64) -> Result<BipartiteDensityMatrix> {
        match self {
            BeFamily::Be24 => be_2x4(x),
            BeFamily::Tiles => be_3x3_tiles(x),
            BeFamily::Horodecki => be_3x3_horodecki(x),
        }
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            BeFamily::Horodecki => (0.0, 5.0),
            _ => (0.0, 1.0),
        }
    }
}

/// Constrained and reference values of one measure at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub value_constrained: f64,
    pub value_actual: f64,
    pub ve: f64,
    /// Index of the minimising element of the set.
    pub optimal_index: usize,
}

/// `lo, lo + step, …` up to `hi` (inclusive when it lands on the grid).
pub fn param_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || hi.is_nan() || lo.is_nan() || hi < lo {
        return Err(Error::OutOfRange(format!("bad sweep range [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect())
}

/// Sweeps a family over `params`, measuring on `measured`, and returns the
/// QD and QWD points at each value.
pub fn be_sweep(
    family: BeFamily,
    params: &[f64],
    measured: Subsystem,
    set: &EarmarkedSet,
    reference: &ReferenceOptions,
) -> Result<Vec<[SweepPoint; 2]>> {
    params
        .par_iter()
        .map(|&x| {
            let rho = on_subsystem(&family.state(x)?, measured);
            let evals = voluntary_error_both(&rho, set, reference)?;
            Ok(evals.map(|e| SweepPoint {
                param: x,
                value_constrained: e.value_constrained,
                value_actual: e.value_actual.unwrap_or(f64::NAN),
                ve: e.ve.unwrap_or(f64::NAN),
                optimal_index: e.optimal_basis_index,
            }))
        })
        .collect()
}

/// First parameter at which `ve` exceeds `threshold`.
pub fn onset(points: &[SweepPoint], threshold: f64) -> Option<f64> {
    points.iter().find(|p| p.ve > threshold).map(|p| p.param)
}

/// Point of largest `ve`.
pub fn argmax_ve(points: &[SweepPoint]) -> Option<SweepPoint> {
    points.iter().copied().max_by(|a, b| a.ve.total_cmp(&b.ve))
}

/// Midpoints between consecutive sweep points whose optimal set element
/// differs, with the indices before and after.
pub fn index_switches(points: &[SweepPoint]) -> Vec<(f64, usize, usize)> {
    points
        .windows(2)
        .filter(|w| w[0].optimal_index != w[1].optimal_index)
        .map(|w| (0.5 * (w[0].param + w[1].param), w[0].optimal_index, w[1].optimal_index))
        .collect()
}

/// Short label of a set family for CSV output.
pub fn set_kind_label(kind: SetKind) -> &'static str {
    match kind {
        SetKind::CircleFixedFTheta => "circle_fixed_ftheta",
        SetKind::CircleFixedPhi => "circle_fixed_phi",
        SetKind::DiscStack => "disc_stack",
        SetKind::SphereGrid => "sphere_grid",
        SetKind::Triad => "triad",
        SetKind::SpinTriad => "spin_triad",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_integrates_to_one() {
        let h = Histogram::from_values(&[0.0, 0.01, 0.5, 0.999, 1.0], 0.0, 1.0, 100);
        let integral: f64 = h.densities().iter().map(|d| d * h.width()).sum();
        assert!((integral - 1.0).abs() < 1e-12);
        assert_eq!(h.counts[99], 2);
        assert_eq!(h.edges().len(), 101);
    }

    #[test]
    fn power_law_recovery() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&n| (n, 0.05 + 0.2 * n.powf(-1.9)))
            .collect();
        let fit = fit_power_law(&pts, 0.05).unwrap();
        assert!((fit.tau - 1.9).abs() < 1e-6);
        assert!((fit.kappa - 0.2).abs() < 1e-6);
        assert!(!fit.flagged);
        assert!(matches!(fit_power_law(&pts, 0.06), Err(Error::NegativeResidual { .. })));
    }

    #[test]
    fn linear_recovery() {
        let pts: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, 0.12 - 1.1e-3 * i as f64)).collect();
        let fit = fit_linear(&pts).unwrap();
        assert!((fit.slope + 1.1e-3).abs() < 1e-12);
        assert!((fit.intercept - 0.12).abs() < 1e-12);
        assert!(fit_linear(&pts[..2]).is_err());
    }

    #[test]
    fn bootstrap_brackets_mean() {
        let v: Vec<f64> = (0..500).map(|i| (i % 10) as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&v, 1000, 0.95, 3);
        assert!(lo < 4.5 && 4.5 < hi);
        let w: Vec<f64> = v.iter().map(|x| x + 1.0).collect();
        let (dlo, _) = bootstrap_diff_ci(&v, &w, 1000, 0.95, 3);
        assert!(dlo > 0.0);
        let (plo, phi) = bootstrap_paired_diff_ci(&v, &w, 200, 0.95, 3);
        assert!((plo - 1.0).abs() < 1e-12 && (phi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regions() {
        let p = |f: f64, phi: f64| QubitProjectorParams::wrapped(f, phi);
        assert_eq!(marked_region(p(0.95, 1.0)), Some(2));
        assert_eq!(marked_region(p(-0.95, 1.0)), Some(1));
        assert_eq!(marked_region(p(0.1, 0.1)), Some(3));
        assert_eq!(marked_region(p(0.0, PI - 0.1)), Some(4));
        assert_eq!(marked_region(p(0.0, PI / 2.0 + 0.2)), Some(5));
        assert_eq!(marked_region(p(0.5, 1.0)), None);
        // antipode of a region-3 point
        assert_eq!(marked_region(p(-0.1, PI + 0.1)), Some(3));
    }

    #[test]
    fn landscape_density_normalised() {
        let pts = (0..1000).map(|i| QubitProjectorParams::wrapped(-1.0 + 2.0 * (i as f64 + 0.5) / 1000.0, 0.3));
        let l = Landscape::from_points(pts, 40, 40);
        let area = (2.0 / 40.0) * (PI / 40.0);
        let integral: f64 = (0..40)
            .flat_map(|i| (0..40).map(move |j| (i, j)))
            .map(|(i, j)| l.density(i, j) * area)
            .sum();
        assert!((integral - 1.0).abs() < 1e-12);
        let mf = l.marginal_f_theta();
        assert!(mf.iter().all(|&d| (d - 0.5).abs() < 1e-9));
    }

    #[test]
    fn grid_and_sweep_helpers() {
        let g = param_grid(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(param_grid(0.0, 5.0, 0.1).unwrap().len(), 51);
        let pt = |param: f64, ve: f64, optimal_index: usize| SweepPoint {
            param,
            value_constrained: 0.0,
            value_actual: 0.0,
            ve,
            optimal_index,
        };
        let pts = [pt(0.0, 0.0, 2), pt(0.1, 0.0, 2), pt(0.2, 0.3, 0), pt(0.3, 0.1, 0)];
        assert_eq!(onset(&pts, 1e-9), Some(0.2));
        assert_eq!(argmax_ve(&pts).unwrap().param, 0.2);
        assert_eq!(index_switches(&pts), vec![(0.15000000000000002, 2, 0)]);
    }

    #[test]
    fn filtered_ensemble_counts() {
        let spec = EnsembleSpec::haar(2, 2, 4, PptFilter::Ppt, 150, 9);
        let s = spec.draw().unwrap();
        assert_eq!(s.len(), 150);
        assert!(s.iter().all(|x| x.ppt == PptClass::Ppt));
        let none = EnsembleSpec::haar(2, 2, 1, PptFilter::Ppt, 150, 9);
        assert!(matches!(none.draw(), Err(Error::InsufficientSamples { .. })));
    }
}
