//! Batch experiment driver behind the `qcorr` binary.
//!
//! Every subcommand writes plot-ready CSV files into `--out` and prints a
//! JSON run manifest (parameters, seed, version, wall time, outputs and a
//! result summary) on standard output. Exit codes: 0 success, 2 invalid
//! flags or input, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::closed_forms::{x_state_cqd, x_state_cqwd};
use crate::correlations::{constrained_min, on_subsystem, reference_min, voluntary_error, Measure, ReferenceOptions};
use crate::linalg::Subsystem;
use crate::measurements::{circle_fixed_ftheta, circle_fixed_phi, disc_stack, sphere_grid, triad, EarmarkedSet};
use crate::spin_models::{finite_size_fit, locate_transition, thermal_scan, LocateOptions, QptScan};
use crate::states::{make_x_state, Axis, BipartiteDensityMatrix, XStateParams};
use crate::stats::{
    be_sweep, evaluate_samples, fit_linear, mean_stderr, optimizer_landscape, param_grid, scaling_from_evals,
    set_kind_label, BeFamily, EnsembleKind, EnsembleSpec, ErrorStats, PptFilter, ScalingPoint,
};
use crate::Error;

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "qcorr",
    version,
    about = "Constrained quantum discord and work deficit experiments"
)]
pub struct Cli {
    /// Master seed; sample i uses its own stream derived from it.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Ensemble size.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, env = "QCORR_JOBS", default_value_t = 0)]
    #[serde(skip)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "qcorr-out")]
    pub out: PathBuf,
    /// No progress messages on standard error.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Per-sample voluntary errors of a random ensemble against one or more sets.
    SampleErrors(SampleErrorsArgs),
    /// Mean error versus set size with a power-law or linear fit.
    FitScaling(FitScalingArgs),
    /// Histogram of optimal measurement directions and marked-region fractions.
    Landscape(LandscapeArgs),
    /// Closed-form and numerical values for one X state.
    XstateEval(XStateArgs),
    /// dQ/dλ scans of the XY chain and the finite-size fit of λ_c^L.
    SpinScan(SpinScanArgs),
    /// Voluntary error over the (h1/J, h2/J) plane of the thermal two-qubit state.
    ThermalScan(ThermalScanArgs),
    /// Voluntary error along a bound-entangled family.
    BeSweep(BeSweepArgs),
    /// Constrained and reference values of a state read from JSON.
    EvalState(EvalStateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    Qd,
    Qwd,
    Both,
}

impl MeasureArg {
    fn measures(self) -> Vec<Measure> {
        match self {
            MeasureArg::Qd => vec![Measure::Qd],
            MeasureArg::Qwd => vec![Measure::Qwd],
            MeasureArg::Both => Measure::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetArg {
    /// Fixed f_θ, n equispaced φ.
    Circle,
    /// Fixed φ, n equal divisions of f_θ.
    CirclePhi,
    /// n2 parallel circles of n1 points each.
    DiscStack,
    /// n1 φ values times n2 f_θ bin midpoints.
    SphereGrid,
    /// Pauli or spin-1 eigenbases.
    Triad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterArg {
    All,
    Ppt,
    Nppt,
}

impl From<FilterArg> for PptFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::All => PptFilter::All,
            FilterArg::Ppt => PptFilter::Ppt,
            FilterArg::Nppt => PptFilter::Nppt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleArg {
    /// Haar-induced states of fixed rank.
    Haar,
    /// Nine-parameter correlator states.
    Correlator,
    /// Correlator states with magnetizations along --axis.
    RhoM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    X,
    Y,
    Z,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
            AxisArg::Z => Axis::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    A,
    B,
}

impl From<SideArg> for Subsystem {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::A => Subsystem::A,
            SideArg::B => Subsystem::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BeArg {
    Be24,
    Tiles,
    Horodecki,
}

impl From<BeArg> for BeFamily {
    fn from(b: BeArg) -> Self {
        match b {
            BeArg::Be24 => BeFamily::Be24,
            BeArg::Tiles => BeFamily::Tiles,
            BeArg::Horodecki => BeFamily::Horodecki,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, default_value = "haar")]
    pub ensemble: EnsembleArg,
    #[arg(long, default_value_t = 2)]
    pub d_a: usize,
    #[arg(long, default_value_t = 2)]
    pub d_b: usize,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub ppt: FilterArg,
    #[arg(long, value_enum, default_value = "x")]
    pub axis: AxisArg,
}

impl EnsembleArgs {
    fn spec(&self, samples: usize, seed: u64) -> EnsembleSpec {
        let kind = match self.ensemble {
            EnsembleArg::Haar => EnsembleKind::Haar {
                d_a: self.d_a,
                d_b: self.d_b,
                rank: self.rank,
            },
            EnsembleArg::Correlator => EnsembleKind::Correlator,
            EnsembleArg::RhoM => EnsembleKind::RhoM { axis: self.axis.into() },
        };
        EnsembleSpec {
            kind,
            filter: self.ppt.into(),
            samples,
            seed,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SetArgs {
    #[arg(long, value_enum, default_value = "triad")]
    pub set: SetArg,
    /// f_θ of a circle, or centre of a disc stack.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub ftheta: f64,
    /// φ of a fixed-φ circle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Set sizes for circles; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub n1: usize,
    /// n2 values for disc stacks and sphere grids; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n2_list: Vec<usize>,
}

impl SetArgs {
    /// One set per size; `dim` only matters for the triad.
    fn build(&self, dim: usize) -> crate::Result<Vec<EarmarkedSet>> {
        match self.set {
            SetArg::Circle => self
                .n_list
                .iter()
                .map(|&n| circle_fixed_ftheta(self.ftheta, n))
                .collect(),
            SetArg::CirclePhi => self.n_list.iter().map(|&n| circle_fixed_phi(self.phi, n)).collect(),
            SetArg::DiscStack => self
                .n2_list
                .iter()
                .map(|&n2| disc_stack(self.ftheta, self.n1, n2))
                .collect(),
            SetArg::SphereGrid => self.n2_list.iter().map(|&n2| sphere_grid(self.n1, n2)).collect(),
            SetArg::Triad => Ok(vec![triad(dim)?]),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SampleErrorsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
}

#[derive(Debug, Args, Serialize)]
pub struct FitScalingArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value = "qd")]
    pub measure: MeasureArg,
    /// Size of the circle standing in for n → ∞.
    #[arg(long, default_value_t = 4096)]
    pub n_inf: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 40)]
    pub f_bins: usize,
    #[arg(long, default_value_t = 40)]
    pub phi_bins: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct XStateArgs {
    /// Diagonal a1,a2,a3,a4.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub a: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b2: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SpinScanArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160,320,640,1280,2560")]
    pub l_list: Vec<usize>,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 0.8)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.2)]
    pub hi: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Zoom passes around the peak after the first scan.
    #[arg(long, default_value_t = 0)]
    pub passes: usize,
    /// Central-difference step of dQ/dλ.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ThermalScanArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta_j: f64,
    #[arg(long, default_value_t = 2.0)]
    pub h_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value = "qwd")]
    pub measure: MeasureArg,
}

#[derive(Debug, Args, Serialize)]
pub struct BeSweepArgs {
    #[arg(long, value_enum)]
    pub state: BeArg,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
    /// Parameter spacing.
    #[arg(
        long,
        alias = "b-step",
        alias = "a-step",
        alias = "alpha-step",
        default_value_t = 0.01
    )]
    pub step: f64,
    /// Measured subsystem.
    #[arg(long, value_enum, default_value = "a")]
    pub side: SideArg,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalStateArgs {
    /// State JSON: {"dA", "dB", "entries": [[re, im], ...]} row-major.
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value = "a")]
    pub side: SideArg,
}

/// Failure of a run with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateFit(_)
            | Error::InsufficientSamples { .. }
            | Error::NegativeResidual { .. }
            | Error::GridTooCoarse(_)
            | Error::NotPositive(_) => RunError::Numerical(e.to_string()),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Invalid(format!("{}: {e}", path.display()))
}

/// CSV writer with a header row, LF endings and shortest round-trip floats.
struct Csv {
    path: PathBuf,
    body: String,
}

impl Csv {
    fn new(path: PathBuf, header: &[&str]) -> Self {
        Self {
            path,
            body: header.join(",") + "\n",
        }
    }

    fn row(&mut self, cells: &[String]) {
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    fn finish(self, outputs: &mut Vec<String>) -> RunResult<()> {
        fs::write(&self.path, &self.body).map_err(|e| io_err(&self.path, e))?;
        outputs.push(self.path.display().to_string());
        Ok(())
    }
}

/// Shortest round-trip representation, exponent form for small values.
fn f(x: f64) -> String {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
    } else {
        x.to_string()
    }
}

fn u<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

struct Run<'a> {
    cli: &'a Cli,
    outputs: Vec<String>,
}

impl Run<'_> {
    fn file(&self, name: &str) -> PathBuf {
        self.cli.out.join(name)
    }

    fn progress(&self, msg: impl std::fmt::Display) {
        if !self.cli.quiet {
            eprintln!("qcorr: {msg}");
        }
    }

    fn evaluate(
        &self,
        samples: &[crate::stats::Sample],
        sets: &[EarmarkedSet],
    ) -> RunResult<Vec<crate::stats::SampleEval>> {
        self.progress(format_args!(
            "evaluating {} states against {} sets",
            samples.len(),
            sets.len()
        ));
        let t = Instant::now();
        let evals = evaluate_samples(samples, sets, Some(&self.reference()))?;
        self.progress(format_args!("evaluated in {:.1} s", t.elapsed().as_secs_f64()));
        Ok(evals)
    }

    fn reference(&self) -> ReferenceOptions {
        ReferenceOptions {
            seed: self.cli.seed,
            ..ReferenceOptions::default()
        }
    }

    fn sample_errors(&mut self, a: &SampleErrorsArgs) -> RunResult<Value> {
        let spec = a.ensemble.spec(self.cli.samples, self.cli.seed);
        let sets = a.set.build(a.ensemble.d_a)?;
        let samples = spec.draw()?;
        let evals = self.evaluate(&samples, &sets)?;
        let mut csv = Csv::new(
            self.file("errors.csv"),
            &["sample_id", "rank", "ppt", "measure", "set_kind", "n", "ve"],
        );
        let mut summary = Vec::new();
        for (k, set) in sets.iter().enumerate() {
            for m in a.measure.measures() {
                let mut ve = Vec::with_capacity(evals.len());
                for e in &evals {
                    let v = e.ve(k, m).unwrap_or(f64::NAN);
                    ve.push(v);
                    csv.row(&[
                        u(e.sample_id),
                        u(e.rank),
                        u(e.ppt),
                        u(m),
                        u(set_kind_label(set.kind())),
                        u(set.len()),
                        f(v),
                    ]);
                }
                let rank = match spec.kind {
                    EnsembleKind::Haar { rank, .. } => Some(rank),
                    _ => None,
                };
                let stats = ErrorStats::from_errors(&ve, rank, spec.filter)?;
                summary.push(json!({
                    "measure": m,
                    "set_kind": set_kind_label(set.kind()),
                    "n": set.len(),
                    "samples": stats.samples,
                    "mean": stats.mean,
                    "stderr": stats.stderr,
                    "max": stats.max,
                }));
            }
        }
        csv.finish(&mut self.outputs)?;
        Ok(json!({ "accepted_samples": samples.len(), "stats": summary }))
    }

    fn fit_scaling(&mut self, a: &FitScalingArgs) -> RunResult<Value> {
        let spec = a.ensemble.spec(self.cli.samples, self.cli.seed);
        let samples = spec.draw()?;
        let mut csv = Csv::new(self.file("scaling.csv"), &["n", "mean_ve", "stderr"]);
        let mut fits = Vec::new();
        match a.set.set {
            SetArg::Circle | SetArg::CirclePhi => {
                let mut sets = a.set.build(a.ensemble.d_a)?;
                let asym = match a.set.set {
                    SetArg::Circle => circle_fixed_ftheta(a.set.ftheta, a.n_inf)?,
                    _ => circle_fixed_phi(a.set.phi, a.n_inf)?,
                };
                sets.push(asym);
                let evals = self.evaluate(&samples, &sets)?;
                for m in a.measure.measures() {
                    let r = scaling_from_evals(&evals, &sets, m)?;
                    for p in &r.points {
                        csv.row(&[u(p.n), f(p.mean_ve), f(p.stderr)]);
                    }
                    csv.row(&[u(a.n_inf), f(r.eps_inf), f(r.eps_inf_stderr)]);
                    fits.push(
                        json!({ "measure": m, "kind": "power_law", "fit": r.fit, "eps_inf_stderr": r.eps_inf_stderr }),
                    );
                }
            }
            SetArg::DiscStack | SetArg::SphereGrid => {
                let sets = a.set.build(a.ensemble.d_a)?;
                let evals = self.evaluate(&samples, &sets)?;
                for m in a.measure.measures() {
                    let points: Vec<ScalingPoint> = sets
                        .iter()
                        .enumerate()
                        .map(|(k, s)| {
                            let ve: Vec<f64> = evals.iter().filter_map(|e| e.ve(k, m)).collect();
                            let (mean_ve, stderr) = mean_stderr(&ve);
                            ScalingPoint {
                                n: s.len(),
                                mean_ve,
                                stderr,
                            }
                        })
                        .collect();
                    for p in &points {
                        csv.row(&[u(p.n), f(p.mean_ve), f(p.stderr)]);
                    }
                    let pairs: Vec<(f64, f64)> = a
                        .set
                        .n2_list
                        .iter()
                        .zip(&points)
                        .map(|(&n2, p)| (n2 as f64, p.mean_ve))
                        .collect();
                    let line = fit_linear(&pairs)?;
                    fits.push(json!({ "measure": m, "kind": "linear_in_n2", "m": line.slope, "c": line.intercept, "fit": line }));
                }
            }
            SetArg::Triad => return Err(RunError::Invalid("fit-scaling needs a family of set sizes".into())),
        }
        csv.finish(&mut self.outputs)?;
        Ok(json!({ "accepted_samples": samples.len(), "fits": fits }))
    }

    fn landscape(&mut self, a: &LandscapeArgs) -> RunResult<Value> {
        if a.ensemble.ensemble == EnsembleArg::Haar && a.ensemble.d_a != 2 {
            return Err(RunError::Invalid("landscape needs a qubit on A".into()));
        }
        if a.f_bins == 0 || a.phi_bins == 0 {
            return Err(RunError::Invalid("bin counts must be positive".into()));
        }
        let spec = a.ensemble.spec(self.cli.samples, self.cli.seed);
        let samples = spec.draw()?;
        let evals = self.evaluate(&samples, &[])?;
        let mut csv = Csv::new(
            self.file("landscape.csv"),
            &["measure", "f_theta_bin", "phi_bin", "density"],
        );
        let mut marg = Csv::new(
            self.file("landscape_marginals.csv"),
            &["measure", "axis", "bin", "density"],
        );
        let mut results = Vec::new();
        for m in a.measure.measures() {
            let mut l = optimizer_landscape(&evals, m);
            if (a.f_bins, a.phi_bins) != (l.f_bins, l.phi_bins) {
                l = crate::stats::Landscape::from_points(l.points.clone(), a.f_bins, a.phi_bins);
            }
            for i in 0..l.f_bins {
                for j in 0..l.phi_bins {
                    csv.row(&[u(m), u(i), u(j), f(l.density(i, j))]);
                }
            }
            for (i, d) in l.marginal_f_theta().iter().enumerate() {
                marg.row(&[u(m), u("f_theta"), u(i), f(*d)]);
            }
            for (j, d) in l.marginal_phi().iter().enumerate() {
                marg.row(&[u(m), u("phi"), u(j), f(*d)]);
            }
            let (per, union) = l.region_fractions();
            results
                .push(json!({ "measure": m, "optimizers": l.points.len(), "region_fractions": per, "union": union }));
        }
        csv.finish(&mut self.outputs)?;
        marg.finish(&mut self.outputs)?;
        Ok(json!({ "accepted_samples": samples.len(), "landscapes": results }))
    }

    fn xstate_eval(&mut self, a: &XStateArgs) -> RunResult<Value> {
        let diag: [f64; 4] =
            a.a.as_slice()
                .try_into()
                .map_err(|_| RunError::Invalid(format!("--a needs 4 comma-separated values, got {}", a.a.len())))?;
        let p = XStateParams::new(diag, a.b1, a.b2)?;
        let rho = make_x_state(&p)?;
        let t = triad(2)?;
        let mut out = Vec::new();
        for m in Measure::BOTH {
            let closed = match m {
                Measure::Qd => x_state_cqd(&p)?,
                Measure::Qwd => x_state_cqwd(&p)?,
            };
            let numeric = constrained_min(&rho, &t, m)?;
            let actual = reference_min(&rho, m, &self.reference())?;
            out.push(json!({
                "measure": m,
                "closed_form": closed,
                "triad_numeric": numeric.value_constrained,
                "actual": actual.value_constrained,
                "ve": closed - actual.value_constrained,
                "actual_params": actual.optimal_params,
            }));
        }
        Ok(json!({ "values": out }))
    }

    fn spin_scan(&mut self, a: &SpinScanArgs) -> RunResult<Value> {
        if a.l_list.is_empty() {
            return Err(RunError::Invalid("--l-list is empty".into()));
        }
        let opts = LocateOptions {
            lo: a.lo,
            hi: a.hi,
            points: a.points,
            passes: a.passes,
            step: a.step,
        };
        let mut curve = Csv::new(
            self.file("spin_curve.csv"),
            &["measure", "L", "lambda", "Q", "dQ_dlambda"],
        );
        let mut crit = Csv::new(self.file("spin_lambda_c.csv"), &["measure", "L", "lambda_cL"]);
        let mut fits = Vec::new();
        for m in a.measure.measures() {
            self.progress(format_args!("{m:?}: locating lambda_c^L for L = {:?}", a.l_list));
            let scans: Vec<QptScan> = a
                .l_list
                .par_iter()
                .map(|&l| locate_transition(a.g, l, m, &opts))
                .collect::<crate::Result<_>>()?;
            for s in &scans {
                for p in &s.curve {
                    curve.row(&[u(m), u(s.sites), f(p.lambda), f(p.q), f(p.dq_dlambda)]);
                }
                crit.row(&[u(m), u(s.sites), f(s.lambda_c)]);
            }
            let pts: Vec<(usize, f64)> = scans.iter().map(|s| (s.sites, s.lambda_c)).collect();
            let fit = if pts.len() >= 4 {
                Some(finite_size_fit(&pts)?)
            } else {
                None
            };
            fits.push(json!({ "measure": m, "lambda_c": pts, "fit": fit }));
        }
        curve.finish(&mut self.outputs)?;
        crit.finish(&mut self.outputs)?;
        Ok(json!({ "scans": fits }))
    }

    fn thermal_scan(&mut self, a: &ThermalScanArgs) -> RunResult<Value> {
        let sets = a.set.build(2)?;
        let [set] = sets.as_slice() else {
            return Err(RunError::Invalid("thermal-scan takes a single set size".into()));
        };
        let mut csv = Csv::new(
            self.file("thermal.csv"),
            &[
                "measure",
                "h1_over_j",
                "h2_over_j",
                "value_constrained",
                "value_actual",
                "ve",
            ],
        );
        let mut results = Vec::new();
        for m in a.measure.measures() {
            self.progress(format_args!(
                "{m:?}: scanning |h/J| <= {} with step {}",
                a.h_max, a.step
            ));
            let pts = thermal_scan(a.g, a.beta_j, a.h_max, a.step, set, m, &self.reference())?;
            for p in &pts {
                csv.row(&[
                    u(m),
                    f(p.h1_over_j),
                    f(p.h2_over_j),
                    f(p.value_constrained),
                    f(p.value_actual),
                    f(p.ve),
                ]);
            }
            let worst = pts.iter().max_by(|x, y| x.ve.total_cmp(&y.ve));
            results.push(
                json!({ "measure": m, "max_ve": worst.map(|p| p.ve), "at": worst.map(|p| [p.h1_over_j, p.h2_over_j]) }),
            );
        }
        csv.finish(&mut self.outputs)?;
        Ok(json!({ "set": set.spec(), "maxima": results }))
    }

    fn be_sweep(&mut self, a: &BeSweepArgs) -> RunResult<Value> {
        let family: BeFamily = a.state.into();
        let (lo, hi) = family.range();
        let grid = param_grid(lo, hi, a.step)?;
        let dim = match (family, a.side) {
            (BeFamily::Be24, SideArg::A) => 2,
            (BeFamily::Be24, SideArg::B) => 4,
            _ => 3,
        };
        let set = triad(dim)?;
        self.progress(format_args!("sweeping {} parameter values", grid.len()));
        let points = be_sweep(family, &grid, a.side.into(), &set, &self.reference())?;
        let mut csv = Csv::new(
            self.file("be_sweep.csv"),
            &[
                "param",
                "measure",
                "value_constrained",
                "value_actual",
                "ve",
                "optimal_index",
            ],
        );
        let mut results = Vec::new();
        for m in a.measure.measures() {
            let k = usize::from(m == Measure::Qwd);
            let series: Vec<_> = points.iter().map(|p| p[k]).collect();
            for p in &series {
                csv.row(&[
                    f(p.param),
                    u(m),
                    f(p.value_constrained),
                    f(p.value_actual),
                    f(p.ve),
                    u(p.optimal_index),
                ]);
            }
            let worst = crate::stats::argmax_ve(&series);
            results.push(json!({
                "measure": m,
                "max_ve": worst.map(|p| p.ve),
                "argmax": worst.map(|p| p.param),
                "onset": crate::stats::onset(&series, 1e-9),
                "switches": crate::stats::index_switches(&series),
            }));
        }
        csv.finish(&mut self.outputs)?;
        Ok(json!({ "summary": results }))
    }

    fn eval_state(&mut self, a: &EvalStateArgs) -> RunResult<Value> {
        let rho = BipartiteDensityMatrix::read_json(&a.file).map_err(|e| io_err(&a.file, e))?;
        let rho = on_subsystem(&rho, a.side.into());
        let sets = a.set.build(rho.dims().0)?;
        let mut out = Vec::new();
        for set in &sets {
            for m in a.measure.measures() {
                out.push(voluntary_error(&rho, set, m, &self.reference())?);
            }
        }
        let out = match out.len() {
            1 => serde_json::to_value(&out[0]),
            _ => serde_json::to_value(&out),
        }
        .map_err(|e| RunError::Numerical(e.to_string()))?;
        let path = self.file("eval.json");
        let body = serde_json::to_string_pretty(&out).map_err(|e| RunError::Numerical(e.to_string()))?;
        fs::write(&path, body + "\n").map_err(|e| io_err(&path, e))?;
        self.outputs.push(path.display().to_string());
        Ok(out)
    }
}

/// Executes a parsed command line and returns the run manifest.
pub fn execute(cli: &Cli) -> RunResult<Value> {
    fs::create_dir_all(&cli.out).map_err(|e| io_err(&cli.out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    let started = Instant::now();
    let mut run = Run {
        cli,
        outputs: Vec::new(),
    };
    let result = pool.install(|| match &cli.command {
        Command::SampleErrors(a) => run.sample_errors(a),
        Command::FitScaling(a) => run.fit_scaling(a),
        Command::Landscape(a) => run.landscape(a),
        Command::XstateEval(a) => run.xstate_eval(a),
        Command::SpinScan(a) => run.spin_scan(a),
        Command::ThermalScan(a) => run.thermal_scan(a),
        Command::BeSweep(a) => run.be_sweep(a),
        Command::EvalState(a) => run.eval_state(a),
    })?;
    Ok(json!({
        "tool": "qcorr",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": cli,
        "jobs": pool.current_num_threads(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "outputs": run.outputs,
        "result": result,
    }))
}

/// Parses `args`, runs, writes the manifest to `stdout` and diagnostics to
/// `stderr`; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(manifest) => {
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&manifest).unwrap_or_default()
            );
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "qcorr: {e}");
            e.exit_code()
        }
    }
}
