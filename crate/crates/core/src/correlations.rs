//! Quantum discord (QD) and quantum work deficit (QWD) with measurement on
//! subsystem A.
//!
//! For a basis `{|v_k⟩}` let `σ_k = ⟨v_k|ρ|v_k⟩_A` (unnormalised operator on
//! B) with `p_k = Tr σ_k`. Then
//!
//! - QD(basis)  = S(ρ_A) − S(ρ) + Σ_k p_k S(σ_k / p_k)
//! - QWD(basis) = S(Σ_k |v_k⟩⟨v_k| ⊗ σ_k) − S(ρ)
//!
//! and both only need the spectra of the `σ_k`, which is what
//! [`StateEvaluator`] computes. Constrained values minimise over an
//! [`EarmarkedSet`]; the reference ("actual") value minimises over all
//! rank-1 projective measurements numerically.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, eta, CMatrix, Subsystem};
use crate::measurements::{
    qubit_basis_angles, random_basis_with, triad, EarmarkedSet, MeasurementBasis, QubitProjectorParams,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::rng;
use crate::states::BipartiteDensityMatrix;
use crate::{Error, Result};

/// Outcomes with probability below this are treated as absent.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Tie tolerance when picking the optimal basis of a set.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "QD")]
    Qd,
    #[serde(rename = "QWD")]
    Qwd,
}

impl Measure {
    pub const BOTH: [Measure; 2] = [Measure::Qd, Measure::Qwd];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Qd => "QD",
            Measure::Qwd => "QWD",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "QD" => Ok(Measure::Qd),
            "QWD" => Ok(Measure::Qwd),
            _ => Err(Error::OutOfRange(format!("unknown measure {s:?}"))),
        }
    }
}

/// QD and QWD of one state for one basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisScore {
    pub qd: f64,
    pub qwd: f64,
}

impl BasisScore {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::Qd => self.qd,
            Measure::Qwd => self.qwd,
        }
    }
}

/// Caches the entropies and `dB × dB` blocks of a state so that each basis
/// evaluation costs `dA` small eigenproblems.
#[derive(Clone, Debug)]
pub struct StateEvaluator {
    d_a: usize,
    d_b: usize,
    /// `blocks[a * dA + a']` is `⟨a|ρ|a'⟩_A`.
    blocks: Vec<CMatrix>,
    s_joint: f64,
    s_a: f64,
}

impl StateEvaluator {
    pub fn new(rho: &BipartiteDensityMatrix) -> Self {
        let (d_a, d_b) = rho.dims();
        let m = rho.matrix();
        let blocks = (0..d_a * d_a)
            .map(|idx| {
                let (a, a2) = (idx / d_a, idx % d_a);
                CMatrix::from_fn(d_b, |b, b2| m[(a * d_b + b, a2 * d_b + b2)])
            })
            .collect();
        Self {
            d_a,
            d_b,
            blocks,
            s_joint: rho.entropy(),
            s_a: linalg::entropy_of_spectrum(&rho.reduced(Subsystem::A).eigenvalues()),
        }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn joint_entropy(&self) -> f64 {
        self.s_joint
    }

    pub fn marginal_entropy_a(&self) -> f64 {
        self.s_a
    }

    /// `⟨v|ρ|v⟩_A`.
    pub fn conditional_operator(&self, v: &[C64]) -> CMatrix {
        let d_b = self.d_b;
        let mut sigma = CMatrix::zeros(d_b);
        for a in 0..self.d_a {
            for a2 in 0..self.d_a {
                let w = v[a].conj() * v[a2];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let blk = &self.blocks[a * self.d_a + a2];
                for i in 0..d_b {
                    for j in 0..d_b {
                        sigma[(i, j)] += w * blk[(i, j)];
                    }
                }
            }
        }
        sigma
    }

    /// `(Σ η(spec σ_k), Σ η(p_k))`.
    fn entropies(&self, basis: &MeasurementBasis) -> (f64, f64) {
        let mut h_joint = 0.0;
        let mut h_p = 0.0;
        for v in basis.vectors() {
            let sigma = self.conditional_operator(v);
            let p = sigma.trace().re;
            if p < MIN_PROBABILITY {
                continue;
            }
            h_p += eta(p);
            h_joint += linalg::eigvalsh(&sigma).into_iter().map(eta).sum::<f64>();
        }
        (h_joint, h_p)
    }

    pub fn score(&self, basis: &MeasurementBasis) -> BasisScore {
        let (h_joint, h_p) = self.entropies(basis);
        BasisScore {
            qd: (self.s_a - self.s_joint + h_joint - h_p).max(0.0),
            qwd: (h_joint - self.s_joint).max(0.0),
        }
    }

    pub fn value(&self, basis: &MeasurementBasis, measure: Measure) -> f64 {
        self.score(basis).get(measure)
    }
}

/// One measurement outcome: probability and post-measurement state, the
/// latter absent when `p < 1e-12`.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub probability: f64,
    pub state: Option<BipartiteDensityMatrix>,
}

fn check_basis(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis) -> Result<()> {
    if basis.dim() != rho.dims().0 {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} for subsystem A of dimension {}",
            basis.dim(),
            rho.dims().0
        )));
    }
    Ok(())
}

/// `p_k = Tr[(Π_k ⊗ I)ρ]` and `ρ_k = (Π_k ⊗ I)ρ(Π_k ⊗ I)/p_k`.
pub fn post_measurement_ensemble(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis) -> Result<Vec<Outcome>> {
    check_basis(rho, basis)?;
    let (d_a, d_b) = rho.dims();
    let eval = StateEvaluator::new(rho);
    basis
        .vectors()
        .iter()
        .map(|v| {
            let sigma = eval.conditional_operator(v);
            let p = sigma.trace().re;
            if p < MIN_PROBABILITY {
                return Ok(Outcome {
                    probability: p,
                    state: None,
                });
            }
            let proj = CMatrix::outer(v, v);
            let state = BipartiteDensityMatrix::new(d_a, d_b, proj.kron(&sigma.scale(1.0 / p)))?;
            Ok(Outcome {
                probability: p,
                state: Some(state),
            })
        })
        .collect()
}

/// QD for a fixed basis on A, in bits.
pub fn discord_given_basis(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis) -> Result<f64> {
    check_basis(rho, basis)?;
    Ok(StateEvaluator::new(rho).value(basis, Measure::Qd))
}

/// QWD for a fixed basis on A, in bits.
pub fn workdeficit_given_basis(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis) -> Result<f64> {
    check_basis(rho, basis)?;
    Ok(StateEvaluator::new(rho).value(basis, Measure::Qwd))
}

pub fn value_given_basis(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis, measure: Measure) -> Result<f64> {
    check_basis(rho, basis)?;
    Ok(StateEvaluator::new(rho).value(basis, measure))
}

/// Constrained and (optionally) reference value of one measure.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationEval {
    pub measure: Measure,
    pub value_constrained: f64,
    pub value_actual: Option<f64>,
    pub optimal_basis_index: usize,
    /// Qubit sets: `(f_θ, φ)` of the optimal member.
    pub optimal_params: Option<QubitProjectorParams>,
    pub ve: Option<f64>,
    #[serde(skip)]
    pub optimal_basis: MeasurementBasis,
}

impl CorrelationEval {
    /// Fills in the reference value and the voluntary error.
    pub fn with_actual(mut self, actual: f64) -> Self {
        self.value_actual = Some(actual);
        self.ve = Some((self.value_constrained - actual).abs());
        self
    }
}

fn argmin_with_ties(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 - TIE_TOL {
            best = (k, v);
        }
    }
    best
}

fn check_set(rho: &BipartiteDensityMatrix, set: &EarmarkedSet) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    check_basis(rho, &set.bases()[0])
}

/// Scores of every member of `set`; shared by both measures.
pub fn score_set(rho: &BipartiteDensityMatrix, set: &EarmarkedSet) -> Result<Vec<BasisScore>> {
    check_set(rho, set)?;
    let eval = StateEvaluator::new(rho);
    Ok(set.bases().iter().map(|b| eval.score(b)).collect())
}

fn eval_from_scores(set: &EarmarkedSet, scores: &[BasisScore], measure: Measure) -> CorrelationEval {
    let (k, v) = argmin_with_ties(scores.iter().map(|s| s.get(measure)));
    CorrelationEval {
        measure,
        value_constrained: v,
        value_actual: None,
        optimal_basis_index: k,
        optimal_params: set.point(k),
        ve: None,
        optimal_basis: set.bases()[k].clone(),
    }
}

/// Minimum over the set; ties go to the lowest index.
pub fn constrained_min(rho: &BipartiteDensityMatrix, set: &EarmarkedSet, measure: Measure) -> Result<CorrelationEval> {
    let scores = score_set(rho, set)?;
    Ok(eval_from_scores(set, &scores, measure))
}

/// QD and QWD constrained minima from a single pass over the set.
pub fn constrained_min_both(rho: &BipartiteDensityMatrix, set: &EarmarkedSet) -> Result<[CorrelationEval; 2]> {
    let scores = score_set(rho, set)?;
    Ok(Measure::BOTH.map(|m| eval_from_scores(set, &scores, m)))
}

// ---------------------------------------------------------------------------
// Reference (unconstrained) minimum
// ---------------------------------------------------------------------------

/// Settings of the numerical reference optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptions {
    /// Qubit grid: number of `f_θ` values (endpoints included).
    pub grid_f_theta: usize,
    /// Qubit grid: number of `φ` values over `[0, 2π)`.
    pub grid_phi: usize,
    /// Qubit: local refinements started from the best grid points.
    pub refine_starts: usize,
    /// Qutrit: Haar-random starting bases.
    pub qutrit_starts: usize,
    /// Qutrit: refined starts carried to full precision.
    pub qutrit_polish: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
    /// Seed of the qutrit random starts.
    pub seed: u64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            grid_f_theta: 60,
            grid_phi: 120,
            refine_starts: 5,
            qutrit_starts: 50,
            qutrit_polish: 3,
            x_tol: 1e-9,
            f_tol: 1e-15,
            max_iter: 2000,
            seed: 0x5eed,
        }
    }
}

impl ReferenceOptions {
    fn nm(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            x_tol: self.x_tol,
            f_tol: self.f_tol,
            max_iter: self.max_iter,
        }
    }
}

/// Reference minimum of one measure.
#[derive(Clone, Debug)]
pub struct ReferenceMin {
    pub measure: Measure,
    pub value: f64,
    pub basis: MeasurementBasis,
    pub params: Option<QubitProjectorParams>,
}

impl ReferenceMin {
    pub fn into_eval(self) -> CorrelationEval {
        CorrelationEval {
            measure: self.measure,
            value_constrained: self.value,
            value_actual: Some(self.value),
            optimal_basis_index: 0,
            optimal_params: self.params,
            ve: Some(0.0),
            optimal_basis: self.basis,
        }
    }
}

fn qubit_reference(eval: &StateEvaluator, opts: &ReferenceOptions) -> Result<[ReferenceMin; 2]> {
    let nf = opts.grid_f_theta;
    let np = opts.grid_phi;
    if nf < 2 || np < 1 {
        return Err(Error::GridTooCoarse(format!("{nf} x {np} reference grid")));
    }
    let mut grid: Vec<(f64, f64, BasisScore)> = Vec::with_capacity(nf * np);
    for i in 0..nf {
        let f = -1.0 + 2.0 * i as f64 / (nf - 1) as f64;
        let theta = f.clamp(-1.0, 1.0).acos();
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            grid.push((theta, phi, eval.score(&qubit_basis_angles(theta, phi))));
        }
    }
    let step = [PI / (nf - 1) as f64, TAU / np as f64];

    Ok(Measure::BOTH.map(|measure| {
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&a, &b| grid[a].2.get(measure).total_cmp(&grid[b].2.get(measure)));
        let (t0, p0, s0) = grid[order[0]];
        let mut best = (s0.get(measure), t0, p0);
        for &idx in order.iter().take(opts.refine_starts) {
            let (t, p, _) = grid[idx];
            let m = nelder_mead(
                |x| eval.value(&qubit_basis_angles(x[0], x[1]), measure),
                &[t, p],
                &step,
                opts.nm(),
            );
            if m.value < best.0 {
                best = (m.value, m.x[0], m.x[1]);
            }
        }
        let (value, theta, phi) = best;
        ReferenceMin {
            measure,
            value,
            basis: qubit_basis_angles(theta, phi),
            params: Some(QubitProjectorParams::from_angles(theta, phi)),
        }
    }))
}

/// `exp([[0, z], [−z*, 0]])` embedded in the `(p, q)` plane of `C^3`.
fn givens(p: usize, q: usize, re: f64, im: f64) -> CMatrix {
    let z = C64::new(re, im);
    let r = z.norm();
    let mut g = CMatrix::identity(3);
    let (s, c) = r.sin_cos();
    let phase = if r > 0.0 { z / r } else { C64::new(1.0, 0.0) };
    g[(p, p)] = C64::new(c, 0.0);
    g[(q, q)] = C64::new(c, 0.0);
    g[(p, q)] = phase * s;
    g[(q, p)] = -phase.conj() * s;
    g
}

/// Local chart around `u0`: `u0 · G12(z1) G13(z2) G23(z3)`. Column phases do
/// not change the projectors, so three complex angles cover a neighbourhood
/// of every measurement.
fn qutrit_chart(u0: &CMatrix, x: &[f64]) -> MeasurementBasis {
    let u = u0
        .matmul(&givens(0, 1, x[0], x[1]))
        .matmul(&givens(0, 2, x[2], x[3]))
        .matmul(&givens(1, 2, x[4], x[5]));
    MeasurementBasis::from_unitary_unchecked(&u)
}

fn qutrit_reference(eval: &StateEvaluator, opts: &ReferenceOptions) -> Result<[ReferenceMin; 2]> {
    let mut starts: Vec<CMatrix> = triad(3)?.bases().iter().map(|b| b.unitary()).collect();
    let mut rng = rng::stream(rng::derive_seed(opts.seed, "qutrit-starts"), 0);
    starts.extend((0..opts.qutrit_starts).map(|_| random_basis_with(3, &mut rng).unitary()));

    let coarse = NelderMeadOptions {
        x_tol: 1e-5,
        f_tol: 1e-12,
        max_iter: opts.max_iter,
    };
    let step = [0.3; 6];
    Ok(Measure::BOTH.map(|measure| {
        let f = |u0: &CMatrix, x: &[f64]| eval.value(&qutrit_chart(u0, x), measure);
        let mut rough: Vec<(f64, CMatrix)> = starts
            .iter()
            .map(|u0| {
                let m = nelder_mead(|x| f(u0, x), &[0.0; 6], &step, coarse);
                let u = qutrit_chart(u0, &m.x).unitary();
                (m.value, u)
            })
            .collect();
        rough.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = rough[0].clone();
        for (_, u0) in rough.iter().take(opts.qutrit_polish.max(1)) {
            let m = nelder_mead(|x| f(u0, x), &[0.0; 6], &[0.02; 6], opts.nm());
            if m.value < best.0 {
                best = (m.value, qutrit_chart(u0, &m.x).unitary());
            }
        }
        ReferenceMin {
            measure,
            value: best.0,
            basis: MeasurementBasis::from_unitary_unchecked(&best.1),
            params: None,
        }
    }))
}

/// Numerical minimum over all rank-1 projective measurements on A, for
/// both measures. Qubits: grid plus Nelder–Mead; qutrits: multi-start
/// Nelder–Mead on a local unitary chart.
pub fn reference_min_both(rho: &BipartiteDensityMatrix, opts: &ReferenceOptions) -> Result<[ReferenceMin; 2]> {
    let eval = StateEvaluator::new(rho);
    match rho.dims().0 {
        2 => qubit_reference(&eval, opts),
        3 => qutrit_reference(&eval, opts),
        d => Err(Error::UnsupportedDim(d)),
    }
}

pub fn reference_min(
    rho: &BipartiteDensityMatrix,
    measure: Measure,
    opts: &ReferenceOptions,
) -> Result<CorrelationEval> {
    let [qd, qwd] = reference_min_both(rho, opts)?;
    Ok(match measure {
        Measure::Qd => qd,
        Measure::Qwd => qwd,
    }
    .into_eval())
}

/// Constrained value, reference value and `ε = |Q_c − Q_a|`.
pub fn voluntary_error(
    rho: &BipartiteDensityMatrix,
    set: &EarmarkedSet,
    measure: Measure,
    opts: &ReferenceOptions,
) -> Result<CorrelationEval> {
    let c = constrained_min(rho, set, measure)?;
    let a = reference_min(rho, measure, opts)?;
    Ok(c.with_actual(a.value_constrained))
}

/// Both measures' constrained values with reference values attached.
pub fn voluntary_error_both(
    rho: &BipartiteDensityMatrix,
    set: &EarmarkedSet,
    opts: &ReferenceOptions,
) -> Result<[CorrelationEval; 2]> {
    let [cd, cw] = constrained_min_both(rho, set)?;
    let [ad, aw] = reference_min_both(rho, opts)?;
    Ok([cd.with_actual(ad.value), cw.with_actual(aw.value)])
}

/// Measurement on B instead of A: evaluates on the party-swapped state.
pub fn on_subsystem(rho: &BipartiteDensityMatrix, measured: Subsystem) -> BipartiteDensityMatrix {
    match measured {
        Subsystem::A => rho.clone(),
        Subsystem::B => rho.swap_parties(),
    }
}
