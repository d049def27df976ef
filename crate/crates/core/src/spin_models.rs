//! Spin models whose two-site states are X states.
//!
//! - The periodic transverse-field XY chain
//!   `H = (J/2) Σ [(1+g) σ^x_i σ^x_{i+1} + (1−g) σ^y_i σ^y_{i+1}] + h Σ σ^z_i`
//!   solved by Jordan–Wigner + Bogoliubov in the even-parity sector
//!   (antiperiodic fermion momenta `k = π(2m+1)/L`), with `λ = J/h`.
//! - The two-qubit XY model in a staggered field at finite temperature,
//!   `H₂ = J[(1+g) σ^x σ^x + (1−g) σ^y σ^y] + h₁ σ^z₁ + h₂ σ^z₂`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{x_state_cqd, x_state_cqwd};
use crate::correlations::{voluntary_error, Measure, ReferenceOptions};
use crate::measurements::EarmarkedSet;
use crate::states::{make_x_state, BipartiteDensityMatrix, XStateParams};
use crate::{Error, Result};

/// Finite periodic XY chain. `lambda = J/h` with `h > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XYChainParams {
    pub sites: usize,
    pub g: f64,
    pub lambda: f64,
}

impl XYChainParams {
    pub fn new(sites: usize, g: f64, lambda: f64) -> Result<Self> {
        let p = Self { sites, g, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 4 || !self.sites.is_multiple_of(2) {
            return Err(Error::OutOfRange(format!(
                "chain length {} must be even and >= 4",
                self.sites
            )));
        }
        if !(-1.0..=1.0).contains(&self.g) {
            return Err(Error::OutOfRange(format!("anisotropy g = {} outside [-1, 1]", self.g)));
        }
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::OutOfRange(format!("lambda = {} must be positive", self.lambda)));
        }
        Ok(())
    }
}

/// Transverse magnetization and nearest-neighbour diagonal correlators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCorrelators {
    pub m_z: f64,
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
}

/// Ground-state correlators from the free-fermion mode sums.
///
/// With `A_j = c_j† + c_j`, `B_j = c_j† − c_j` and `G_r = ⟨B_j A_{j+r}⟩`:
/// `m_z = G_0`, `c_xx = G_1`, `c_yy = G_{−1}`, `c_zz = G_0² − G_1 G_{−1}`,
/// where `G_r = 2 N_r − δ_{r0} − 2 S_r`, `N_r = (1/L) Σ cos(kr) ⟨n_k⟩` and
/// `S_r = (1/L) Σ sin(kr) Δ_k / (2E_k)`.
pub fn xy_ground_correlators(p: &XYChainParams) -> Result<ChainCorrelators> {
    p.validate()?;
    let l = p.sites;
    let (j, h) = (p.lambda, 1.0);
    let (mut n0, mut n1, mut s1) = (0.0, 0.0, 0.0);
    for m in 0..l {
        let k = PI * (2 * m + 1) as f64 / l as f64;
        let (sk, ck) = k.sin_cos();
        let eps = 2.0 * (j * ck + h);
        let delta = 2.0 * p.g * j * sk;
        let e = eps.hypot(delta);
        let (occ, pair) = if e > 0.0 {
            (0.5 * (1.0 - eps / e), delta / (2.0 * e))
        } else {
            (0.5, 0.0)
        };
        n0 += occ;
        n1 += ck * occ;
        s1 += sk * pair;
    }
    let lf = l as f64;
    let (n0, n1, s1) = (n0 / lf, n1 / lf, s1 / lf);
    let g0 = 2.0 * n0 - 1.0;
    let g1 = 2.0 * n1 - 2.0 * s1;
    let gm1 = 2.0 * n1 + 2.0 * s1;
    Ok(ChainCorrelators {
        m_z: g0,
        c_xx: g1,
        c_yy: gm1,
        c_zz: g0 * g0 - g1 * gm1,
    })
}

/// X-state parameters of the nearest-neighbour two-site state.
pub fn xy_two_site_params(p: &XYChainParams) -> Result<XStateParams> {
    let c = xy_ground_correlators(p)?;
    Ok(XStateParams::from_correlators(c.m_z, c.m_z, c.c_xx, c.c_yy, c.c_zz))
}

/// Nearest-neighbour reduced density matrix of the ground state.
pub fn xy_two_site_rdm(p: &XYChainParams) -> Result<BipartiteDensityMatrix> {
    let x = xy_two_site_params(p)?;
    BipartiteDensityMatrix::new(2, 2, x.matrix())
}

/// Triad-constrained QD or QWD of the nearest-neighbour state.
pub fn xy_constrained(p: &XYChainParams, measure: Measure) -> Result<f64> {
    let x = xy_two_site_params(p)?;
    match measure {
        Measure::Qd => x_state_cqd(&x),
        Measure::Qwd => x_state_cqwd(&x),
    }
}

/// One point of a λ scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub sites: usize,
    pub lambda: f64,
    pub q: f64,
    pub dq_dlambda: f64,
}

/// λ scan with the estimated location of the steepest change of Q.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QptScan {
    pub sites: usize,
    pub measure: Measure,
    pub lambda_c: f64,
    pub curve: Vec<ScanPoint>,
}

/// Default central-difference step of dQ/dλ.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// A step that resolves the peak at every size: `min(1e-3, 1/(20 L))`
/// keeps the stencil inside the peak, whose width shrinks like `1/L`.
pub fn resolving_step(sites: usize) -> f64 {
    DERIVATIVE_STEP.min(1.0 / (20.0 * sites as f64))
}

fn dq(g: f64, sites: usize, lambda: f64, step: f64, measure: Measure) -> Result<(f64, f64)> {
    let q = |lam: f64| xy_constrained(&XYChainParams::new(sites, g, lam)?, measure);
    let q0 = q(lambda)?;
    let d = (q(lambda + step)? - q(lambda - step)?) / (2.0 * step);
    Ok((q0, d))
}

/// Vertex of the parabola through three equally spaced points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let h = x[1] - x[0];
    let denom = y[0] - 2.0 * y[1] + y[2];
    if denom == 0.0 {
        return x[1];
    }
    x[1] + 0.5 * h * (y[0] - y[2]) / denom
}

/// Q and dQ/dλ over `lambda_grid`; the transition estimate is the
/// parabolic refinement of the grid point where `|dQ/dλ|` is largest.
pub fn qpt_scan(g: f64, sites: usize, lambda_grid: &[f64], measure: Measure) -> Result<QptScan> {
    qpt_scan_with_step(g, sites, lambda_grid, measure, DERIVATIVE_STEP)
}

/// [`qpt_scan`] with an explicit central-difference step.
pub fn qpt_scan_with_step(g: f64, sites: usize, lambda_grid: &[f64], measure: Measure, step: f64) -> Result<QptScan> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::OutOfRange(format!("derivative step {step} must be positive")));
    }
    if lambda_grid.len() < 5 {
        return Err(Error::GridTooCoarse(format!(
            "{} grid points, need >= 5",
            lambda_grid.len()
        )));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridTooCoarse("lambda grid must be strictly increasing".into()));
    }
    let curve = lambda_grid
        .iter()
        .map(|&lambda| {
            let (q, d) = dq(g, sites, lambda, step, measure)?;
            Ok(ScanPoint {
                sites,
                lambda,
                q,
                dq_dlambda: d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda_c = peak_of(&curve)?;
    Ok(QptScan {
        sites,
        measure,
        lambda_c,
        curve,
    })
}

fn peak_of(curve: &[ScanPoint]) -> Result<f64> {
    let i = (0..curve.len())
        .max_by(|&a, &b| curve[a].dq_dlambda.abs().total_cmp(&curve[b].dq_dlambda.abs()))
        .unwrap_or(0);
    if i == 0 || i + 1 == curve.len() {
        return Err(Error::GridTooCoarse(format!(
            "|dQ/dlambda| is largest at the grid boundary lambda = {}",
            curve[i].lambda
        )));
    }
    let x = [curve[i - 1].lambda, curve[i].lambda, curve[i + 1].lambda];
    let y = [
        curve[i - 1].dq_dlambda.abs(),
        curve[i].dq_dlambda.abs(),
        curve[i + 1].dq_dlambda.abs(),
    ];
    if ((x[2] - x[1]) - (x[1] - x[0])).abs() > 1e-9 * (x[2] - x[0]) {
        return Ok(x[1]);
    }
    Ok(parabola_vertex(x, y))
}

/// Settings of [`locate_transition`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocateOptions {
    /// Initial uniform grid `[lo, hi]` with `points` points.
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Zoom passes; each one re-grids the bracket around the current peak.
    pub passes: usize,
    /// Central-difference step of dQ/dλ.
    pub step: f64,
}

impl Default for LocateOptions {
    fn default() -> Self {
        Self {
            lo: 0.8,
            hi: 1.2,
            points: 401,
            passes: 0,
            step: DERIVATIVE_STEP,
        }
    }
}

/// Location of the extremum of dQ/dλ by successive zoomed [`qpt_scan`]s.
/// Returns the final λ together with the coarse first-pass curve.
pub fn locate_transition(g: f64, sites: usize, measure: Measure, opts: &LocateOptions) -> Result<QptScan> {
    let grid = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let first = qpt_scan_with_step(g, sites, &grid(opts.lo, opts.hi, opts.points), measure, opts.step)?;
    let mut spacing = (opts.hi - opts.lo) / (opts.points - 1) as f64;
    let mut center = first.lambda_c;
    for _ in 0..opts.passes {
        let lo = center - 2.0 * spacing;
        let hi = center + 2.0 * spacing;
        let scan = qpt_scan_with_step(g, sites, &grid(lo, hi, 21), measure, opts.step)?;
        center = scan.lambda_c;
        spacing = (hi - lo) / 20.0;
    }
    Ok(QptScan {
        sites,
        measure,
        lambda_c: center,
        curve: first.curve,
    })
}

/// Power law `|λ_c^L − 1| = α L^{−γ}` fitted in log–log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizeFit {
    pub alpha: f64,
    pub gamma: f64,
    pub alpha_stderr: f64,
    pub gamma_stderr: f64,
}

/// Least squares of `ln|λ_c^L − 1|` against `ln L` (needs ≥ 4 points).
pub fn finite_size_fit(points: &[(usize, f64)]) -> Result<FiniteSizeFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} points, need >= 4", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(l, lc) in points {
        let d = (lc - 1.0).abs();
        if d == 0.0 {
            return Err(Error::DegenerateFit(format!("lambda_c = 1 exactly at L = {l}")));
        }
        xs.push((l as f64).ln());
        ys.push(d.ln());
    }
    let line = crate::stats::linear_fit(&xs, &ys)?;
    Ok(FiniteSizeFit {
        alpha: line.intercept.exp(),
        gamma: -line.slope,
        alpha_stderr: line.intercept.exp() * line.intercept_stderr,
        gamma_stderr: line.slope_stderr,
    })
}

/// Two-qubit XY model in a staggered field, in units of J.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalTwoQubitParams {
    pub g: f64,
    pub h1_over_j: f64,
    pub h2_over_j: f64,
    pub beta_j: f64,
}

/// Gibbs state of `H₂` as X-state parameters.
///
/// `h₊ = √(4g² + (h₁+h₂)²)`, `h₋ = √(4 + (h₂−h₁)²)`,
/// `u = cosh βh₊ + cosh βh₋`; the field terms enter with their sign,
/// `(h₁+h₂)/h₊` and `(h₂−h₁)/h₋`.
pub fn thermal_two_qubit(p: &ThermalTwoQubitParams) -> Result<XStateParams> {
    if !p.beta_j.is_finite() || p.beta_j <= 0.0 {
        return Err(Error::OutOfRange(format!("beta J = {} must be positive", p.beta_j)));
    }
    let (g, s, d, beta) = (p.g, p.h1_over_j + p.h2_over_j, p.h2_over_j - p.h1_over_j, p.beta_j);
    let hp = (4.0 * g * g + s * s).sqrt();
    let hm = (4.0 + d * d).sqrt();
    if hp.is_nan() || hp <= 0.0 {
        return Err(Error::OutOfRange("h+ vanishes (g = 0 and h1 + h2 = 0)".into()));
    }
    // Divide through by e^{β max(h±)} so large β does not overflow.
    let top = beta * hp.max(hm);
    let ch = |x: f64| 0.5 * ((x - top).exp() + (-x - top).exp());
    let sh = |x: f64| 0.5 * ((x - top).exp() - (-x - top).exp());
    let u = ch(beta * hp) + ch(beta * hm);
    let a = [
        (ch(beta * hp) - s / hp * sh(beta * hp)) / (2.0 * u),
        (ch(beta * hm) + d / hm * sh(beta * hm)) / (2.0 * u),
        (ch(beta * hm) - d / hm * sh(beta * hm)) / (2.0 * u),
        (ch(beta * hp) + s / hp * sh(beta * hp)) / (2.0 * u),
    ];
    let b1 = -g * sh(beta * hp) / (hp * u);
    let b2 = -sh(beta * hm) / (hm * u);
    let sum: f64 = a.iter().sum();
    let a = a.map(|x| (x / sum).max(0.0));
    XStateParams::new(a, b1 / sum, b2 / sum)
}

pub fn thermal_state(p: &ThermalTwoQubitParams) -> Result<BipartiteDensityMatrix> {
    make_x_state(&thermal_two_qubit(p)?)
}

/// One point of a thermal field scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub h1_over_j: f64,
    pub h2_over_j: f64,
    pub value_constrained: f64,
    pub value_actual: f64,
    pub ve: f64,
}

/// Voluntary error of `measure` over the square `|h₁/J|, |h₂/J| ≤ h_max`
/// sampled with spacing `step`, row-major in `h₁`.
pub fn thermal_scan(
    g: f64,
    beta_j: f64,
    h_max: f64,
    step: f64,
    set: &EarmarkedSet,
    measure: Measure,
    reference: &ReferenceOptions,
) -> Result<Vec<ThermalPoint>> {
    let axis = crate::stats::param_grid(-h_max, h_max, step)?;
    let pairs: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    pairs
        .par_iter()
        .map(|&(h1, h2)| {
            let rho = thermal_state(&ThermalTwoQubitParams {
                g,
                h1_over_j: h1,
                h2_over_j: h2,
                beta_j,
            })?;
            let e = voluntary_error(&rho, set, measure, reference)?;
            Ok(ThermalPoint {
                h1_over_j: h1,
                h2_over_j: h2,
                value_constrained: e.value_constrained,
                value_actual: e.value_actual.unwrap_or(f64::NAN),
                ve: e.ve.unwrap_or(f64::NAN),
            })
        })
        .collect()
}
