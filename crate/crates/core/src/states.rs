//! Bipartite density matrices and every state family used by the
//! experiments: Haar-induced fixed-rank states, the nine-parameter correlator
//! state and its single-magnetization special case, X states, and three
//! PPT bound entangled families.

use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, HermitianOperator, Subsystem, HERMITIAN_TOL, PSD_TOL};
use crate::rng::{self, StreamRng};
use crate::{Error, Result};

/// Trace tolerance for a valid state.
pub const TRACE_TOL: f64 = 1e-10;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Cartesian spin axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Pauli matrix along `axis`.
pub fn pauli(axis: Axis) -> CMatrix {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let entries = match axis {
        Axis::X => vec![z, c(1.0), c(1.0), z],
        Axis::Y => vec![z, -i, i, z],
        Axis::Z => vec![c(1.0), z, z, c(-1.0)],
    };
    CMatrix::from_row_major(entries).expect("2x2")
}

/// Complex Hermitian unit-trace PSD operator on `C^dA ⊗ C^dB`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteDensityMatrix {
    d_a: usize,
    d_b: usize,
    op: HermitianOperator,
}

impl BipartiteDensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(d_a: usize, d_b: usize, m: CMatrix) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != m.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{d_a}x{d_b} does not match matrix dimension {}",
                m.dim()
            )));
        }
        let asym = m.hermitian_asymmetry();
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let op = HermitianOperator::from_hermitian_part(&m);
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NonPhysicalOperator(format!("trace {tr}")));
        }
        let min = op.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { d_a, d_b, op })
    }

    /// Normalises `m` by its trace before validating.
    pub fn normalized(d_a: usize, d_b: usize, m: CMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if tr.abs() < 1e-300 {
            return Err(Error::NonPhysicalOperator("zero trace".into()));
        }
        Self::new(d_a, d_b, m.scale(1.0 / tr))
    }

    /// Pure state |ψ⟩⟨ψ| (normalised internally).
    pub fn pure(d_a: usize, d_b: usize, psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(d_a, d_b, CMatrix::outer(&v, &v))
    }

    pub fn product(a: &HermitianOperator, b: &HermitianOperator) -> Result<Self> {
        Self::new(a.dim(), b.dim(), linalg::tensor_product(a, b).into_matrix())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn entropy(&self) -> f64 {
        linalg::entropy_of_spectrum(&self.op.eigenvalues())
    }

    pub fn purity(&self) -> f64 {
        self.matrix().matmul(self.matrix()).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues()
    }

    /// Number of eigenvalues above `tol`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }

    pub fn reduced(&self, keep: Subsystem) -> HermitianOperator {
        linalg::partial_trace(&self.op, self.dims(), keep).expect("dims checked at construction")
    }

    pub fn partial_transpose(&self, on: Subsystem) -> HermitianOperator {
        linalg::partial_transpose(&self.op, self.dims(), on).expect("dims checked at construction")
    }

    /// Same state with the two parties exchanged (dims become (dB, dA)).
    pub fn swap_parties(&self) -> Self {
        let (da, db) = self.dims();
        let m = self.matrix();
        let swapped = CMatrix::from_fn(da * db, |r, col| {
            let (b, a) = (r / da, r % da);
            let (b2, a2) = (col / da, col % da);
            m[(a * db + b, a2 * db + b2)]
        });
        Self {
            d_a: db,
            d_b: da,
            op: HermitianOperator::from_hermitian_part(&swapped),
        }
    }

    /// `(u_A ⊗ u_B) ρ (u_A ⊗ u_B)†`.
    pub fn local_unitary(&self, u_a: &CMatrix, u_b: &CMatrix) -> Self {
        let u = u_a.kron(u_b);
        Self {
            d_a: self.d_a,
            d_b: self.d_b,
            op: self.op.unitary_conjugate(&u),
        }
    }

    /// Two-qubit check: every entry outside the diagonal and anti-diagonal
    /// vanishes within `tol`.
    pub fn is_x_state(&self, tol: f64) -> bool {
        if self.dims() != (2, 2) {
            return false;
        }
        let m = self.matrix();
        (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || m[(i, j)].norm() <= tol))
    }

    pub fn to_document(&self) -> StateDocument {
        StateDocument {
            d_a: self.d_a,
            d_b: self.d_b,
            entries: self.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_document(doc: &StateDocument) -> Result<Self> {
        let m = CMatrix::from_row_major(doc.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())?;
        Self::new(doc.d_a, doc.d_b, m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: StateDocument = serde_json::from_str(s)?;
        Self::from_document(&doc)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// JSON form of a state: `{dA, dB, entries: [[re, im], ...]}` in row-major
/// order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub entries: Vec<[f64; 2]>,
}

// ---------------------------------------------------------------------------
// Haar-induced fixed-rank states
// ---------------------------------------------------------------------------

/// Draws a state from the measure induced by a Haar-random pure state on
/// `C^(dA·dB) ⊗ C^rank` with the ancilla traced out.
pub fn sample_haar_mixed_with(
    d_a: usize,
    d_b: usize,
    rank: usize,
    rng: &mut StreamRng,
) -> Result<BipartiteDensityMatrix> {
    let d = d_a * d_b;
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    // Ginibre d x rank: its columns are the ancilla components of an
    // (unnormalised) Haar pure state.
    let g: Vec<C64> = (0..d * rank)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let m = CMatrix::from_fn(d, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    BipartiteDensityMatrix::normalized(d_a, d_b, m)
}

/// Single draw keyed by `seed` (stream index 0).
pub fn sample_haar_mixed(d_a: usize, d_b: usize, rank: usize, seed: u64) -> Result<BipartiteDensityMatrix> {
    sample_haar_mixed_with(d_a, d_b, rank, &mut rng::stream(seed, 0))
}

/// Reproducible indexed sampler: `sample(i)` depends only on `(seed, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaarSampler {
    pub d_a: usize,
    pub d_b: usize,
    pub rank: usize,
    pub seed: u64,
}

impl HaarSampler {
    pub fn sample(&self, index: u64) -> Result<BipartiteDensityMatrix> {
        sample_haar_mixed_with(self.d_a, self.d_b, self.rank, &mut rng::stream(self.seed, index))
    }
}

/// Positive or non-positive partial transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PptClass {
    Ppt,
    Nppt,
}

impl std::fmt::Display for PptClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PptClass::Ppt => "PPT",
            PptClass::Nppt => "NPPT",
        })
    }
}

/// PPT iff the partial transpose has no eigenvalue below `-1e-10`.
pub fn classify_ppt(rho: &BipartiteDensityMatrix) -> PptClass {
    if rho.partial_transpose(Subsystem::B).min_eigenvalue() >= -PSD_TOL {
        PptClass::Ppt
    } else {
        PptClass::Nppt
    }
}

// ---------------------------------------------------------------------------
// Correlator-parametrised two-qubit states
// ---------------------------------------------------------------------------

/// Diagonal correlators and the two local Bloch vectors of a two-qubit state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorStateParams {
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
    pub c_a: [f64; 3],
    pub c_b: [f64; 3],
}

impl CorrelatorStateParams {
    fn check_ranges(&self) -> Result<()> {
        let all = [self.c_xx, self.c_yy, self.c_zz]
            .into_iter()
            .chain(self.c_a)
            .chain(self.c_b);
        for v in all {
            if !(-1.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::OutOfRange(format!("correlator parameter {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }
}

/// `¼[I⊗I + Σ c_αα σ^α⊗σ^α + Σ c^A_α σ^α⊗I + Σ c^B_β I⊗σ^β]`.
pub fn make_correlator_state(p: &CorrelatorStateParams) -> Result<BipartiteDensityMatrix> {
    p.check_ranges()?;
    let id = CMatrix::identity(2);
    let mut m = CMatrix::identity(4);
    for (k, axis) in Axis::ALL.into_iter().enumerate() {
        let s = pauli(axis);
        let corr = [p.c_xx, p.c_yy, p.c_zz][k];
        m = m.add(&s.kron(&s).scale(corr));
        m = m.add(&s.kron(&id).scale(p.c_a[k]));
        m = m.add(&id.kron(&s).scale(p.c_b[k]));
    }
    BipartiteDensityMatrix::new(2, 2, m.scale(0.25))
}

/// Correlator state whose only magnetizations lie along `axis`.
pub fn make_rho_m(c_xx: f64, c_yy: f64, c_zz: f64, axis: Axis, m_a: f64, m_b: f64) -> Result<BipartiteDensityMatrix> {
    let k = axis as usize;
    let mut p = CorrelatorStateParams {
        c_xx,
        c_yy,
        c_zz,
        ..Default::default()
    };
    p.c_a[k] = m_a;
    p.c_b[k] = m_b;
    make_correlator_state(&p)
}

/// Rejection sample of the nine-parameter family: every parameter uniform in
/// `[-1, 1]`, retried until the matrix is positive semidefinite.
pub fn sample_correlator_state(rng: &mut StreamRng) -> (CorrelatorStateParams, BipartiteDensityMatrix) {
    loop {
        let mut u = || rng.random_range(-1.0..=1.0);
        let p = CorrelatorStateParams {
            c_xx: u(),
            c_yy: u(),
            c_zz: u(),
            c_a: [u(), u(), u()],
            c_b: [u(), u(), u()],
        };
        if let Ok(rho) = make_correlator_state(&p) {
            return (p, rho);
        }
    }
}

/// Parameters of a single-axis-magnetization state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoMParams {
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
    pub axis: Axis,
    pub m_a: f64,
    pub m_b: f64,
}

/// Rejection sample of the five free parameters of `make_rho_m`.
pub fn sample_rho_m(axis: Axis, rng: &mut StreamRng) -> (RhoMParams, BipartiteDensityMatrix) {
    loop {
        let mut u = || rng.random_range(-1.0..=1.0);
        let p = RhoMParams {
            c_xx: u(),
            c_yy: u(),
            c_zz: u(),
            axis,
            m_a: u(),
            m_b: u(),
        };
        if let Ok(rho) = make_rho_m(p.c_xx, p.c_yy, p.c_zz, axis, p.m_a, p.m_b) {
            return (p, rho);
        }
    }
}

// ---------------------------------------------------------------------------
// X states
// ---------------------------------------------------------------------------

/// Two-qubit X state in the computational ordering |00⟩,|01⟩,|10⟩,|11⟩:
/// diagonal `a1..a4`, `b1` couples |00⟩–|11⟩ and `b2` couples |01⟩–|10⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub a: [f64; 4],
    pub b1: f64,
    pub b2: f64,
}

impl XStateParams {
    pub fn new(a: [f64; 4], b1: f64, b2: f64) -> Result<Self> {
        let p = Self { a, b1, b2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let [a1, a2, a3, a4] = self.a;
        if self.a.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
            return Err(Error::InvalidXState(format!("negative population in {:?}", self.a)));
        }
        let sum: f64 = self.a.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidXState(format!("populations sum to {sum}")));
        }
        if a1 * a4 < self.b1 * self.b1 - 1e-12 || a2 * a3 < self.b2 * self.b2 - 1e-12 {
            return Err(Error::InvalidXState("coherence exceeds positivity bound".into()));
        }
        Ok(())
    }

    pub fn matrix(&self) -> CMatrix {
        let [a1, a2, a3, a4] = self.a;
        let mut m = CMatrix::from_real_diagonal(&[a1, a2, a3, a4]);
        m[(0, 3)] = c(self.b1);
        m[(3, 0)] = c(self.b1);
        m[(1, 2)] = c(self.b2);
        m[(2, 1)] = c(self.b2);
        m
    }

    /// Reads the X-state entries off a two-qubit state (real parts of the
    /// anti-diagonal).
    pub fn from_state(rho: &BipartiteDensityMatrix) -> Result<Self> {
        if !rho.is_x_state(1e-10) {
            return Err(Error::InvalidXState("state is not of X form".into()));
        }
        let m = rho.matrix();
        if m[(0, 3)].im.abs() > 1e-10 || m[(1, 2)].im.abs() > 1e-10 {
            return Err(Error::InvalidXState("complex coherences".into()));
        }
        Self::new(
            [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re],
            m[(0, 3)].re,
            m[(1, 2)].re,
        )
    }

    /// X state built from transverse magnetizations and diagonal correlators.
    pub fn from_correlators(m_a: f64, m_b: f64, c_xx: f64, c_yy: f64, c_zz: f64) -> Self {
        Self {
            a: [
                (1.0 + m_a + m_b + c_zz) / 4.0,
                (1.0 + m_a - m_b - c_zz) / 4.0,
                (1.0 - m_a + m_b - c_zz) / 4.0,
                (1.0 - m_a - m_b + c_zz) / 4.0,
            ],
            b1: (c_xx - c_yy) / 4.0,
            b2: (c_xx + c_yy) / 4.0,
        }
    }

    /// Random valid X state: Dirichlet(1,1,1,1) populations, coherences
    /// uniform within their positivity bounds.
    pub fn random(rng: &mut StreamRng) -> Self {
        let e: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        let mut a = [e[0] / s, e[1] / s, e[2] / s, e[3] / s];
        a[3] = 1.0 - a[0] - a[1] - a[2];
        let r1 = (a[0] * a[3]).sqrt();
        let r2 = (a[1] * a[2]).sqrt();
        Self {
            a,
            b1: rng.random_range(-1.0..=1.0) * r1,
            b2: rng.random_range(-1.0..=1.0) * r2,
        }
    }
}

pub fn make_x_state(p: &XStateParams) -> Result<BipartiteDensityMatrix> {
    p.validate()?;
    BipartiteDensityMatrix::new(2, 2, p.matrix())
}

// ---------------------------------------------------------------------------
// Bound entangled families
// ---------------------------------------------------------------------------

fn check_unit(name: &str, x: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&x) {
        return Err(Error::OutOfRange(format!("{name} = {x} outside [0, {hi}]")));
    }
    Ok(())
}

/// 2x4 PPT bound entangled family, `0 <= b <= 1`. Qubit is party A.
pub fn be_2x4(b: f64) -> Result<BipartiteDensityMatrix> {
    check_unit("b", b, 1.0)?;
    let f = (1.0 + b) / 2.0;
    let g = (1.0 - b * b).sqrt() / 2.0;
    let mut m = CMatrix::zeros(8);
    for i in 0..4 {
        m[(i, i)] = c(b);
    }
    for i in 0..3 {
        m[(i, i + 5)] = c(b);
        m[(i + 5, i)] = c(b);
        m[(i + 5, i + 5)] = c(b);
    }
    m[(4, 4)] = c(f);
    m[(7, 7)] = c(f);
    m[(4, 7)] = c(g);
    m[(7, 4)] = c(g);
    BipartiteDensityMatrix::new(2, 4, m.scale(1.0 / (7.0 * b + 1.0)))
}

/// 3x3 PPT bound entangled family, `0 <= a <= 1`; not symmetric under
/// exchange of the parties.
pub fn be_3x3_tiles(a: f64) -> Result<BipartiteDensityMatrix> {
    check_unit("a", a, 1.0)?;
    let f = (1.0 + a) / 2.0;
    let g = (1.0 - a * a).sqrt() / 2.0;
    let mut m = CMatrix::zeros(9);
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            m[(i, j)] = c(a);
        }
    }
    for &i in &[1usize, 2, 3, 5, 7] {
        m[(i, i)] = c(a);
    }
    m[(6, 6)] = c(f);
    m[(8, 8)] = c(f);
    m[(6, 8)] = c(g);
    m[(8, 6)] = c(g);
    BipartiteDensityMatrix::new(3, 3, m.scale(1.0 / (8.0 * a + 1.0)))
}

/// `(2/7)|ψ⟩⟨ψ| + (α/7)ϱ₊ + ((5−α)/7)ϱ₋` on two qutrits, `0 <= α <= 5`.
pub fn be_3x3_horodecki(alpha: f64) -> Result<BipartiteDensityMatrix> {
    check_unit("alpha", alpha, 5.0)?;
    let mut m = CMatrix::zeros(9);
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            m[(i, j)] = c(2.0 / 21.0);
        }
    }
    // |01⟩,|12⟩,|20⟩ and |10⟩,|21⟩,|02⟩ in the 3i+j ordering.
    for &i in &[1usize, 5, 6] {
        m[(i, i)] = c(alpha / 21.0);
    }
    for &i in &[3usize, 7, 2] {
        m[(i, i)] = c((5.0 - alpha) / 21.0);
    }
    BipartiteDensityMatrix::new(3, 3, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_phi_plus() -> BipartiteDensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        BipartiteDensityMatrix::pure(2, 2, &[c(s), c(0.0), c(0.0), c(s)]).unwrap()
    }

    #[test]
    fn haar_rank_one_is_pure() {
        let rho = sample_haar_mixed(2, 2, 1, 3).unwrap();
        assert!(rho.entropy().abs() < 1e-9);
    }

    #[test]
    fn haar_full_rank_count() {
        let rho = sample_haar_mixed(2, 2, 4, 5).unwrap();
        assert_eq!(rho.numerical_rank(1e-10), 4);
    }

    #[test]
    fn haar_rank_two_on_2x4() {
        let rho = sample_haar_mixed(2, 4, 2, 9).unwrap();
        assert_eq!(rho.numerical_rank(1e-10), 2);
        let rb = rho.reduced(Subsystem::B);
        assert!((rb.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_invalid_rank() {
        assert!(matches!(sample_haar_mixed(2, 2, 5, 1), Err(Error::InvalidRank { .. })));
        assert!(matches!(sample_haar_mixed(2, 2, 0, 1), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn haar_is_bitwise_reproducible() {
        let s = HaarSampler {
            d_a: 2,
            d_b: 2,
            rank: 3,
            seed: 42,
        };
        assert_eq!(s.sample(17).unwrap(), s.sample(17).unwrap());
        assert_ne!(s.sample(17).unwrap(), s.sample(18).unwrap());
    }

    #[test]
    fn ppt_examples() {
        assert_eq!(classify_ppt(&bell_phi_plus()), PptClass::Nppt);
        let mixed = BipartiteDensityMatrix::new(2, 2, CMatrix::identity(4).scale(0.25)).unwrap();
        assert_eq!(classify_ppt(&mixed), PptClass::Ppt);
    }

    #[test]
    fn correlator_corners() {
        let zero = make_correlator_state(&CorrelatorStateParams::default()).unwrap();
        assert!(zero.matrix().max_abs_diff(&CMatrix::identity(4).scale(0.25)) < 1e-15);

        let singlet = make_correlator_state(&CorrelatorStateParams {
            c_xx: -1.0,
            c_yy: -1.0,
            c_zz: -1.0,
            ..Default::default()
        })
        .unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = CMatrix::outer(&[c(0.0), c(s), c(-s), c(0.0)], &[c(0.0), c(s), c(-s), c(0.0)]);
        assert!(singlet.matrix().max_abs_diff(&expect) < 1e-15);

        let classical = make_correlator_state(&CorrelatorStateParams {
            c_zz: 1.0,
            ..Default::default()
        })
        .unwrap();
        let expect = CMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(classical.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn correlator_rejects_non_positive() {
        let bad = CorrelatorStateParams {
            c_xx: 1.0,
            c_yy: 1.0,
            c_zz: 1.0,
            ..Default::default()
        };
        assert!(matches!(make_correlator_state(&bad), Err(Error::NotPositive(_))));
        let out = CorrelatorStateParams {
            c_xx: 1.5,
            ..Default::default()
        };
        assert!(matches!(make_correlator_state(&out), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn rho_m_z_axis_is_x_state() {
        let rho = make_rho_m(0.3, -0.2, 0.1, Axis::Z, 0.2, -0.1).unwrap();
        assert!(rho.is_x_state(1e-15));
        let bell_diag = make_rho_m(0.3, -0.2, 0.1, Axis::X, 0.0, 0.0).unwrap();
        assert!(bell_diag.is_x_state(1e-15));
        let x_mag = make_rho_m(0.3, -0.2, 0.1, Axis::X, 0.2, -0.1).unwrap();
        assert!(!x_mag.is_x_state(1e-3));
    }

    #[test]
    fn worst_case_rho_m_variants() {
        // Positive only when c_xx > 0; the sign of the magnetizations and the
        // y/z exchange are free.
        let (x, y, z) = (0.956861, 0.267575, 0.275867);
        for (cyy, czz) in [(y, -z), (-y, z), (-z, y), (z, -y)] {
            for s in [1.0, -1.0] {
                assert!(make_rho_m(x, cyy, czz, Axis::X, s * 0.94976, s * 0.907559).is_ok());
                assert!(make_rho_m(-x, cyy, czz, Axis::X, s * 0.94976, s * 0.907559).is_err());
            }
        }
    }

    #[test]
    fn x_state_from_correlators_matches_correlator_state() {
        let (ma, mb, cxx, cyy, czz) = (0.2, -0.1, 0.3, -0.25, 0.15);
        let direct = make_rho_m(cxx, cyy, czz, Axis::Z, ma, mb).unwrap();
        let x = make_x_state(&XStateParams::from_correlators(ma, mb, cxx, cyy, czz)).unwrap();
        assert!(direct.matrix().max_abs_diff(x.matrix()) < 1e-15);
        let back = XStateParams::from_state(&direct).unwrap();
        assert!((back.b1 - (cxx - cyy) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn x_state_validation() {
        assert!(XStateParams::new([0.5, 0.0, 0.0, 0.5], 0.5, 0.0).is_ok());
        assert!(matches!(
            XStateParams::new([0.5, 0.0, 0.0, 0.5], 0.6, 0.0),
            Err(Error::InvalidXState(_))
        ));
        assert!(matches!(
            XStateParams::new([0.5, 0.2, 0.0, 0.5], 0.0, 0.0),
            Err(Error::InvalidXState(_))
        ));
    }

    #[test]
    fn be_2x4_family() {
        for &b in &[0.05, 0.3, 0.5, 0.9] {
            let rho = be_2x4(b).unwrap();
            assert_eq!(classify_ppt(&rho), PptClass::Ppt, "b={b}");
        }
        let rho0 = be_2x4(0.0).unwrap();
        assert!((rho0.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(rho0.numerical_rank(1e-10), 1);
        let rho1 = be_2x4(1.0).unwrap();
        assert!((rho1.matrix()[(4, 4)].re - 1.0 / 8.0).abs() < 1e-15);
        assert_eq!(rho1.matrix()[(4, 7)].re, 0.0);
        assert!(matches!(be_2x4(1.1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn be_3x3_tiles_family() {
        for &a in &[0.1, 0.5, 0.9] {
            assert_eq!(classify_ppt(&be_3x3_tiles(a).unwrap()), PptClass::Ppt, "a={a}");
        }
        let rho0 = be_3x3_tiles(0.0).unwrap();
        assert!(rho0.numerical_rank(1e-10) < 9);
        let rho = be_3x3_tiles(0.4).unwrap();
        assert!(rho.swap_parties().matrix().max_abs_diff(rho.matrix()) > 1e-3);
        assert!(matches!(be_3x3_tiles(-0.1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn be_3x3_horodecki_family() {
        for &alpha in &[0.0, 1.3, 2.5, 3.5, 5.0] {
            let rho = be_3x3_horodecki(alpha).unwrap();
            let third = CMatrix::identity(3).scale(1.0 / 3.0);
            assert!(rho.reduced(Subsystem::A).matrix().max_abs_diff(&third) < 1e-15);
            assert!(rho.reduced(Subsystem::B).matrix().max_abs_diff(&third) < 1e-15);
        }
        for &alpha in &[3.2, 3.6, 4.0] {
            assert_eq!(classify_ppt(&be_3x3_horodecki(alpha).unwrap()), PptClass::Ppt);
        }
        assert_eq!(classify_ppt(&be_3x3_horodecki(5.0).unwrap()), PptClass::Nppt);
        assert!(matches!(be_3x3_horodecki(5.5), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn swap_parties_exchanges_marginals() {
        let rho = sample_haar_mixed(2, 3, 3, 8).unwrap();
        let sw = rho.swap_parties();
        assert_eq!(sw.dims(), (3, 2));
        assert!(
            sw.reduced(Subsystem::A)
                .matrix()
                .max_abs_diff(rho.reduced(Subsystem::B).matrix())
                < 1e-14
        );
        assert!(sw.swap_parties().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let rho = sample_haar_mixed(2, 2, 2, 4).unwrap();
        let back = BipartiteDensityMatrix::from_json(&rho.to_json().unwrap()).unwrap();
        assert_eq!(rho, back);
        let v: serde_json::Value = serde_json::from_str(&rho.to_json().unwrap()).unwrap();
        assert_eq!(v["dA"], 2);
        assert_eq!(v["entries"].as_array().unwrap().len(), 16);
    }
}
