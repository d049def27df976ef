//! Rank-1 local projective measurements on subsystem A and the earmarked
//! sets built from them.
//!
//! A qubit basis is addressed by `(f_θ, φ)` with `f_θ = cos θ`. The two
//! points `(f_θ, φ)` and `(−f_θ, φ + π)` give the same projector pair.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix};
use crate::rng::{self, StreamRng};
use crate::states::Axis;
use crate::{Error, Result};

/// Orthonormality tolerance for a measurement basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Point on the qubit measurement sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitProjectorParams {
    pub f_theta: f64,
    pub phi: f64,
}

impl QubitProjectorParams {
    pub fn new(f_theta: f64, phi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&f_theta) {
            return Err(Error::OutOfRange(format!("f_theta = {f_theta} outside [-1, 1]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::OutOfRange(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(Self { f_theta, phi })
    }

    /// Clamps `f_θ` and wraps `φ` into range.
    pub fn wrapped(f_theta: f64, phi: f64) -> Self {
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self {
            f_theta: f_theta.clamp(-1.0, 1.0),
            phi,
        }
    }

    /// From polar angle θ (any real) and azimuth φ.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self::wrapped(theta.cos(), phi)
    }

    /// Representative with `φ ∈ [0, π)`, using the antipodal identification.
    pub fn folded(&self) -> Self {
        if self.phi >= PI {
            Self::wrapped(-self.f_theta, self.phi - PI)
        } else {
            *self
        }
    }

    pub fn theta(&self) -> f64 {
        self.f_theta.clamp(-1.0, 1.0).acos()
    }
}

/// Orthonormal basis of `C^dim`; its projectors form one local measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<Vec<C64>>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "need dim vectors of length dim, got {d} vectors"
            )));
        }
        for i in 0..d {
            for j in 0..d {
                let ip: C64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - target).norm() >= ORTHONORMAL_TOL {
                    return Err(Error::NonPhysicalOperator(format!(
                        "basis vectors {i},{j} have inner product {ip}"
                    )));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// Columns of a unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        Self::new((0..u.dim()).map(|j| u.column(j)).collect())
    }

    pub(crate) fn from_unitary_unchecked(u: &CMatrix) -> Self {
        Self {
            vectors: (0..u.dim()).map(|j| u.column(j)).collect(),
        }
    }

    pub fn computational(dim: usize) -> Self {
        Self::from_unitary_unchecked(&CMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k]
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(|v| CMatrix::outer(v, v)).collect()
    }

    /// Unitary whose columns are the basis vectors.
    pub fn unitary(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, |i, j| self.vectors[j][i])
    }

    /// Same projector set, vector order ignored.
    pub fn same_measurement(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let mut used = vec![false; other.dim()];
        self.vectors.iter().all(|v| {
            let hit = other.vectors.iter().enumerate().position(|(j, w)| {
                let ip: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
                !used[j] && (ip.norm_sqr() - 1.0).abs() < tol
            });
            match hit {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }
}

/// `{U|0⟩, U|1⟩}` with `U = [[cos θ/2, sin θ/2 e^{iφ}], [−sin θ/2 e^{−iφ}, cos θ/2]]`.
pub fn qubit_basis(p: QubitProjectorParams) -> Result<MeasurementBasis> {
    let p = QubitProjectorParams::new(p.f_theta, p.phi)?;
    Ok(qubit_basis_angles(p.theta(), p.phi))
}

/// Unchecked variant taking θ directly; any real θ and φ are accepted.
pub fn qubit_basis_angles(theta: f64, phi: f64) -> MeasurementBasis {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    MeasurementBasis {
        vectors: vec![vec![C64::new(c, 0.0), -s * e.conj()], vec![s * e, C64::new(c, 0.0)]],
    }
}

/// Haar-random orthonormal basis from a Gram–Schmidt pass over a complex
/// Gaussian matrix.
pub fn random_basis_with(dim: usize, rng: &mut StreamRng) -> MeasurementBasis {
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while vectors.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for w in &vectors {
                let ip: C64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(w) {
                    *x -= ip * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            vectors.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    MeasurementBasis { vectors }
}

pub fn random_basis(dim: usize, seed: u64) -> Result<MeasurementBasis> {
    if dim < 2 {
        return Err(Error::UnsupportedDim(dim));
    }
    Ok(random_basis_with(dim, &mut rng::stream(seed, 0)))
}

/// Spin-1 operator along `axis` in the `|m=+1⟩,|0⟩,|−1⟩` basis.
pub fn spin1(axis: Axis) -> CMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let entries = match axis {
        Axis::X => vec![z, re(r), z, re(r), z, re(r), z, re(r), z],
        Axis::Y => vec![z, im(-r), z, im(r), z, im(-r), z, im(r), z],
        Axis::Z => vec![re(1.0), z, z, z, z, z, z, z, re(-1.0)],
    };
    CMatrix::from_row_major(entries).expect("3x3")
}

/// Eigenbasis of a Hermitian matrix, ordered by descending eigenvalue, each
/// vector's first non-negligible component made real positive.
fn phase_fixed_eigenbasis(m: &CMatrix) -> MeasurementBasis {
    let eig = linalg::eigh(m);
    let d = m.dim();
    let vectors = (0..d)
        .rev()
        .map(|j| {
            let v = eig.vectors.column(j);
            let lead = v
                .iter()
                .find(|z| z.norm() > 1e-9)
                .copied()
                .unwrap_or(C64::new(1.0, 0.0));
            let phase = lead.conj() / lead.norm();
            v.into_iter().map(|z| z * phase).collect()
        })
        .collect();
    MeasurementBasis { vectors }
}

/// Construction that produced an earmarked set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    CircleFixedFTheta,
    CircleFixedPhi,
    DiscStack,
    SphereGrid,
    Triad,
    SpinTriad,
}

/// Serialisable description of an earmarked set; the bases are rebuilt from
/// it on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarmarkedSetSpec {
    pub kind: SetKind,
    pub params: Vec<f64>,
    pub n: usize,
}

impl EarmarkedSetSpec {
    pub fn build(&self) -> Result<EarmarkedSet> {
        let count = |x: f64| -> Result<usize> {
            if x < 0.0 || x.fract() != 0.0 {
                return Err(Error::OutOfRange(format!("{x} is not a count")));
            }
            Ok(x as usize)
        };
        let param = |i: usize| -> Result<f64> {
            self.params
                .get(i)
                .copied()
                .ok_or_else(|| Error::OutOfRange(format!("{:?} needs parameter {i}", self.kind)))
        };
        let set = match self.kind {
            SetKind::CircleFixedFTheta => circle_fixed_ftheta(param(0)?, self.n)?,
            SetKind::CircleFixedPhi => circle_fixed_phi(param(0)?, self.n)?,
            SetKind::DiscStack => disc_stack(param(0)?, count(param(1)?)?, count(param(2)?)?)?,
            SetKind::SphereGrid => sphere_grid(count(param(0)?)?, count(param(1)?)?)?,
            SetKind::Triad => triad(2)?,
            SetKind::SpinTriad => triad(3)?,
        };
        if set.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "spec says n = {} but construction gives {}",
                self.n,
                set.len()
            )));
        }
        Ok(set)
    }
}

/// Finite list of measurement bases plus the construction that made it.
/// Qubit sets also remember the `(f_θ, φ)` of every member.
#[derive(Clone, Debug, PartialEq)]
pub struct EarmarkedSet {
    kind: SetKind,
    params: Vec<f64>,
    bases: Vec<MeasurementBasis>,
    points: Option<Vec<QubitProjectorParams>>,
}

impl EarmarkedSet {
    fn from_points(kind: SetKind, params: Vec<f64>, points: Vec<QubitProjectorParams>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let bases = points.iter().map(|p| qubit_basis_angles(p.theta(), p.phi)).collect();
        Ok(Self {
            kind,
            params,
            bases,
            points: Some(points),
        })
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn bases(&self) -> &[MeasurementBasis] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bases[0].dim()
    }

    /// `(f_θ, φ)` of member `k`, for qubit sets.
    pub fn point(&self, k: usize) -> Option<QubitProjectorParams> {
        self.points.as_ref().map(|p| p[k])
    }

    pub fn points(&self) -> Option<&[QubitProjectorParams]> {
        self.points.as_deref()
    }

    pub fn spec(&self) -> EarmarkedSetSpec {
        EarmarkedSetSpec {
            kind: self.kind,
            params: self.params.clone(),
            n: self.len(),
        }
    }
}

impl Serialize for EarmarkedSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EarmarkedSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        EarmarkedSetSpec::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

fn check_f(f_theta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&f_theta) {
        return Err(Error::OutOfRange(format!("f_theta = {f_theta} outside [-1, 1]")));
    }
    Ok(())
}

/// `n` bases at fixed `f_θ`, `φ_k = 2πk/n`.
pub fn circle_fixed_ftheta(f_theta: f64, n: usize) -> Result<EarmarkedSet> {
    check_f(f_theta)?;
    let points = (0..n)
        .map(|k| QubitProjectorParams::wrapped(f_theta, TAU * k as f64 / n as f64))
        .collect();
    EarmarkedSet::from_points(SetKind::CircleFixedFTheta, vec![f_theta], points)
}

/// `n ≥ 2` bases at fixed `φ` from `n` equal divisions of `f_θ ∈ [−1, 1)`:
/// `f_θ = −1 + 2j/n`. The excluded end `f_θ = 1` is the same measurement
/// as `f_θ = −1`.
pub fn circle_fixed_phi(phi: f64, n: usize) -> Result<EarmarkedSet> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("circle_fixed_phi needs n >= 2, got {n}")));
    }
    let points = (0..n)
        .map(|j| QubitProjectorParams::wrapped(-1.0 + 2.0 * j as f64 / n as f64, phi))
        .collect();
    EarmarkedSet::from_points(SetKind::CircleFixedPhi, vec![phi], points)
}

/// `n2` (odd) parallel circles at `f_center ± j h`, `h = 2/(n2 − 1)`, each
/// carrying `n1` equispaced `φ`. Circles beyond the poles are clamped.
pub fn disc_stack(f_center: f64, n1: usize, n2: usize) -> Result<EarmarkedSet> {
    check_f(f_center)?;
    if n2.is_multiple_of(2) {
        return Err(Error::EvenN2(n2));
    }
    let half = (n2 / 2) as i64;
    let h = if n2 > 1 { 2.0 / (n2 - 1) as f64 } else { 0.0 };
    let mut points = Vec::with_capacity(n1 * n2);
    for j in -half..=half {
        let f = (f_center + j as f64 * h).clamp(-1.0, 1.0);
        for k in 0..n1 {
            points.push(QubitProjectorParams::wrapped(f, TAU * k as f64 / n1 as f64));
        }
    }
    EarmarkedSet::from_points(SetKind::DiscStack, vec![f_center, n1 as f64, n2 as f64], points)
}

/// `n1 · n2` bases: `φ_k = 2πk/n1` and `f_θ` at the `n2` bin midpoints of
/// `[−1, 1]`.
pub fn sphere_grid(n1: usize, n2: usize) -> Result<EarmarkedSet> {
    let mut points = Vec::with_capacity(n1 * n2);
    for j in 0..n2 {
        let f = -1.0 + (2 * j + 1) as f64 / n2 as f64;
        for k in 0..n1 {
            points.push(QubitProjectorParams::wrapped(f, TAU * k as f64 / n1 as f64));
        }
    }
    EarmarkedSet::from_points(SetKind::SphereGrid, vec![n1 as f64, n2 as f64], points)
}

/// Pauli eigenbases (`dim = 2`, order x, y, z) or spin-1 eigenbases
/// (`dim = 3`, order x, y, z).
pub fn triad(dim: usize) -> Result<EarmarkedSet> {
    match dim {
        2 => EarmarkedSet::from_points(
            SetKind::Triad,
            vec![2.0],
            vec![
                QubitProjectorParams { f_theta: 0.0, phi: 0.0 },
                QubitProjectorParams {
                    f_theta: 0.0,
                    phi: PI / 2.0,
                },
                QubitProjectorParams { f_theta: 1.0, phi: 0.0 },
            ],
        ),
        3 => Ok(EarmarkedSet {
            kind: SetKind::SpinTriad,
            params: vec![3.0],
            bases: Axis::ALL.iter().map(|&a| phase_fixed_eigenbasis(&spin1(a))).collect(),
            points: None,
        }),
        d => Err(Error::UnsupportedDim(d)),
    }
}
