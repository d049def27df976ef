//! Dense complex linear algebra for the small (dimension <= 9) operators that
//! appear in two-party correlation calculations.
//!
//! Eigendecomposition is a cyclic complex Jacobi sweep. Entropies are in bits
//! and treat eigenvalues at or below [`EIGEN_CLAMP`] as contributing zero.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Eigenvalues at or below this contribute nothing to an entropy.
pub const EIGEN_CLAMP: f64 = 1e-12;
/// Largest tolerated |A_ij - conj(A_ji)| for a Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated for a physical (PSD) operator.
pub const PSD_TOL: f64 = 1e-10;
/// Largest tolerated trace deviation for entropy inputs.
pub const ENTROPY_TRACE_TOL: f64 = 1e-8;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { n, data: entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product |v><w|.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        assert_eq!(v.len(), w.len());
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A_ij - conj(A_ji)|.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            if i == j {
                C64::new(self[(i, i)].re, 0.0)
            } else {
                (self[(i, j)] + self[(j, i)].conj()) * 0.5
            }
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// A square complex matrix that is Hermitian within [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        let asym = m.hermitian_asymmetry();
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Wraps the Hermitian part of `m`; for operators that are Hermitian by
    /// construction up to rounding.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_real_diagonal(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(CMatrix::identity(n).scale(1.0 / n as f64))
    }

    /// Projector onto the normalised vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        Self::from_hermitian_part(&CMatrix::outer(v, v))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.0)
    }

    pub fn eigen(&self) -> Eigen {
        eigh(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `u ρ u†` for unitary `u`.
    pub fn unitary_conjugate(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_part(&self.0.conjugate_by(u))
    }

    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        self.0.matmul(observable).trace().re
    }
}

/// Eigenpairs sorted by ascending eigenvalue; `vectors` holds them as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the upper
/// triangle is trusted.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    match m.dim() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(0, 1)].norm();
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + b * b).sqrt();
            vec![mean - r, mean + r]
        }
        _ => jacobi(m, false).values,
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(m: &CMatrix) -> Eigen {
    jacobi(m, true)
}

fn jacobi(m: &CMatrix, want_vectors: bool) -> Eigen {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs < 1e-300 {
                    continue;
                }
                // Phase-rotate column q so the pivot is real, then apply a real
                // Jacobi rotation. Combined rotation J = diag(1, e^{-iφ}) · R.
                let phase = b / babs; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * babs);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph = phase.conj();
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(s, 0.0);
                let j_qp = ph * (-s);
                let j_qq = ph * c;

                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * j_pp + vkq * j_qp;
                        v[(k, q)] = vkp * j_pq + vkq * j_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = if want_vectors {
        CMatrix::from_fn(n, |r, c| v[(r, order[c])])
    } else {
        CMatrix::zeros(0)
    };
    Eigen { values, vectors }
}

/// -x log2 x, zero at or below the clamp.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= EIGEN_CLAMP {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy (bits) of a spectrum, clamping tiny values to zero.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values.iter().map(|&x| eta(x)).sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(op: &HermitianOperator) -> Result<f64> {
    let tr = op.trace();
    if (tr - 1.0).abs() > ENTROPY_TRACE_TOL {
        return Err(Error::NonPhysicalOperator(format!("trace {tr}")));
    }
    let values = op.eigenvalues();
    if values[0] < -PSD_TOL {
        return Err(Error::NonPhysicalOperator(format!(
            "negative eigenvalue {:e}",
            values[0]
        )));
    }
    let s = entropy_of_spectrum(&values);
    Ok(s.clamp(0.0, (op.dim() as f64).log2()))
}

/// Which party of a bipartite operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

fn check_dims(op: &HermitianOperator, (da, db): (usize, usize)) -> Result<()> {
    if da == 0 || db == 0 || da * db != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{da}x{db} does not match operator dimension {}",
            op.dim()
        )));
    }
    Ok(())
}

/// Reduced operator of the kept party.
pub fn partial_trace(op: &HermitianOperator, dims: (usize, usize), keep: Subsystem) -> Result<HermitianOperator> {
    check_dims(op, dims)?;
    let (da, db) = dims;
    let m = op.matrix();
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, |a, a2| (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()),
        Subsystem::B => CMatrix::from_fn(db, |b, b2| (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()),
    };
    Ok(HermitianOperator::from_hermitian_part(&out))
}

/// Transposes the indices of one party only.
pub fn partial_transpose(op: &HermitianOperator, dims: (usize, usize), on: Subsystem) -> Result<HermitianOperator> {
    check_dims(op, dims)?;
    let (_, db) = dims;
    let m = op.matrix();
    let out = CMatrix::from_fn(op.dim(), |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match on {
            Subsystem::A => m[(a2 * db + b, a * db + b2)],
            Subsystem::B => m[(a * db + b2, a2 * db + b)],
        }
    });
    Ok(HermitianOperator::from_hermitian_part(&out))
}

pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&a.matrix().kron(b.matrix()))
}

/// Hermitian matrix exponential `exp(i t H)` via eigendecomposition.
pub fn expi_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let e = eigh(h);
    let n = h.dim();
    CMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| e.vectors[(i, k)] * C64::from_polar(1.0, t * e.values[k]) * e.vectors[(j, k)].conj())
            .sum()
    })
}
