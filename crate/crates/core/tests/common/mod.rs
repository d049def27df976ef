//! Independent oracles built on nalgebra: projector-by-projector QD/QWD,
//! exact diagonalisation of the XY chain, and Gibbs states.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qcorr::measurements::MeasurementBasis;
use qcorr::states::BipartiteDensityMatrix;

pub type CM = DMatrix<Complex64>;

pub fn to_na(rho: &BipartiteDensityMatrix) -> CM {
    let m = rho.matrix();
    let n = m.dim();
    CM::from_fn(n, n, |r, c| m[(r, c)])
}

pub fn entropy(m: &CM) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

pub fn trace_out_a(m: &CM, da: usize, db: usize) -> CM {
    CM::from_fn(db, db, |i, j| (0..da).map(|a| m[(a * db + i, a * db + j)]).sum())
}

pub fn trace_out_b(m: &CM, da: usize, db: usize) -> CM {
    CM::from_fn(da, da, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
}

/// `(QD, QWD)` straight from the definitions: mutual information minus
/// classical correlation, and the entropy increase under dephasing.
pub fn brute_force(rho: &BipartiteDensityMatrix, basis: &MeasurementBasis) -> (f64, f64) {
    let (da, db) = rho.dims();
    let m = to_na(rho);
    let s = entropy(&m);
    let sa = entropy(&trace_out_b(&m, da, db));
    let sb = entropy(&trace_out_a(&m, da, db));
    let id_b = CM::identity(db, db);
    let mut dephased = CM::zeros(da * db, da * db);
    let mut conditional = 0.0;
    for v in basis.vectors() {
        let v = DMatrix::from_column_slice(da, 1, v);
        let proj = (&v * v.adjoint()).kronecker(&id_b);
        let post = &proj * &m * &proj;
        let p = post.trace().re;
        dephased += &post;
        if p > 1e-14 {
            conditional += p * entropy(&(trace_out_a(&post, da, db) / Complex64::new(p, 0.0)));
        }
    }
    let mutual = sa + sb - s;
    let classical = sb - conditional;
    (mutual - classical, entropy(&dephased) - s)
}

/// Bit `i` set means site `i` is spin down.
pub fn sz(state: usize, i: usize) -> f64 {
    if state >> i & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

pub struct ChainGround {
    pub energy: f64,
    pub m_z: f64,
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
    /// Two-site reduced state of sites 0 and 1, basis `|s0 s1⟩` with
    /// `0 = up`.
    pub rdm: [[f64; 4]; 4],
}

/// Ground state of `(λ/2) Σ[(1+g)XX + (1−g)YY] + Σ Z` on a ring, restricted
/// to the sector with an even (`parity = 0`) or odd number of down spins.
pub fn xy_ground(l: usize, g: f64, lambda: f64, parity: usize) -> ChainGround {
    let states: Vec<usize> = (0..1usize << l)
        .filter(|s| s.count_ones() as usize % 2 == parity)
        .collect();
    let mut index = vec![usize::MAX; 1 << l];
    for (k, &s) in states.iter().enumerate() {
        index[s] = k;
    }
    let n = states.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (a, &s) in states.iter().enumerate() {
        for i in 0..l {
            h[(a, a)] += sz(s, i);
            let j = (i + 1) % l;
            let b = index[s ^ (1 << i) ^ (1 << j)];
            h[(b, a)] += 0.5 * lambda * ((1.0 + g) - (1.0 - g) * sz(s, i) * sz(s, j));
        }
    }
    let eig = SymmetricEigen::new(h);
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k);
    let (mut m_z, mut c_xx, mut c_yy, mut c_zz) = (0.0, 0.0, 0.0, 0.0);
    let mut rdm = [[0.0; 4]; 4];
    for (a, &s) in states.iter().enumerate() {
        let w = v[a] * v[a];
        m_z += w * sz(s, 0);
        c_zz += w * sz(s, 0) * sz(s, 1);
        let b = index[s ^ 0b11];
        c_xx += v[b] * v[a];
        c_yy -= sz(s, 0) * sz(s, 1) * v[b] * v[a];
        let rest = s & !0b11;
        let row = 2 * (s & 1) + (s >> 1 & 1);
        for (col, entry) in rdm[row].iter_mut().enumerate() {
            let t = rest | (col >> 1) | ((col & 1) << 1);
            if index[t] != usize::MAX {
                *entry += v[a] * v[index[t]];
            }
        }
    }
    ChainGround {
        energy: eig.eigenvalues[k],
        m_z,
        c_xx,
        c_yy,
        c_zz,
        rdm,
    }
}

/// `exp(−β H)/Z` for `H = J[(1+g)XX + (1−g)YY] + h1 Z⊗I + h2 I⊗Z`, `J = 1`.
pub fn gibbs(g: f64, h1: f64, h2: f64, beta: f64) -> DMatrix<f64> {
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let i2 = DMatrix::<f64>::identity(2, 2);
    // YY is real: −(iσ^y)⊗(iσ^y) with iσ^y = [[0, 1], [−1, 0]].
    let iy = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let h = x.kronecker(&x) * (1.0 + g) - iy.kronecker(&iy) * (1.0 - g) + z.kronecker(&i2) * h1 + i2.kronecker(&z) * h2;
    let eig = SymmetricEigen::new(h);
    let e0 = eig.eigenvalues.min();
    let w = eig.eigenvalues.map(|e| (-beta * (e - e0)).exp());
    let rho = &eig.eigenvectors * DMatrix::from_diagonal(&w) * eig.eigenvectors.transpose();
    let z = rho.trace();
    rho / z
}
