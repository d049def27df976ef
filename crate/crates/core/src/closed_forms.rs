//! Closed-form constrained correlations: X states under the Pauli triad, and
//! the 2x4 bound entangled family under the Pauli triad on the qubit.

use crate::linalg::eta;
use crate::states::{be_2x4, XStateParams};
use crate::{Error, Result};

fn xlog(x: f64) -> f64 {
    -eta(x)
}

/// `α^±_i = 1 + (−1)^i √((a1−a2+a3−a4)² + 4(b1 ± b2)²)` for `i = 1, 2`;
/// `sign = +1` selects the `+` family.
pub fn x_state_alpha(p: &XStateParams, sign: f64) -> [f64; 2] {
    let [a1, a2, a3, a4] = p.a;
    let b = p.b1 + sign * p.b2;
    let r = ((a1 - a2 + a3 - a4).powi(2) + 4.0 * b * b).sqrt();
    [1.0 - r, 1.0 + r]
}

/// Conditional entropies of the three Pauli measurements on A:
/// `(S′, S′₊, S′₋)` for σ^z, σ^x, σ^y.
pub fn x_state_conditional_entropies(p: &XStateParams) -> (f64, f64, f64) {
    let [a1, a2, a3, a4] = p.a;
    let s_z = xlog(a1 + a2) + xlog(a3 + a4) - xlog(a1) - xlog(a2) - xlog(a3) - xlog(a4);
    let s_pm = |sign: f64| {
        let al = x_state_alpha(p, sign);
        1.0 - 0.5 * (xlog(al[0]) + xlog(al[1]))
    };
    (s_z, s_pm(1.0), s_pm(-1.0))
}

/// Post-measurement entropies of the three Pauli dephasings on A:
/// `(S̃, S̃₊, S̃₋)`.
pub fn x_state_dephased_entropies(p: &XStateParams) -> (f64, f64, f64) {
    let s_z = p.a.iter().map(|&x| eta(x)).sum();
    let s_pm = |sign: f64| {
        let al = x_state_alpha(p, sign);
        -2.0 * (xlog(al[0] / 4.0) + xlog(al[1] / 4.0))
    };
    (s_z, s_pm(1.0), s_pm(-1.0))
}

fn x_state_entropies(p: &XStateParams) -> (f64, f64) {
    let [a1, a2, a3, a4] = p.a;
    let pair = |x: f64, y: f64, b: f64| {
        let r = ((x - y).powi(2) + 4.0 * b * b).sqrt();
        eta(0.5 * (x + y + r)) + eta(0.5 * (x + y - r))
    };
    let s_joint = pair(a1, a4, p.b1) + pair(a2, a3, p.b2);
    let s_a = eta(a1 + a2) + eta(a3 + a4);
    (s_joint, s_a)
}

/// Constrained QD of an X state over the Pauli triad on A.
pub fn x_state_cqd(p: &XStateParams) -> Result<f64> {
    p.validate()?;
    let (s_joint, s_a) = x_state_entropies(p);
    let (s0, sp, sm) = x_state_conditional_entropies(p);
    Ok((s_a - s_joint + s0.min(sp).min(sm)).max(0.0))
}

/// Constrained QWD of an X state over the Pauli triad on A.
pub fn x_state_cqwd(p: &XStateParams) -> Result<f64> {
    p.validate()?;
    let (s_joint, _) = x_state_entropies(p);
    let (s0, sp, sm) = x_state_dephased_entropies(p);
    Ok((s0.min(sp).min(sm) - s_joint).max(0.0))
}

fn check_b(b: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::OutOfRange(format!("b = {b} outside [0, 1]")));
    }
    Ok(())
}

/// `ζ_i = 1 + b + (−1)^i √(1 − b²)`.
fn zeta(b: f64) -> [f64; 2] {
    let r = (1.0 - b * b).sqrt();
    [1.0 + b - r, 1.0 + b + r]
}

/// `(τ_ij, τ′_ij)` for `i, j ∈ {1, 2}`, flattened row-major.
fn tau(b: f64) -> ([f64; 4], [f64; 4]) {
    let r = (1.0 - b * b).sqrt();
    let norm = 4.0 * (1.0 + 7.0 * b);
    let sgn = |i: usize| if i % 2 == 1 { -1.0 } else { 1.0 };
    let omega = |i: usize| {
        (2.0 * (1.0 - 3.0 * b + 12.0 * b * b + sgn(i) * (1.0 - 3.0 * b) * r))
            .max(0.0)
            .sqrt()
    };
    let omega_p = |i: usize| (2.0 * (1.0 + b + 8.0 * b * b + sgn(i) * (1.0 + b) * r)).max(0.0).sqrt();
    let mut t = [0.0; 4];
    let mut tp = [0.0; 4];
    for i in 1..=2 {
        for j in 1..=2 {
            let k = (i - 1) * 2 + (j - 1);
            t[k] = (1.0 + 9.0 * b + sgn(i) * r + sgn(j) * omega(i)) / norm;
            tp[k] = (1.0 + 5.0 * b + sgn(i) * r + sgn(j) * omega_p(i)) / norm;
        }
    }
    (t, tp)
}

/// Conditional entropies `(S̄₁, S̄₂)` of the σ^z and σ^x measurements on the
/// qubit of the 2x4 family.
pub fn be24_conditional_entropies(b: f64) -> Result<(f64, f64)> {
    check_b(b)?;
    let z = zeta(b);
    let s1 = (1.0 + 9.0 * b + xlog(1.0 + 3.0 * b) - 2.0 * xlog(b) - 0.5 * (xlog(z[0]) + xlog(z[1]))) / (1.0 + 7.0 * b);
    let (t, tp) = tau(b);
    let s2 = -0.5 * t.iter().chain(&tp).map(|&x| xlog(x)).sum::<f64>();
    Ok((s1, s2))
}

/// Post-measurement entropies `(S̃₁, S̃₂)` of the σ^z and σ^x dephasings.
pub fn be24_dephased_entropies(b: f64) -> Result<(f64, f64)> {
    check_b(b)?;
    let z = zeta(b);
    let s1 = (1.0 + b + xlog(1.0 + 7.0 * b) - 6.0 * xlog(b) - 0.5 * (xlog(z[0]) + xlog(z[1]))) / (1.0 + 7.0 * b);
    let (t, tp) = tau(b);
    let s2 = -0.5 * t.iter().zip(&tp).map(|(&x, &y)| xlog(x) + xlog(y) - x - y).sum::<f64>();
    Ok((s1, s2))
}

fn be24_entropies(b: f64) -> Result<(f64, f64)> {
    let rho = be_2x4(b)?;
    let pa = 4.0 * b / (1.0 + 7.0 * b);
    Ok((rho.entropy(), eta(pa) + eta(1.0 - pa)))
}

/// Constrained QD of the 2x4 family over the Pauli triad on the qubit.
pub fn be24_cqd(b: f64) -> Result<f64> {
    let (s1, s2) = be24_conditional_entropies(b)?;
    let (s_joint, s_a) = be24_entropies(b)?;
    Ok((s_a - s_joint + s1.min(s2)).max(0.0))
}

/// Constrained QWD of the 2x4 family over the Pauli triad on the qubit,
/// `min[S̃₁, S̃₂] − S(ρ_b)`.
pub fn be24_cqwd(b: f64) -> Result<f64> {
    let (s1, s2) = be24_dephased_entropies(b)?;
    let (s_joint, _) = be24_entropies(b)?;
    Ok((s1.min(s2) - s_joint).max(0.0))
}
