//! The earmarked measurement families and how the constrained minimum
//! tightens as they grow.

use qcorr::correlations::{constrained_min, reference_min, Measure, ReferenceOptions};
use qcorr::measurements::{circle_fixed_ftheta, circle_fixed_phi, disc_stack, sphere_grid, triad, EarmarkedSet};
use qcorr::states::sample_haar_mixed;

fn describe(name: &str, set: &EarmarkedSet) {
    let pts: Vec<String> = set
        .points()
        .unwrap_or(&[])
        .iter()
        .take(4)
        .map(|p| format!("({:+.2}, {:.2})", p.f_theta, p.phi))
        .collect();
    println!(
        "{name:<24} {:>4} bases  first (f_theta, phi): {}",
        set.len(),
        pts.join(" ")
    );
}

fn main() -> qcorr::Result<()> {
    describe("triad", &triad(2)?);
    describe("circle f_theta = 0, n=8", &circle_fixed_ftheta(0.0, 8)?);
    describe("circle phi = 0, n=8", &circle_fixed_phi(0.0, 8)?);
    describe("disc stack 6 x 3", &disc_stack(0.0, 6, 3)?);
    describe("sphere grid 8 x 3", &sphere_grid(8, 3)?);
    println!(
        "spin-1 triad: {} bases of dimension {}",
        triad(3)?.len(),
        triad(3)?.dim()
    );

    let rho = sample_haar_mixed(2, 2, 3, 9)?;
    let actual = reference_min(&rho, Measure::Qd, &ReferenceOptions::default())?.value_constrained;
    println!("\nQD of a rank-3 state: optimum {actual:.6}");
    for n in [2, 4, 8, 16, 32, 64] {
        let c = constrained_min(&rho, &circle_fixed_ftheta(0.0, n)?, Measure::Qd)?.value_constrained;
        println!("  equatorial circle n = {n:>2}: {c:.6}  (ve {:.2e})", c - actual);
    }
    Ok(())
}
