//! Discord and work deficit of one state: fixed basis, earmarked set,
//! numerical optimum and the voluntary error between them.
//!
//! ```text
//! cargo run --example evaluate_state
//! ```

use qcorr::correlations::{
    discord_given_basis, reference_min_both, voluntary_error_both, workdeficit_given_basis, ReferenceOptions,
};
use qcorr::measurements::{qubit_basis_angles, triad};
use qcorr::states::{classify_ppt, sample_haar_mixed, BipartiteDensityMatrix};

fn main() -> qcorr::Result<()> {
    let rho = sample_haar_mixed(2, 2, 2, 42)?;
    println!(
        "rank-2 Haar state: S = {:.4} bits, {}",
        rho.entropy(),
        classify_ppt(&rho)
    );

    let z = qubit_basis_angles(0.0, 0.0);
    println!(
        "sigma_z on A: QD = {:.6}, QWD = {:.6}",
        discord_given_basis(&rho, &z)?,
        workdeficit_given_basis(&rho, &z)?
    );

    let opts = ReferenceOptions::default();
    for e in voluntary_error_both(&rho, &triad(2)?, &opts)? {
        println!(
            "{:?}: triad {:.6} (element {}), optimum {:.6}, ve {:.3e}",
            e.measure,
            e.value_constrained,
            e.optimal_basis_index,
            e.value_actual.unwrap(),
            e.ve.unwrap()
        );
    }
    let [qd, _] = reference_min_both(&rho, &opts)?;
    if let Some(p) = qd.params {
        println!("optimal QD direction: f_theta = {:.4}, phi = {:.4}", p.f_theta, p.phi);
    }

    let json = rho.to_json()?;
    assert_eq!(BipartiteDensityMatrix::from_json(&json)?, rho);
    println!("JSON document: {} bytes, round trip exact", json.len());
    Ok(())
}
