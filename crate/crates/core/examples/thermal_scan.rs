//! Voluntary error of the triad over the field plane of the thermal
//! two-qubit XY model.

use qcorr::correlations::{Measure, ReferenceOptions};
use qcorr::measurements::{sphere_grid, triad};
use qcorr::spin_models::{thermal_scan, thermal_state, ThermalTwoQubitParams};

fn main() -> qcorr::Result<()> {
    let rho = thermal_state(&ThermalTwoQubitParams {
        g: 0.5,
        h1_over_j: 1.45,
        h2_over_j: 0.55,
        beta_j: 1.0,
    })?;
    println!(
        "thermal state at h1 = 1.45, h2 = 0.55: is X state = {}",
        rho.is_x_state(1e-14)
    );

    let opts = ReferenceOptions::default();
    for (name, set) in [("triad", triad(2)?), ("sphere grid 8 x 1", sphere_grid(8, 1)?)] {
        for m in Measure::BOTH {
            let pts = thermal_scan(0.5, 1.0, 2.0, 0.1, &set, m, &opts)?;
            let worst = pts.iter().max_by(|a, b| a.ve.total_cmp(&b.ve)).unwrap();
            let zero = pts.iter().filter(|p| p.ve < 1e-9).count();
            println!(
                "{name:<18} {m:?}: max ve {:.3e} at ({:+.2}, {:+.2}); {zero}/{} points exact",
                worst.ve,
                worst.h1_over_j,
                worst.h2_over_j,
                pts.len()
            );
        }
    }
    Ok(())
}
