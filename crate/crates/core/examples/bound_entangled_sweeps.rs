//! Voluntary error along bound-entangled families: the 2x4 family under the
//! Pauli triad, and the 3x3 tiles and Horodecki families under the spin-1
//! triad.

use qcorr::closed_forms::{be24_cqd, be24_cqwd};
use qcorr::correlations::{Measure, ReferenceOptions};
use qcorr::linalg::Subsystem;
use qcorr::measurements::triad;
use qcorr::stats::{argmax_ve, be_sweep, index_switches, onset, param_grid, BeFamily, SweepPoint};

fn column(points: &[[SweepPoint; 2]], m: Measure) -> Vec<SweepPoint> {
    points.iter().map(|p| p[m as usize]).collect()
}

fn main() -> qcorr::Result<()> {
    let opts = ReferenceOptions::default();

    let be24 = be_sweep(
        BeFamily::Be24,
        &param_grid(0.0, 1.0, 0.02)?,
        Subsystem::A,
        &triad(2)?,
        &opts,
    )?;
    println!(
        "2x4 family, b = 0.5: closed-form CQD {:.6}, CQWD {:.6}",
        be24_cqd(0.5)?,
        be24_cqwd(0.5)?
    );
    for m in Measure::BOTH {
        let col = column(&be24, m);
        println!(
            "  {m:?}: ve first nonzero at b = {:?}, max {:.3e}",
            onset(&col, 1e-8),
            argmax_ve(&col).map_or(0.0, |p| p.ve)
        );
    }

    let spin = triad(3)?;
    for (side, step) in [(Subsystem::A, 0.05), (Subsystem::B, 0.05)] {
        let tiles = be_sweep(BeFamily::Tiles, &param_grid(0.0, 1.0, step)?, side, &spin, &opts)?;
        let qd = column(&tiles, Measure::Qd);
        let top = argmax_ve(&qd).unwrap();
        println!(
            "tiles measured on {side:?}: QD max ve {:.3e} at a = {:.2}",
            top.ve, top.param
        );
        for (a, from, to) in index_switches(&qd) {
            println!("  optimal spin axis {from} -> {to} near a = {a:.3}");
        }
    }

    let horo = be_sweep(
        BeFamily::Horodecki,
        &param_grid(0.0, 5.0, 0.25)?,
        Subsystem::A,
        &spin,
        &opts,
    )?;
    println!("Horodecki family:");
    for [qd, qwd] in &horo {
        println!(
            "  alpha = {:.2}: CQD {:.5}  QD {:.5}  QWD {:.5}  axis {}",
            qd.param, qd.value_constrained, qd.value_actual, qwd.value_actual, qd.optimal_index
        );
    }
    Ok(())
}
