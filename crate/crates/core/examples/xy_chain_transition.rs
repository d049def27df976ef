//! Finite-size precursors of the XY chain transition: the steepest point of
//! the nearest-neighbour discord and work deficit approaches λ = 1 as a
//! power of the chain length.

use qcorr::correlations::Measure;
use qcorr::spin_models::{finite_size_fit, locate_transition, xy_ground_correlators, LocateOptions, XYChainParams};

fn main() -> qcorr::Result<()> {
    let c = xy_ground_correlators(&XYChainParams::new(100, 0.5, 1.0)?)?;
    println!(
        "L = 100, g = 0.5, lambda = 1: m_z = {:.5}, c_xx = {:.5}, c_yy = {:.5}, c_zz = {:.5}",
        c.m_z, c.c_xx, c.c_yy, c.c_zz
    );
    let opts = LocateOptions::default();
    for m in Measure::BOTH {
        let mut points = Vec::new();
        for l in [20, 40, 80, 160, 320] {
            let scan = locate_transition(0.5, l, m, &opts)?;
            println!("{m:?} L = {l:>3}: lambda_c^L = {:.5}", scan.lambda_c);
            points.push((l, scan.lambda_c));
        }
        let fit = finite_size_fit(&points)?;
        println!(
            "{m:?}: |lambda_c^L - 1| = alpha L^-gamma with alpha = {:.3} ± {:.3}, gamma = {:.3} ± {:.3}\n",
            fit.alpha, fit.alpha_stderr, fit.gamma, fit.gamma_stderr
        );
    }
    Ok(())
}
