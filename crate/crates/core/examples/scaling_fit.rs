//! Mean voluntary error of equatorial circles against their size, with the
//! power law `ε_n = ε_∞ + κ n^(−τ)` fitted on top.

use qcorr::correlations::{Measure, ReferenceOptions};
use qcorr::measurements::circle_fixed_ftheta;
use qcorr::stats::{evaluate_samples, scaling_from_evals, EnsembleSpec, PptFilter};

fn main() -> qcorr::Result<()> {
    let sizes = [2, 4, 8, 16, 32, 64, 4096];
    let sets = sizes
        .iter()
        .map(|&n| circle_fixed_ftheta(0.0, n))
        .collect::<qcorr::Result<Vec<_>>>()?;
    let samples = EnsembleSpec::haar(2, 2, 2, PptFilter::All, 1000, 3).draw()?;
    let evals = evaluate_samples(&samples, &sets, Some(&ReferenceOptions::default()))?;
    for m in Measure::BOTH {
        let s = scaling_from_evals(&evals, &sets, m)?;
        println!("{m:?}: eps_inf = {:.4} ± {:.4}", s.eps_inf, s.eps_inf_stderr);
        for p in &s.points {
            println!("  n = {:>3}  mean ve = {:.5} ± {:.5}", p.n, p.mean_ve, p.stderr);
        }
        println!(
            "  kappa = {:.4} ± {:.4}, tau = {:.3} ± {:.3}",
            s.fit.kappa, s.fit.kappa_err, s.fit.tau, s.fit.tau_err
        );
    }
    Ok(())
}
