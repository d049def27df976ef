//! Where the optimal measurement direction lands on the Bloch sphere for
//! random correlator states, and how much of it the marked regions around
//! the Pauli axes capture.

use qcorr::correlations::{Measure, ReferenceOptions};
use qcorr::measurements::triad;
use qcorr::stats::{evaluate_samples, optimizer_landscape, EnsembleKind, EnsembleSpec, PptFilter};

fn main() -> qcorr::Result<()> {
    let spec = EnsembleSpec {
        kind: EnsembleKind::Correlator,
        filter: PptFilter::All,
        samples: 2000,
        seed: 5,
    };
    let evals = evaluate_samples(&spec.draw()?, &[triad(2)?], Some(&ReferenceOptions::default()))?;
    for m in Measure::BOTH {
        let land = optimizer_landscape(&evals, m);
        let (per, union) = land.region_fractions();
        println!("{m:?}: {} optimizers", land.total());
        for (k, f) in per.iter().enumerate() {
            println!("  region {}: {:5.2}%", k + 1, 100.0 * f);
        }
        println!("  union:    {:5.2}%", 100.0 * union);
        let marg = land.marginal_f_theta();
        let peak = marg.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        println!(
            "  f_theta marginal peaks in bin {} of {} (density {:.2})",
            peak.0,
            marg.len(),
            peak.1
        );
    }
    Ok(())
}
