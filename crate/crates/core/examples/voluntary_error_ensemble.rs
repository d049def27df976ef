//! Voluntary-error statistics of the Pauli triad over Haar-random states of
//! each rank, split by partial-transpose class.

use qcorr::correlations::{Measure, ReferenceOptions};
use qcorr::measurements::triad;
use qcorr::stats::{evaluate_samples, EnsembleSpec, ErrorStats, PptFilter};

fn main() -> qcorr::Result<()> {
    let sets = [triad(2)?];
    let opts = ReferenceOptions::default();
    println!("rank class   n      mean QD ve   mean QWD ve   max QWD ve");
    for rank in 1..=4 {
        for filter in [PptFilter::Ppt, PptFilter::Nppt] {
            let spec = EnsembleSpec::haar(2, 2, rank, filter, 300, 1);
            let samples = match spec.draw() {
                Ok(s) => s,
                Err(e) => {
                    println!("{rank:>4} {filter:<5} skipped: {e}");
                    continue;
                }
            };
            let evals = evaluate_samples(&samples, &sets, Some(&opts))?;
            let stats = |m: Measure| {
                let ve: Vec<f64> = evals.iter().filter_map(|e| e.ve(0, m)).collect();
                ErrorStats::from_errors(&ve, Some(rank), filter)
            };
            let (qd, qwd) = (stats(Measure::Qd)?, stats(Measure::Qwd)?);
            println!(
                "{rank:>4} {filter:<5} {:>4}  {:.4e}   {:.4e}    {:.4e}",
                qd.samples, qd.mean, qwd.mean, qwd.max
            );
        }
    }
    Ok(())
}
