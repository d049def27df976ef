//! Closed-form triad values of X states checked against direct evaluation,
//! plus an exceptional and a non-exceptional magnetized state.

use qcorr::closed_forms::{x_state_cqd, x_state_cqwd};
use qcorr::correlations::{constrained_min_both, on_subsystem, voluntary_error_both, ReferenceOptions};
use qcorr::linalg::Subsystem;
use qcorr::measurements::triad;
use qcorr::rng::stream;
use qcorr::states::{make_rho_m, make_x_state, Axis, XStateParams};

fn main() -> qcorr::Result<()> {
    let t = triad(2)?;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let p = XStateParams::random(&mut stream(17, i));
        let [qd, qwd] = constrained_min_both(&make_x_state(&p)?, &t)?;
        worst = worst
            .max((x_state_cqd(&p)? - qd.value_constrained).abs())
            .max((x_state_cqwd(&p)? - qwd.value_constrained).abs());
    }
    println!("closed forms vs numeric triad over 1000 X states: max deviation {worst:.2e}");

    let p = XStateParams::new([0.4, 0.1, 0.1, 0.4], 0.3, 0.05)?;
    println!(
        "a = {:?}, b1 = {}, b2 = {}: CQD = {:.6}, CQWD = {:.6}",
        p.a,
        p.b1,
        p.b2,
        x_state_cqd(&p)?,
        x_state_cqwd(&p)?
    );

    let opts = ReferenceOptions::default();
    let rho = make_rho_m(0.956861, 0.267575, -0.275867, Axis::X, 0.94976, 0.907559)?;
    for side in [Subsystem::A, Subsystem::B] {
        let [qd, qwd] = voluntary_error_both(&on_subsystem(&rho, side), &t, &opts)?;
        println!(
            "magnetized state measured on {side:?}: QD ve {:.4e}, QWD ve {:.4e}",
            qd.ve.unwrap(),
            qwd.ve.unwrap()
        );
    }
    Ok(())
}
