//! Two qutrits in a diagonal state under diagonal paths: engine phases
//! against the analytic phasor sum over a (q, theta) sweep.

use std::f64::consts::PI;

use qudit_phase::closed_form::two_qutrit_example;
use qudit_phase::evolution::{LocalEvolution, PairEvolution, TimeGrid};
use qudit_phase::linalg::wrap_angle;
use qudit_phase::phase::run_trace;
use qudit_phase::state::{qutrit_theta_bound, CoefficientMatrix, DiagonalProfile};

fn main() -> qudit_phase::Result<()> {
    let t_end = 1.7;
    // A and B share the work: total rates (0.9, -2.1, 1.2)
    let a = LocalEvolution::cartan(vec![0.4, -1.0, 0.6], t_end)?;
    let b = LocalEvolution::cartan(vec![0.5, -1.1, 0.6], t_end)?;
    let pair = PairEvolution::new(a, b, TimeGrid::new(t_end, 400)?)?;
    let mut worst = 0.0f64;
    for &q in &[0.0, 0.3, 0.7, 1.0] {
        let bound = qutrit_theta_bound(q)?;
        for &frac in &[-1.0, -0.4, 0.0, 0.5, 1.0] {
            let theta = frac * bound.min(PI);
            let x = DiagonalProfile::qutrit(theta);
            let w = (2.0f64 / 3.0).sqrt() * q;
            let coeffs: Vec<f64> = x
                .values()
                .iter()
                .map(|xn| (1.0 / 3.0 + w * xn).max(0.0).sqrt())
                .collect();
            let alpha = CoefficientMatrix::diagonal(&coeffs, 3)?;
            let trace = run_trace(&alpha, &pair)?;
            let r = two_qutrit_example(q, theta, 0.9 * t_end, -2.1 * t_end)?;
            let dev = wrap_angle(r.phi_g - trace.final_geometric_phase()).abs();
            worst = worst.max(dev);
            println!(
                "q = {q:.1}  theta = {theta:+.4}  phi_g = {:+.10}  closed form {:+.10}",
                wrap_angle(trace.final_geometric_phase()),
                wrap_angle(r.phi_g)
            );
        }
    }
    println!("max deviation {worst:.1e}");
    Ok(())
}
