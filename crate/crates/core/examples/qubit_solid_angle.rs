//! Single qubit driven around Bloch-sphere caps: the geometric phase after the
//! loop is -q Omega/2 with Omega = 2 pi (1 - cos theta).

use std::f64::consts::PI;

use qudit_phase::algebra::make_generators;
use qudit_phase::evolution::{LocalEvolution, TimeGrid};
use qudit_phase::linalg::wrap_angle;
use qudit_phase::phase::single_qudit_trace;
use qudit_phase::state::{real_diagonal, QuditDensity};

fn main() -> qudit_phase::Result<()> {
    let basis = make_generators(2)?;
    println!(
        "{:>6} {:>6} {:>10} {:>10} {:>13} {:>13}",
        "q", "theta", "Omega", "2pi(1-cos)", "engine phi_g", "-q Omega/2"
    );
    for &q in &[1.0, 0.6] {
        let rho =
            QuditDensity::from_matrix(real_diagonal(&[(1.0 + q) / 2.0, (1.0 - q) / 2.0]), &basis)?;
        for &theta in &[PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let evo = LocalEvolution::bloch_cap(theta, PI / 2.0, 2.0 * PI)?;
            let grid = TimeGrid::new(3.0 * PI, 3000)?;
            let trace = single_qudit_trace(&rho, &evo, &grid)?;
            let omega = evo.accumulated_solid_angle(3.0 * PI)?;
            println!(
                "{q:>6.2} {theta:>6.3} {omega:>10.6} {:>10.6} {:>13.9} {:>13.9}",
                2.0 * PI * (1.0 - theta.cos()),
                wrap_angle(trace.final_geometric_phase()),
                wrap_angle(-q * omega / 2.0)
            );
        }
    }
    Ok(())
}
