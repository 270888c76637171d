//! Geometric phase at each cycle of the qutrit-ququart preset from the
//! fractional indices and the connection integrals of each side.

use qudit_phase::algebra::make_generators;
use qudit_phase::linalg::wrap_angle;
use qudit_phase::phase::{connection_integral, detect_cycles, master_phase_formula, run_trace};
use qudit_phase::scenario::{preset, Split, System};
use qudit_phase::state::{entanglement_report, reduced_densities, QuditDensity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = preset("qutrit_ququart")?.build(Split::AOnly)?;
    let System::Pair { alpha, pair } = &scenario.system else {
        unreachable!()
    };
    let (basis_a, basis_b) = (make_generators(3)?, make_generators(4)?);
    let (rho_a, rho_b) = reduced_densities(alpha);
    let q_hat_a = QuditDensity::from_matrix(rho_a, &basis_a)?.q_hat().clone();
    let q_hat_b = QuditDensity::from_matrix(rho_b, &basis_b)?.q_hat().clone();
    let report = entanglement_report(alpha);
    println!(
        "C = {:.6}, w_A = {:.6}, w_B = {:.6}",
        report.concurrence,
        report.weight_a(),
        report.weight_b()
    );

    let trace = run_trace(alpha, pair)?;
    for e in detect_cycles(&trace, alpha, pair, 1e-9)?.events {
        let (Some(n_a), Some(n_b)) = (e.n_a, e.n_b) else {
            println!("t = {:.6}: indices unresolved", e.t_cycle);
            continue;
        };
        let loop_a = connection_integral(&basis_a, &pair.a, &pair.grid, e.t_cycle)?;
        let loop_b = connection_integral(&basis_b, &pair.b, &pair.grid, e.t_cycle)?;
        let formula = master_phase_formula(
            &report, &q_hat_a, &q_hat_b, &loop_a, &loop_b, n_a as i64, n_b as i64,
        )?;
        let engine = trace.geometric_phase[trace.nearest_index(e.t_cycle)];
        println!(
            "t = {:.6}  (n_A, n_B) = ({n_a}, {n_b})  engine {:+.10}  formula {:+.10}",
            e.t_cycle,
            wrap_angle(engine),
            wrap_angle(formula)
        );
    }
    Ok(())
}
