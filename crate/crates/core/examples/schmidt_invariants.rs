//! Schmidt form of the qubit-qutrit dual state and the invariants that local
//! unitaries leave alone.

use qudit_phase::algebra::make_generators;
use qudit_phase::linalg::{exp_i_hermitian, hermitian_eigen};
use qudit_phase::scenario::config::preset_state;
use qudit_phase::state::{apply_local, entanglement_report, schmidt_decompose};
use qudit_phase::CMatrix;

fn expi(g: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(g);
    exp_i_hermitian(&values, &vectors, 1.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = preset_state("qubit_qutrit_dual", None, None)?;
    let s = schmidt_decompose(&alpha);
    println!("Schmidt coefficients q = {:?}", s.q.as_slice());
    println!(
        "reconstruction residual {:.1e}",
        (s.reconstruct() - alpha.matrix()).norm()
    );

    let before = entanglement_report(&alpha);
    println!(
        "C = {:.12}, C_m = {:.12}, w_A = {:.6}, w_B = {:.6}",
        before.concurrence,
        before.max_concurrence,
        before.weight_a(),
        before.weight_b()
    );

    let ga = make_generators(2)?.combine(&[0.3, -1.1, 0.7]);
    let gb = make_generators(3)?.combine(&[0.2, 0.5, -0.4, 1.3, 0.0, 0.9, -0.6, 0.1]);
    let moved = apply_local(&alpha, &expi(&ga), &expi(&gb))?;
    let after = entanglement_report(&moved);
    println!("after local unitaries:");
    println!(
        "  |dC|       = {:.1e}",
        (after.concurrence - before.concurrence).abs()
    );
    for (p, (x, y)) in after
        .trace_powers
        .iter()
        .zip(&before.trace_powers)
        .enumerate()
    {
        println!("  |dTr Q^{}| = {:.1e}", 2 * (p + 1), (x - y).abs());
    }
    println!("  |d det Q|  = {:.1e}", (after.det_q - before.det_q).abs());
    Ok(())
}
