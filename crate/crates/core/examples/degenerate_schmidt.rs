//! A qutrit-ququart state with a repeated Schmidt coefficient can return to
//! itself at a phase outside 2 pi (n_A/3 + n_B/4): the ququart's degenerate
//! pair is rotated into itself without every Schmidt vector picking up the
//! same phase.
//!
//! alpha rows (1/sqrt3, 0, 0, 0), (0, 1/sqrt3, 0, 0), (0, 0, 1/sqrt6, 1/sqrt6)
//! with rates (1, 1, -2) on A and (1, 1, -1, -1) on B give
//! <psi0|psi(t)> = (2 e^{2it} + e^{-3it})/3, cyclic at t = 2 pi/5 with phase
//! 4 pi/5.

use std::f64::consts::PI;

use qudit_phase::evolution::{LocalEvolution, PairEvolution, TimeGrid};
use qudit_phase::phase::{detect_cycles, fractional_lattice, run_trace};
use qudit_phase::scenario::config::preset_state;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = preset_state("qutrit_ququart", None, None)?;
    let a = LocalEvolution::cartan(vec![1.0, 1.0, -2.0], 2.0 * PI)?;
    let b = LocalEvolution::cartan(vec![1.0, 1.0, -1.0, -1.0], 2.0 * PI)?;
    let pair = PairEvolution::new(a, b, TimeGrid::new(2.0 * PI, 4000)?)?;
    let trace = run_trace(&alpha, &pair)?;
    let lattice = fractional_lattice(3, 4)?;
    for e in detect_cycles(&trace, &alpha, &pair, 1e-9)?.events {
        println!(
            "t = {:.6} (x 5/2pi = {:.3})  phase = {:.6} (x 5/4pi = {:.3})  lattice distance {:.3}  n_B = {:?}",
            e.t_cycle,
            e.t_cycle * 2.5 / PI,
            e.phase,
            e.phase * 1.25 / PI,
            lattice.distance(e.phase),
            e.n_b
        );
    }
    Ok(())
}
