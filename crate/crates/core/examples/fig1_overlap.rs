//! Two qutrits under diag(e^{it}, e^{it}, e^{-2it}): the overlap curve for
//! several purities. At q = 0 it is (2e^{it} + e^{-2it})/3, a three-cusp curve
//! touching the unit circle at t = 2 pi k/3; at q = 1 it is the unit circle.

use std::f64::consts::PI;

use qudit_phase::phase::{detect_cycles, run_trace};
use qudit_phase::scenario::{preset, Split, System};
use qudit_phase::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["fig1a", "fig1b", "fig1c", "fig1d"] {
        let scenario = preset(name)?.build(Split::AOnly)?;
        let System::Pair { alpha, pair } = &scenario.system else {
            unreachable!()
        };
        let trace = run_trace(alpha, pair)?;
        let min = trace
            .overlap_mag
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let cycles = detect_cycles(&trace, alpha, pair, 1e-9)?;
        println!(
            "{name}: min |o| = {min:.6}, final phi_g = {:.6}",
            trace.final_geometric_phase()
        );
        if cycles.continuum {
            println!("  cyclic at every t");
        }
        for e in cycles.events.iter().filter(|_| !cycles.continuum) {
            println!(
                "  cycle t = {:.6} (x 3/2pi = {:.3}), phase {:.6}",
                e.t_cycle,
                e.t_cycle * 1.5 / PI,
                e.phase
            );
        }
        if name == "fig1a" {
            let worst = trace
                .t
                .iter()
                .zip(&trace.overlap)
                .map(|(&t, o)| {
                    (o - (C64::from_polar(2.0, t) + C64::from_polar(1.0, -2.0 * t)) / 3.0).norm()
                })
                .fold(0.0, f64::max);
            println!("  max |o - (2e^(it) + e^(-2it))/3| = {worst:.1e}");
        }
    }
    Ok(())
}
