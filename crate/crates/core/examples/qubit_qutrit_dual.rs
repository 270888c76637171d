//! The state |00>/sqrt2 + (|11> + |12>)/2 with chi_A = r t on the qubit and
//! (t, t, -2t) on the qutrit. Contacts with the unit circle happen only at
//! multiples of pi/3.

use qudit_phase::phase::{detect_cycles, fractional_lattice, run_trace};
use qudit_phase::scenario::{preset, Split, System};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = fractional_lattice(2, 3)?;
    for name in ["fig4a", "fig4b", "fig4c", "fig4d"] {
        let scenario = preset(name)?.build(Split::AOnly)?;
        let System::Pair { alpha, pair } = &scenario.system else {
            unreachable!()
        };
        let trace = run_trace(alpha, pair)?;
        let cycles = detect_cycles(&trace, alpha, pair, 1e-9)?;
        println!("{name}: {} contacts", cycles.events.len());
        for e in &cycles.events {
            println!(
                "  t = {:.6}  phase = {:.6} = 2pi {}/6  (n_A, n_B) = ({:?}, {:?})  distance {:.1e}",
                e.t_cycle,
                e.phase,
                lattice.nearest(e.phase),
                e.n_a,
                e.n_b,
                lattice.distance(e.phase)
            );
        }
    }
    Ok(())
}
