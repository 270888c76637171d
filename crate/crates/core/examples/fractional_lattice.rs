//! Phases a cyclic entangled evolution may reach: 2 pi (n_A/d_A + n_B/d_B).

use qudit_phase::phase::fractional_lattice;
use qudit_phase::scenario::commands::pi_fraction;

fn main() -> qudit_phase::Result<()> {
    for (a, b) in [(2, 2), (3, 3), (2, 3), (4, 4), (3, 4), (2, 5)] {
        let l = fractional_lattice(a, b)?;
        let values: Vec<String> = l
            .numerators
            .iter()
            .map(|&m| pi_fraction(m, l.denominator))
            .collect();
        println!("({a},{b}): {}", values.join(", "));
    }
    Ok(())
}
