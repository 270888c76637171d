//! Generalized Gell-Mann basis: orthonormality and the qutrit Cartan pair.

use qudit_phase::algebra::{cartan_exponential, make_generators, CartanAngles};

fn main() -> qudit_phase::Result<()> {
    for d in 2..=6 {
        let basis = make_generators(d)?;
        let gram = basis.gram();
        let off = (&gram - nalgebra::DMatrix::<f64>::identity(basis.len(), basis.len()))
            .abs()
            .max();
        println!(
            "d = {d}: {} generators, {} Cartan, |gram - 1|_max = {off:.1e}",
            basis.len(),
            basis.cartan().len()
        );
    }

    let qutrit = make_generators(3)?;
    for beta in 0..2 {
        println!(
            "H{} diagonal = {:?}",
            beta + 1,
            qutrit.cartan_diagonal(beta)
        );
    }

    // exp(i h.H) for per-level angles (1, 1, -2)
    let chi = CartanAngles::from_levels(vec![1.0, 1.0, -2.0])?;
    println!("h = {:?}", chi.h(&qutrit));
    let u = cartan_exponential(&qutrit, &chi)?;
    println!("diag = {:.6}", u.diagonal().transpose());
    Ok(())
}
