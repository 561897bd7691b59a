//! Dense simulation of a small t-doped circuit: Renyi entropies of orders 2
//! and 4, spin expectations, and the text form of the circuit.

use magicflux::generate::{gen_tdoped, TDopedOptions};
use magicflux::{Circuit, PureState, QubitSubset, Simulator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> magicflux::Result<()> {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n_t in [0, 2, 8] {
        let circuit = gen_tdoped(n, n_t, TDopedOptions::default(), &mut rng)?;
        let mut psi = PureState::new(n)?;
        psi.run(&circuit, &mut rng)?;
        let ab = QubitSubset::new([0, 1, 6, 7], n)?;
        println!(
            "n_t={n_t:>2}: {} ops, S2(AB)={:.4} S4(AB)={:.4} <Sz_AB>={:+.4} norm={:.12}",
            circuit.ops.len(),
            psi.renyi_entropy(&ab, 2)?,
            psi.renyi_entropy(&ab, 4)?,
            psi.spin_z(&ab)?,
            psi.norm_sqr()
        );
    }

    let small = gen_tdoped(4, 1, TDopedOptions::default(), &mut rng)?;
    let text = small.to_text();
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
    let back = Circuit::from_text(&text)?;
    assert_eq!(back.ops, small.ops);
    Ok(())
}
