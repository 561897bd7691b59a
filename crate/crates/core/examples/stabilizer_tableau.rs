//! GHZ state on the tableau: stabilizers, cut entropies, and a measurement
//! that collapses every qubit at once.

use magicflux::{GateOp, QubitSubset, StabilizerTableau};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> magicflux::Result<()> {
    let n = 5;
    let mut t = StabilizerTableau::new(n)?;
    t.apply(&GateOp::H(0))?;
    for q in 1..n {
        t.apply(&GateOp::Cnot { control: 0, target: q })?;
    }
    println!("stabilizers:   {:?}", t.stabilizers());
    println!("destabilizers: {:?}", t.destabilizers());

    for k in 1..n {
        let a = QubitSubset::range(0, k, n)?;
        println!("S(first {k}) = {} bit", t.entropy(&a)?);
    }

    // T is not Clifford; the tableau says so instead of guessing
    if let Err(e) = t.apply(&GateOp::T(0)) {
        println!("rejected: {e}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let first = t.measure_z(2, &mut rng)?;
    let rest: Vec<i8> = (0..n).map(|q| t.expectation_z(q)).collect::<magicflux::Result<_>>()?;
    println!("measured qubit 2 -> {first}; <Z_q> afterwards {rest:?}");
    println!("S(first 2) after measurement = {}", t.entropy(&QubitSubset::range(0, 2, n)?)?);
    Ok(())
}
