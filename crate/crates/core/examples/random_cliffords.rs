//! Uniform two-qubit Cliffords from the enumerated group, and uniform
//! n-qubit Cliffords as gate streams.

use std::collections::BTreeMap;

use magicflux::clifford2::{GROUP_ORDER, SYMPLECTIC_CLASSES};
use magicflux::uniform_clifford::uniform_clifford;
use magicflux::{Clifford2, QubitSubset, StabilizerTableau};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> magicflux::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("two-qubit Clifford group: {GROUP_ORDER} elements, {SYMPLECTIC_CLASSES} symplectic classes");
    let c = Clifford2::sample(&mut rng);
    println!("sampled #{} = {:?}", c.index(), c.decomposition());
    // Pauli labels: x0 | z0 << 1 | x1 << 2 | z1 << 3
    for (name, p) in [("XI", 0b0001u8), ("ZI", 0b0010), ("IX", 0b0100), ("IZ", 0b1000)] {
        let (image, negative) = c.conjugate(p);
        println!("  {name} -> {}{image:04b}", if negative { "-" } else { "+" });
    }

    let draws = 72_000;
    let mut hist = vec![0usize; SYMPLECTIC_CLASSES];
    for _ in 0..draws {
        hist[Clifford2::sample(&mut rng).symplectic_class()] += 1;
    }
    let expect = draws as f64 / SYMPLECTIC_CLASSES as f64;
    let chi2: f64 = hist.iter().map(|&h| (h as f64 - expect).powi(2) / expect).sum();
    println!("class histogram chi^2 = {chi2:.1} over {} dof", SYMPLECTIC_CLASSES - 1);

    // half-cut entropy of random stabilizer states on 8 qubits
    let n = 8;
    let half = QubitSubset::range(0, n / 2, n)?;
    let mut counts = BTreeMap::new();
    for _ in 0..2000 {
        let mut ops = Vec::new();
        uniform_clifford(n, &mut rng, &mut ops);
        let mut t = StabilizerTableau::new(n)?;
        for op in &ops {
            t.apply(op)?;
        }
        *counts.entry(t.entropy(&half)?).or_insert(0usize) += 1;
    }
    println!("half-cut entropy histogram at n={n}: {counts:?}");
    Ok(())
}
