//! Uniformly random `n`-qubit Cliffords as H/S/CNOT/Pauli gate streams.
//!
//! The symplectic part is drawn qubit by qubit: pick the images `(v, w)` of
//! `(X_k, Z_k)` uniformly among anticommuting pairs supported on qubits
//! `k..n`, reach them with at most four symplectic transvections, and recurse.
//! Each transvection `h` is realised as the Pauli rotation `exp(i pi/4 P_h)`.
//! A uniformly random Pauli at the end makes the signs uniform as well.

use rand::Rng;

use crate::gate::GateOp;

/// Pauli string in symplectic form.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Sym {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl Sym {
    fn zero(n: usize) -> Self {
        Sym { x: vec![false; n], z: vec![false; n] }
    }

    fn basis(n: usize, q: usize, is_z: bool) -> Self {
        let mut s = Self::zero(n);
        if is_z {
            s.z[q] = true;
        } else {
            s.x[q] = true;
        }
        s
    }

    fn random<R: Rng + ?Sized>(n: usize, from: usize, rng: &mut R) -> Self {
        let mut s = Self::zero(n);
        for q in from..n {
            s.x[q] = rng.gen();
            s.z[q] = rng.gen();
        }
        s
    }

    fn is_zero(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    /// Symplectic form: 1 iff the Paulis anticommute.
    fn form(&self, o: &Sym) -> bool {
        (0..self.x.len()).fold(false, |acc, q| acc ^ (self.x[q] & o.z[q]) ^ (self.z[q] & o.x[q]))
    }

    fn add(&self, o: &Sym) -> Sym {
        Sym {
            x: self.x.iter().zip(&o.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&o.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    fn transvect(&self, h: &Sym) -> Sym {
        if self.form(h) {
            self.add(h)
        } else {
            self.clone()
        }
    }
}

/// Transvections (in application order) sending `a` to `b`. Both are
/// supported on qubits `from..n`, and so is every returned vector.
fn reach<R: Rng + ?Sized>(a: &Sym, b: &Sym, from: usize, rng: &mut R) -> Vec<Sym> {
    if a == b {
        return Vec::new();
    }
    if a.form(b) {
        return vec![a.add(b)];
    }
    // a quarter of all vectors anticommute with both
    let n = a.x.len();
    loop {
        let c = Sym::random(n, from, rng);
        if a.form(&c) && b.form(&c) {
            return vec![a.add(&c), c.add(b)];
        }
    }
}

/// Gates for a Pauli rotation by a quarter turn about `h`, up to a Pauli
/// correction (the caller randomises signs anyway).
fn rotation(h: &Sym, out: &mut Vec<GateOp>) {
    let support: Vec<usize> = (0..h.x.len()).filter(|&q| h.x[q] || h.z[q]).collect();
    let Some((&pivot, rest)) = support.split_first() else { return };
    // rotate each factor onto Z
    for &q in &support {
        match (h.x[q], h.z[q]) {
            (true, false) => out.push(GateOp::H(q)),
            (true, true) => out.extend([GateOp::S(q), GateOp::H(q)]),
            _ => {}
        }
    }
    for &q in rest {
        out.push(GateOp::Cnot { control: q, target: pivot });
    }
    out.push(GateOp::S(pivot));
    for &q in rest.iter().rev() {
        out.push(GateOp::Cnot { control: q, target: pivot });
    }
    for &q in &support {
        match (h.x[q], h.z[q]) {
            (true, false) => out.push(GateOp::H(q)),
            (true, true) => out.extend([GateOp::H(q), GateOp::S(q)]),
            _ => {}
        }
    }
}

/// Appends a uniformly random Clifford on qubits `0..n` (global phase aside).
pub fn uniform_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R, out: &mut Vec<GateOp>) {
    // levels[k]: transvections fixing qubits < k; the unitary is
    // level 0 . level 1 ... level n-1, so level n-1 acts first
    let mut levels: Vec<Vec<Sym>> = Vec::with_capacity(n);
    for k in 0..n {
        let v = loop {
            let v = Sym::random(n, k, rng);
            if !v.is_zero() {
                break v;
            }
        };
        let w = loop {
            let w = Sym::random(n, k, rng);
            if v.form(&w) {
                break w;
            }
        };
        let mut seq = reach(&Sym::basis(n, k, false), &v, k, rng);
        let w0 = seq.iter().fold(Sym::basis(n, k, true), |acc, h| acc.transvect(h));
        // second leg must fix v: pair through w0 + v when needed
        if w0 != w {
            if w0.form(&w) {
                seq.push(w0.add(&w));
            } else {
                let c = w0.add(&v);
                seq.push(w0.add(&c));
                seq.push(c.add(&w));
            }
        }
        levels.push(seq);
    }
    for seq in levels.iter().rev() {
        for h in seq {
            rotation(h, out);
        }
    }
    for q in 0..n {
        if rng.gen::<bool>() {
            out.push(GateOp::X(q));
        }
        if rng.gen::<bool>() {
            out.push(GateOp::Z(q));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::PureState;
    use crate::subset::QubitSubset;
    use crate::tableau::StabilizerTableau;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    /// Images of every `X_k`, `Z_k` under a gate stream, as symplectic vectors.
    fn symplectic_images(n: usize, ops: &[GateOp]) -> Vec<Sym> {
        // conjugate basis Paulis through the circuit with a Heisenberg-picture walk
        let mut rows: Vec<Sym> = (0..n).map(|q| Sym::basis(n, q, false)).chain((0..n).map(|q| Sym::basis(n, q, true))).collect();
        for op in ops {
            for r in rows.iter_mut() {
                match *op {
                    GateOp::H(q) => std::mem::swap(&mut r.x[q], &mut r.z[q]),
                    GateOp::S(q) => r.z[q] ^= r.x[q],
                    GateOp::Cnot { control, target } => {
                        r.x[target] ^= r.x[control];
                        r.z[control] ^= r.z[target];
                    }
                    _ => {}
                }
            }
        }
        rows
    }

    #[test]
    fn images_form_a_symplectic_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            for _ in 0..20 {
                let mut ops = Vec::new();
                uniform_clifford(n, &mut rng, &mut ops);
                let rows = symplectic_images(n, &ops);
                for i in 0..2 * n {
                    for j in 0..2 * n {
                        let expect = i % n == j % n && i != j;
                        assert_eq!(rows[i].form(&rows[j]), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn single_qubit_symplectic_classes_are_uniform() {
        // Sp(2, 2) has six elements; key each by the images of X and Z
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut counts: HashMap<Vec<bool>, usize> = HashMap::new();
        let draws = 6000;
        for _ in 0..draws {
            let mut ops = Vec::new();
            uniform_clifford(1, &mut rng, &mut ops);
            let rows = symplectic_images(1, &ops);
            *counts.entry(vec![rows[0].x[0], rows[0].z[0], rows[1].x[0], rows[1].z[0]]).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let e = draws as f64 / 6.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 5 degrees of freedom, p = 0.001
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn two_qubit_stabilizer_states_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts: HashMap<String, usize> = HashMap::new();
        let draws = 12000;
        for _ in 0..draws {
            let mut ops = Vec::new();
            uniform_clifford(2, &mut rng, &mut ops);
            let mut t = StabilizerTableau::new(2).unwrap();
            for op in &ops {
                t.apply(op).unwrap();
            }
            let mut s = PureState::new(2).unwrap();
            for op in &ops {
                s.apply(op).unwrap();
            }
            // key by amplitudes with the global phase fixed
            let a = s.amplitudes();
            let lead = a.iter().find(|c| c.norm() > 1e-9).unwrap();
            let phase = lead.conj() / lead.norm();
            let key: Vec<String> = a.iter().map(|c| {
                let c = c * phase;
                format!("{:.3},{:.3}", c.re + 0.0, c.im + 0.0)
            }).collect();
            *counts.entry(key.join(";")).or_default() += 1;
            assert_eq!(t.stabilizers().len(), 2);
        }
        assert_eq!(counts.len(), 60);
        let e = draws as f64 / 60.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 59 degrees of freedom, p = 0.001
        assert!(chi2 < 99.0, "chi2 = {chi2}");
    }

    #[test]
    fn mean_purity_matches_the_design_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 6;
        let half = QubitSubset::range(0, 3, n).unwrap();
        let draws = 3000;
        let mut total = 0.0;
        for _ in 0..draws {
            let mut ops = Vec::new();
            uniform_clifford(n, &mut rng, &mut ops);
            let mut t = StabilizerTableau::new(n).unwrap();
            for op in &ops {
                t.apply(op).unwrap();
            }
            total += (-(t.entropy(&half).unwrap() as f64)).exp2();
        }
        let exact = crate::oracle::mean_purity_exact(6, 3);
        assert!((total / draws as f64 - exact).abs() < 0.01, "{} vs {exact}", total / draws as f64);
    }
}
