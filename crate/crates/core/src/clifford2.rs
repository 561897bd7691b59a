//! The two-qubit Clifford group, enumerated once.
//!
//! Elements are identified (modulo global phase) by their conjugation action
//! on the Pauli generators `X0, Z0, X1, Z1`. The whole group (11520 elements,
//! 720 symplectic classes times 16 Pauli sign patterns) is enumerated by
//! breadth-first search over `{H0, H1, S0, S1, CX01}`, so every element comes
//! with a shortest elementary decomposition, its dense 4x4 unitary and a
//! 16-entry Pauli conjugation table. Uniform sampling is then a uniform index.
//!
//! Pauli rows use four bits `x0 | z0 << 1 | x1 << 2 | z1 << 3` with `(x, z) =
//! (1, 1)` meaning `Y`, plus a sign bit.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::gate::{GateOp, Matrix4};

pub const GROUP_ORDER: usize = 11520;
pub const SYMPLECTIC_CLASSES: usize = 720;

/// Elementary generator acting on local qubits 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Local {
    H0,
    H1,
    S0,
    S1,
    Cx01,
}

impl Local {
    const ALL: [Local; 5] = [Local::H0, Local::H1, Local::S0, Local::S1, Local::Cx01];

    /// The gate on physical qubits `(a, b)` standing in for local `(0, 1)`.
    pub fn to_gate(self, a: usize, b: usize) -> GateOp {
        match self {
            Local::H0 => GateOp::H(a),
            Local::H1 => GateOp::H(b),
            Local::S0 => GateOp::S(a),
            Local::S1 => GateOp::S(b),
            Local::Cx01 => GateOp::Cnot { control: a, target: b },
        }
    }

    /// Conjugates a signed two-qubit Pauli row.
    fn conjugate(self, (p, sign): (u8, bool)) -> (u8, bool) {
        let bit = |k: u8| (p >> k) & 1 == 1;
        match self {
            Local::H0 | Local::H1 => {
                let s = if self == Local::H0 { 0 } else { 2 };
                let (x, z) = (bit(s), bit(s + 1));
                let mut q = p & !(0b11 << s);
                q |= (z as u8) << s | (x as u8) << (s + 1);
                (q, sign ^ (x & z))
            }
            Local::S0 | Local::S1 => {
                let s = if self == Local::S0 { 0 } else { 2 };
                let (x, z) = (bit(s), bit(s + 1));
                let q = (p & !(0b10 << s)) | ((z ^ x) as u8) << (s + 1);
                (q, sign ^ (x & z))
            }
            Local::Cx01 => {
                let (xa, za, xb, zb) = (bit(0), bit(1), bit(2), bit(3));
                let flip = xa & zb & !(xb ^ za);
                let (xb, za) = (xb ^ xa, za ^ zb);
                (xa as u8 | (za as u8) << 1 | (xb as u8) << 2 | (zb as u8) << 3, sign ^ flip)
            }
        }
    }

    fn matrix(self) -> Matrix4 {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let one_qubit = |m: [[Complex64; 2]; 2], target: usize| {
            let mut out = [[z; 4]; 4];
            for r in 0..4usize {
                for c in 0..4usize {
                    let other = 1 - target;
                    if (r >> other) & 1 == (c >> other) & 1 {
                        out[r][c] = m[(r >> target) & 1][(c >> target) & 1];
                    }
                }
            }
            out
        };
        match self {
            Local::H0 => one_qubit([[h, h], [h, -h]], 0),
            Local::H1 => one_qubit([[h, h], [h, -h]], 1),
            Local::S0 => one_qubit([[o, z], [z, i]], 0),
            Local::S1 => one_qubit([[o, z], [z, i]], 1),
            Local::Cx01 => {
                let mut out = [[z; 4]; 4];
                for (r, c) in [(0, 0), (3, 1), (2, 2), (1, 3)] {
                    out[r][c] = o;
                }
                out
            }
        }
    }
}

fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

const GENERATORS: [u8; 4] = [0b0001, 0b0010, 0b0100, 0b1000];

struct Element {
    decomposition: Vec<Local>,
    /// image of Pauli `p` is `table[p] & 0xf` with sign `table[p] >> 4`
    table: [u8; 16],
    matrix: Matrix4,
    class: u16,
}

struct Table {
    elements: Vec<Element>,
    by_key: HashMap<u32, u16>,
}

fn key_of(images: &[(u8, bool); 4]) -> u32 {
    images.iter().enumerate().fold(0u32, |k, (i, &(p, s))| k | ((p as u32 | (s as u32) << 4) << (5 * i)))
}

fn build() -> Table {
    let identity = GENERATORS.map(|g| (g, false));
    let mut by_key = HashMap::with_capacity(GROUP_ORDER);
    let mut words: Vec<(Vec<Local>, [(u8, bool); 4])> = vec![(Vec::new(), identity)];
    by_key.insert(key_of(&identity), 0u16);
    let mut head = 0;
    while head < words.len() {
        let (word, images) = words[head].clone();
        head += 1;
        for g in Local::ALL {
            let next = images.map(|im| g.conjugate(im));
            let key = key_of(&next);
            if !by_key.contains_key(&key) {
                by_key.insert(key, words.len() as u16);
                let mut w = word.clone();
                w.push(g);
                words.push((w, next));
            }
        }
    }
    assert_eq!(words.len(), GROUP_ORDER, "two-qubit Clifford enumeration");

    let mut classes: HashMap<u16, u16> = HashMap::new();
    let elements = words
        .into_iter()
        .map(|(decomposition, images)| {
            let mut table = [0u8; 16];
            for (p, slot) in table.iter_mut().enumerate() {
                let (q, s) = decomposition.iter().fold((p as u8, false), |acc, g| g.conjugate(acc));
                *slot = q | (s as u8) << 4;
            }
            let symplectic = images.iter().enumerate().fold(0u16, |k, (i, &(p, _))| k | (p as u16) << (4 * i));
            let next_class = classes.len() as u16;
            let class = *classes.entry(symplectic).or_insert(next_class);
            let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (i, row) in matrix.iter_mut().enumerate() {
                row[i] = Complex64::new(1.0, 0.0);
            }
            for g in &decomposition {
                matrix = matmul(&g.matrix(), &matrix);
            }
            Element { decomposition, table, matrix, class }
        })
        .collect();
    assert_eq!(classes.len(), SYMPLECTIC_CLASSES);
    Table { elements, by_key }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build)
}

/// A two-qubit Clifford, modulo global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clifford2(u16);

impl Clifford2 {
    pub fn identity() -> Self {
        Clifford2(0)
    }

    pub fn from_index(i: usize) -> Option<Self> {
        (i < GROUP_ORDER).then_some(Clifford2(i as u16))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Uniform draw from the group; consumes one `gen_range` call.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Clifford2(rng.gen_range(0..GROUP_ORDER) as u16)
    }

    fn element(self) -> &'static Element {
        &table().elements[self.0 as usize]
    }

    /// Elementary gates in application order.
    pub fn decomposition(self) -> &'static [Local] {
        &self.element().decomposition
    }

    pub fn matrix(self) -> Matrix4 {
        self.element().matrix
    }

    /// Image `C P C^†` of a signed Pauli row.
    #[inline]
    pub fn conjugate(self, pauli: u8) -> (u8, bool) {
        let v = self.element().table[pauli as usize & 0xf];
        (v & 0xf, v >> 4 == 1)
    }

    /// Index of the symplectic (sign-free) class, in `0..720`.
    pub fn symplectic_class(self) -> usize {
        self.element().class as usize
    }

    pub fn inverse(self) -> Self {
        let mut images = [(0u8, false); 4];
        for p in 0..16u8 {
            let (q, s) = self.conjugate(p);
            if let Some(i) = GENERATORS.iter().position(|&g| g == q) {
                images[i] = (p, s);
            }
        }
        Clifford2(table().by_key[&key_of(&images)])
    }

    /// Elementary gates on physical qubits `(a, b)`, in application order.
    pub fn gates(self, a: usize, b: usize) -> impl Iterator<Item = GateOp> {
        self.decomposition().iter().map(move |g| g.to_gate(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_matrix(p: u8) -> Matrix4 {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let single = |x: bool, zb: bool| -> [[Complex64; 2]; 2] {
            match (x, zb) {
                (false, false) => [[o, z], [z, o]],
                (true, false) => [[z, o], [o, z]],
                (false, true) => [[o, z], [z, -o]],
                (true, true) => [[z, -i], [i, z]],
            }
        };
        let a = single(p & 1 == 1, p & 2 == 2);
        let b = single(p & 4 == 4, p & 8 == 8);
        let mut out = [[z; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] = a[r & 1][c & 1] * b[r >> 1][c >> 1];
            }
        }
        out
    }

    fn dagger(m: &Matrix4) -> Matrix4 {
        let mut out = *m;
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] = m[c][r].conj();
            }
        }
        out
    }

    #[test]
    fn group_has_expected_order() {
        assert_eq!(table().elements.len(), GROUP_ORDER);
        assert!(Clifford2::identity().decomposition().is_empty());
        let longest = table().elements.iter().map(|e| e.decomposition.len()).max().unwrap();
        assert!(longest < 20, "decompositions stay short: {longest}");
    }

    #[test]
    fn conjugation_table_matches_matrices() {
        for idx in (0..GROUP_ORDER).step_by(37) {
            let c = Clifford2::from_index(idx).unwrap();
            let u = c.matrix();
            assert!(crate::gate::unitarity_deviation(&u) < 1e-10);
            for p in 0..16u8 {
                let (q, s) = c.conjugate(p);
                let lhs = matmul(&matmul(&u, &pauli_matrix(p)), &dagger(&u));
                let sign = if s { -1.0 } else { 1.0 };
                let rhs = pauli_matrix(q);
                for r in 0..4 {
                    for k in 0..4 {
                        assert!((lhs[r][k] - rhs[r][k] * sign).norm() < 1e-10, "element {idx} pauli {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = Clifford2::sample(&mut rng);
            let inv = c.inverse();
            for p in 0..16u8 {
                let (q, s) = c.conjugate(p);
                let (r, t) = inv.conjugate(q);
                assert_eq!((r, s ^ t), (p, false));
            }
        }
    }

    #[test]
    fn every_class_has_sixteen_elements() {
        let mut counts = vec![0usize; SYMPLECTIC_CLASSES];
        for i in 0..GROUP_ORDER {
            counts[Clifford2::from_index(i).unwrap().symplectic_class()] += 1;
        }
        assert!(counts.iter().all(|&c| c == 16));
    }
}
