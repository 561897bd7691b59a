//! Stabilizer states in the destabilizer/stabilizer tableau form, with rows
//! bit-packed into `u64` words.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. A row encodes
//! `(-1)^r X^x Z^z` per qubit with `(x, z) = (1, 1)` read as `Y`.

use std::fmt;

use rand::Rng;

use crate::clifford2::Clifford2;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::gf2::{rank_u64, BitMatrix};
use crate::subset::QubitSubset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl StabilizerTableau {
    /// The state `|0...0>`: destabilizers `X_q`, stabilizers `+Z_q`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("tableau needs at least one qubit".into()));
        }
        let words = n.div_ceil(64);
        let mut t = Self { n, words, x: vec![0; 2 * n * words], z: vec![0; 2 * n * words], r: vec![false; 2 * n] };
        for q in 0..n {
            t.x[q * words + q / 64] |= 1 << (q % 64);
            t.z[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn xbit(&self, row: usize, q: usize) -> bool {
        (self.x[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn zbit(&self, row: usize, q: usize) -> bool {
        (self.z[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::InvalidGate(format!("qubit {q} out of range for {} qubits", self.n)))
        }
    }

    /// Applies a Clifford gate. Rotations with angle exactly zero act as the
    /// identity; `T`, nonzero rotations and dense unitaries are rejected.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n)?;
        match *op {
            GateOp::I(_) => {}
            GateOp::X(q) => self.x_gate(q),
            GateOp::Y(q) => self.y_gate(q),
            GateOp::Z(q) => self.z_gate(q),
            GateOp::H(q) => self.h(q),
            GateOp::S(q) => self.s(q),
            GateOp::Cnot { control, target } => self.cnot(control, target),
            GateOp::Clifford2 { qubits: [a, b], element } => self.clifford2(a, b, element),
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } if angle == 0.0 => {}
            GateOp::MeasureZ(_) => {
                return Err(Error::InvalidGate("MZ needs a random stream; use measure_z".into()));
            }
            _ => return Err(Error::UnsupportedGate(op.to_string())),
        }
        #[cfg(debug_assertions)]
        self.debug_check();
        Ok(())
    }

    fn for_rows(&mut self, q: usize, mut f: impl FnMut(&mut u64, &mut u64, &mut bool, u64)) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            f(&mut self.x[i], &mut self.z[i], &mut self.r[row], m);
        }
    }

    pub fn x_gate(&mut self, q: usize) {
        self.for_rows(q, |_, z, r, m| *r ^= *z & m != 0);
    }

    pub fn z_gate(&mut self, q: usize) {
        self.for_rows(q, |x, _, r, m| *r ^= *x & m != 0);
    }

    pub fn y_gate(&mut self, q: usize) {
        self.for_rows(q, |x, z, r, m| *r ^= (*x ^ *z) & m != 0);
    }

    pub fn h(&mut self, q: usize) {
        self.for_rows(q, |x, z, r, m| {
            let (xb, zb) = (*x & m, *z & m);
            *r ^= xb & zb != 0;
            *x = (*x & !m) | zb;
            *z = (*z & !m) | xb;
        });
    }

    pub fn s(&mut self, q: usize) {
        self.for_rows(q, |x, z, r, m| {
            *r ^= *x & *z & m != 0;
            *z ^= *x & m;
        });
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        let (wa, ma, wb, mb) = (a / 64, 1u64 << (a % 64), b / 64, 1u64 << (b % 64));
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xa = self.x[base + wa] & ma != 0;
            let za = self.z[base + wa] & ma != 0;
            let xb = self.x[base + wb] & mb != 0;
            let zb = self.z[base + wb] & mb != 0;
            self.r[row] ^= xa & zb & !(xb ^ za);
            if xa {
                self.x[base + wb] ^= mb;
            }
            if zb {
                self.z[base + wa] ^= ma;
            }
        }
    }

    /// Applies a two-qubit Clifford through its Pauli conjugation table.
    pub fn clifford2(&mut self, a: usize, b: usize, c: Clifford2) {
        let (wa, sa, wb, sb) = (a / 64, a % 64, b / 64, b % 64);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let p = ((self.x[base + wa] >> sa) & 1)
                | ((self.z[base + wa] >> sa) & 1) << 1
                | ((self.x[base + wb] >> sb) & 1) << 2
                | ((self.z[base + wb] >> sb) & 1) << 3;
            let (q, flip) = c.conjugate(p as u8);
            let q = q as u64;
            self.x[base + wa] = (self.x[base + wa] & !(1 << sa)) | (q & 1) << sa;
            self.z[base + wa] = (self.z[base + wa] & !(1 << sa)) | ((q >> 1) & 1) << sa;
            self.x[base + wb] = (self.x[base + wb] & !(1 << sb)) | ((q >> 2) & 1) << sb;
            self.z[base + wb] = (self.z[base + wb] & !(1 << sb)) | ((q >> 3) & 1) << sb;
            self.r[row] ^= flip;
        }
    }

    /// Phase exponent (mod 4) contributed by multiplying row `i` onto `(hx, hz)`.
    fn product_phase(&self, hx: &[u64], hz: &[u64], i: usize) -> u32 {
        let base = i * self.words;
        let (mut plus, mut minus) = (0u32, 0u32);
        for k in 0..self.words {
            let (x1, z1, x2, z2) = (self.x[base + k], self.z[base + k], hx[k], hz[k]);
            let y1 = x1 & z1;
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            plus += ((y1 & z2 & !x2) | (xo & z2 & x2) | (zo & x2 & !z2)).count_ones();
            minus += ((y1 & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2)).count_ones();
        }
        (plus + 4 * self.words as u32 * 64 - minus) % 4
    }

    /// Replaces row `h` by the product `row_i * row_h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let hx = self.x[h * w..(h + 1) * w].to_vec();
        let hz = self.z[h * w..(h + 1) * w].to_vec();
        let total = 2 * self.r[h] as u32 + 2 * self.r[i] as u32 + self.product_phase(&hx, &hz, i);
        self.r[h] = total % 4 == 2;
        for k in 0..w {
            self.x[h * w + k] ^= self.x[i * w + k];
            self.z[h * w + k] ^= self.z[i * w + k];
        }
    }

    /// Sign of `Z_q` if it lies in the stabilizer group, else `None`.
    fn deterministic_sign(&self, q: usize) -> Option<bool> {
        if (self.n..2 * self.n).any(|row| self.xbit(row, q)) {
            return None;
        }
        let w = self.words;
        let (mut sx, mut sz, mut sr) = (vec![0u64; w], vec![0u64; w], false);
        for i in (0..self.n).filter(|&i| self.xbit(i, q)) {
            let s = i + self.n;
            let total = 2 * sr as u32 + 2 * self.r[s] as u32 + self.product_phase(&sx, &sz, s);
            sr = total % 4 == 2;
            for k in 0..w {
                sx[k] ^= self.x[s * w + k];
                sz[k] ^= self.z[s * w + k];
            }
        }
        Some(sr)
    }

    /// Projective Z measurement of qubit `q`.
    ///
    /// Draws exactly one uniform `f64` from `rng` whether or not the outcome is
    /// random, so a replay on the statevector backend stays in lockstep. A
    /// random outcome is 0 iff the draw is below 1/2.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        self.check_qubit(q)?;
        let u: f64 = rng.gen();
        let n = self.n;
        let outcome = match (n..2 * n).find(|&row| self.xbit(row, q)) {
            None => self.deterministic_sign(q).map(u8::from).unwrap_or(0),
            Some(p) => {
                for i in 0..2 * n {
                    if i != p && self.xbit(i, q) {
                        self.rowsum(i, p);
                    }
                }
                let w = self.words;
                let d = p - n;
                self.x.copy_within(p * w..(p + 1) * w, d * w);
                self.z.copy_within(p * w..(p + 1) * w, d * w);
                self.r[d] = self.r[p];
                self.x[p * w..(p + 1) * w].fill(0);
                self.z[p * w..(p + 1) * w].fill(0);
                self.z[p * w + q / 64] |= 1 << (q % 64);
                let outcome = u8::from(u >= 0.5);
                self.r[p] = outcome == 1;
                outcome
            }
        };
        #[cfg(debug_assertions)]
        self.debug_check();
        Ok(outcome)
    }

    /// `<Z_q>`: +-1 when `Z_q` is in the stabilizer group, 0 otherwise.
    pub fn expectation_z(&self, q: usize) -> Result<i8> {
        self.check_qubit(q)?;
        Ok(match self.deterministic_sign(q) {
            None => 0,
            Some(false) => 1,
            Some(true) => -1,
        })
    }

    /// Entanglement entropy of `a` in bits: rank of the stabilizers restricted
    /// to `a`, minus `|a|`. All Renyi orders agree on stabilizer states.
    pub fn entropy(&self, a: &QubitSubset) -> Result<usize> {
        if a.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        if let Some(&q) = a.indices().last() {
            if q >= self.n {
                return Err(Error::InvalidSubset(format!("index {q} out of range for {} qubits", self.n)));
            }
        }
        let k = a.len();
        let rank = if 2 * k <= 64 {
            let mut rows: Vec<u64> = (self.n..2 * self.n)
                .map(|row| {
                    a.indices().iter().enumerate().fold(0u64, |acc, (j, &q)| {
                        acc | (self.xbit(row, q) as u64) << (2 * j) | (self.zbit(row, q) as u64) << (2 * j + 1)
                    })
                })
                .collect();
            rank_u64(&mut rows)
        } else {
            let mut m = BitMatrix::zeros(self.n, 2 * k);
            for (i, row) in (self.n..2 * self.n).enumerate() {
                for (j, &q) in a.indices().iter().enumerate() {
                    m.set(i, 2 * j, self.xbit(row, q));
                    m.set(i, 2 * j + 1, self.zbit(row, q));
                }
            }
            m.eliminate()
        };
        Ok(rank - k)
    }

    fn symplectic(&self, i: usize, j: usize) -> bool {
        let (bi, bj) = (i * self.words, j * self.words);
        let mut acc = 0u32;
        for k in 0..self.words {
            acc += (self.x[bi + k] & self.z[bj + k]).count_ones() + (self.z[bi + k] & self.x[bj + k]).count_ones();
        }
        acc % 2 == 1
    }

    /// Checks commutation, independence and destabilizer pairing.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i < j && self.symplectic(n + i, n + j) {
                    return Err(format!("stabilizers {i} and {j} anticommute"));
                }
                if self.symplectic(i, n + j) != (i == j) {
                    return Err(format!("destabilizer {i} / stabilizer {j} pairing broken"));
                }
            }
        }
        let mut m = BitMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for q in 0..n {
                m.set(i, q, self.xbit(n + i, q));
                m.set(i, n + q, self.zbit(n + i, q));
            }
        }
        if m.rank() != n {
            return Err("stabilizers are linearly dependent".into());
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        // full check is cubic; only small registers are checked on every step
        if self.n <= 12 {
            if let Err(e) = self.check_invariants() {
                panic!("tableau invariant violated: {e}");
            }
        }
    }

    fn row_string(&self, row: usize) -> String {
        let mut s = String::with_capacity(self.n + 1);
        s.push(if self.r[row] { '-' } else { '+' });
        for q in 0..self.n {
            s.push(match (self.xbit(row, q), self.zbit(row, q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            });
        }
        s
    }

    /// Signed stabilizer generators, qubit 0 leftmost, e.g. `"+XX"`.
    pub fn stabilizers(&self) -> Vec<String> {
        (self.n..2 * self.n).map(|r| self.row_string(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<String> {
        (0..self.n).map(|r| self.row_string(r)).collect()
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "destabilizers")?;
        for s in self.destabilizers() {
            writeln!(f, "  {s}")?;
        }
        writeln!(f, "stabilizers")?;
        for s in self.stabilizers() {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
