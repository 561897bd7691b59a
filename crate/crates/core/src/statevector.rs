//! Dense pure-state simulation over `2^n` amplitudes.
//!
//! Basis index bit `q` holds qubit `q` (little-endian). Subsystem observables
//! gather amplitudes into a `2^k x 2^(n-k)` matrix `M` with rows indexed by
//! the smaller side, so `M M^†` is the reduced state of that side.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gate::{GateOp, Matrix4};
use crate::subset::QubitSubset;

pub const DEFAULT_QUBIT_CAP: usize = 26;

type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|0...0>` with the default qubit cap.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("state needs at least one qubit".into()));
        }
        if n > cap {
            return Err(Error::Resource(format!("{n} qubits exceeds the statevector cap of {cap}")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSize(format!("amplitude count {len} is not a power of two >= 2")));
        }
        let s = Self { n: len.trailing_zeros() as usize, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NumericalState(format!("norm^2 = {norm}")));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
    }

    /// Applies any unitary gate. Measurements go through [`PureState::measure_z`].
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n)?;
        match *op {
            GateOp::I(_) => {}
            GateOp::X(q) => self.apply_x(q),
            GateOp::Y(q) => self.apply_1q(q, &[[ZERO, -Complex64::i()], [Complex64::i(), ZERO]]),
            GateOp::Z(q) => self.apply_phase(q, -ONE),
            GateOp::H(q) => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q(q, &[[h, h], [h, -h]]);
            }
            GateOp::S(q) => self.apply_phase(q, Complex64::i()),
            GateOp::T(q) => self.apply_phase(q, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            GateOp::Cnot { control, target } => self.apply_cnot(control, target),
            GateOp::Rx { qubit, angle } => self.apply_1q(qubit, &rx(angle)),
            GateOp::Ry { qubit, angle } => self.apply_1q(qubit, &ry(angle)),
            GateOp::Rz { qubit, angle } => self.apply_1q(qubit, &rz(angle)),
            GateOp::Clifford2 { qubits: [a, b], element } => self.apply_2q(a, b, &element.matrix()),
            GateOp::Unitary2 { qubits: [a, b], ref matrix } => self.apply_2q(a, b, matrix),
            GateOp::MeasureZ(_) => {
                return Err(Error::InvalidGate("MZ needs a random stream; use measure_z".into()));
            }
        }
        Ok(())
    }

    fn apply_x(&mut self, q: usize) {
        let m = 1usize << q;
        for i in (0..self.amps.len()).filter(|i| i & m == 0) {
            self.amps.swap(i, i | m);
        }
    }

    fn apply_phase(&mut self, q: usize, phase: Complex64) {
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a *= phase;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let stride = 1usize << q;
        for block in (0..self.amps.len()).step_by(2 * stride) {
            for i in block..block + stride {
                let (a0, a1) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Dense 4x4 on `(a, b)`; local index is `bit_a | bit_b << 1`.
    pub fn apply_2q(&mut self, a: usize, b: usize, m: &Matrix4) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & (ma | mb) != 0 {
                continue;
            }
            let idx = [i, i | ma, i | mb, i | ma | mb];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    /// Probability of reading 0 on qubit `q`.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m == 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projective Z measurement. Draws one uniform `u`; the outcome is 0 iff
    /// `u < p0`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        if q >= self.n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        let u: f64 = rng.gen();
        let p0 = self.prob_zero(q);
        let p1 = self.norm_sqr() - p0;
        if p0 < 1e-12 && p1 < 1e-12 {
            return Err(Error::NumericalState(format!("both outcomes of qubit {q} have vanishing weight")));
        }
        let total = p0 + p1;
        let outcome = u8::from(u >= p0 / total);
        let keep = if outcome == 0 { p0 } else { p1 };
        let scale = 1.0 / keep.sqrt();
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & m != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(outcome)
    }

    fn check_subset(&self, a: &QubitSubset) -> Result<()> {
        if a.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        match a.indices().last() {
            Some(&q) if q >= self.n => {
                Err(Error::InvalidSubset(format!("index {q} out of range for {} qubits", self.n)))
            }
            _ => Ok(()),
        }
    }

    /// Gram matrix `M M^†` (row-major, `2^k x 2^k`) of the smaller side of the
    /// cut; `None` when `a` covers every qubit.
    fn reduced_small_side(&self, a: &QubitSubset) -> Option<(usize, Vec<Complex64>)> {
        let rows = if 2 * a.len() <= self.n { a.clone() } else { a.complement(self.n)? };
        let cols = rows.complement(self.n)?;
        let row_off = offsets(rows.indices());
        let col_off = offsets(cols.indices());
        let (dr, dc) = (row_off.len(), col_off.len());
        let mut mat = vec![ZERO; dr * dc];
        for (r, &ro) in row_off.iter().enumerate() {
            for (c, &co) in col_off.iter().enumerate() {
                mat[r * dc + c] = self.amps[ro | co];
            }
        }
        let mut gram = vec![ZERO; dr * dr];
        for i in 0..dr {
            let ri = &mat[i * dc..(i + 1) * dc];
            for j in i..dr {
                let rj = &mat[j * dc..(j + 1) * dc];
                let s: Complex64 = ri.iter().zip(rj).map(|(x, y)| x * y.conj()).sum();
                gram[i * dr + j] = s;
                gram[j * dr + i] = s.conj();
            }
        }
        Some((dr, gram))
    }

    /// `Tr rho_A^2`. Exactly 1 when `a` is the whole register.
    pub fn purity(&self, a: &QubitSubset) -> Result<f64> {
        self.check_subset(a)?;
        Ok(match self.reduced_small_side(a) {
            None => 1.0,
            Some((_, g)) => g.iter().map(|z| z.norm_sqr()).sum(),
        })
    }

    /// `Tr rho_A^4`, via the squared Gram matrix.
    pub fn trace_rho4(&self, a: &QubitSubset) -> Result<f64> {
        self.check_subset(a)?;
        let Some((d, g)) = self.reduced_small_side(a) else {
            return Ok(1.0);
        };
        let mut total = 0.0;
        for i in 0..d {
            for j in 0..d {
                let v: Complex64 = (0..d).map(|k| g[i * d + k] * g[k * d + j]).sum();
                total += v.norm_sqr();
            }
        }
        Ok(total)
    }

    /// Renyi entropy in bits, for order 2 or 4.
    pub fn renyi_entropy(&self, a: &QubitSubset, order: u32) -> Result<f64> {
        let v = match order {
            2 => -self.purity(a)?.log2(),
            4 => -self.trace_rho4(a)?.log2() / 3.0,
            _ => return Err(Error::InvalidConfig(format!("unsupported Renyi order {order}"))),
        };
        // clamp the -0.0 / tiny negatives of pure product states
        Ok(v.max(0.0))
    }

    /// `sum_{q in A} <sigma_z^q>` with `<sigma_z>(|0>) = +1`.
    pub fn spin_z(&self, a: &QubitSubset) -> Result<f64> {
        self.check_subset(a)?;
        Ok(a.indices().iter().map(|&q| 2.0 * self.prob_zero(q) - self.norm_sqr()).sum())
    }

    /// Explicit reduced density matrix of `a` (basis bit `j` = `a.indices()[j]`).
    pub fn reduced_density(&self, a: &QubitSubset) -> Result<ReducedDensity> {
        self.check_subset(a)?;
        let k = a.len();
        let row_off = offsets(a.indices());
        let col_off = match a.complement(self.n) {
            Some(c) => offsets(c.indices()),
            None => vec![0],
        };
        let d = row_off.len();
        let mut m = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = col_off.iter().map(|&c| self.amps[row_off[i] | c] * self.amps[row_off[j] | c].conj()).sum();
            }
        }
        Ok(ReducedDensity { k, matrix: m })
    }
}

/// Basis-index offsets for every assignment of the given qubits.
fn offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|v| qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | ((v >> j) & 1) << q))
        .collect()
}

fn rx(t: f64) -> Matrix2 {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]]
}

fn ry(t: f64) -> Matrix2 {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
}

fn rz(t: f64) -> Matrix2 {
    [[Complex64::from_polar(1.0, -t / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, t / 2.0)]]
}

/// Reduced density matrix on `k` qubits, row-major `2^k x 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub k: usize,
    pub matrix: Vec<Complex64>,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        1 << self.k
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[i * self.dim() + i]).sum()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut e = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                e = e.max((self.matrix[i * d + j] - self.matrix[j * d + i].conj()).norm());
            }
        }
        e
    }

    /// `Tr rho^p` by repeated multiplication.
    pub fn trace_power(&self, p: u32) -> f64 {
        let d = self.dim();
        let mut acc = self.matrix.clone();
        for _ in 1..p {
            let mut next = vec![ZERO; d * d];
            for i in 0..d {
                for k in 0..d {
                    let a = acc[i * d + k];
                    for j in 0..d {
                        next[i * d + j] += a * self.matrix[k * d + j];
                    }
                }
            }
            acc = next;
        }
        (0..d).map(|i| acc[i * d + i].re).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn subset(ix: &[usize], n: usize) -> QubitSubset {
        QubitSubset::new(ix.iter().copied(), n).unwrap()
    }

    fn bell() -> PureState {
        let mut s = PureState::new(2).unwrap();
        s.apply(&GateOp::H(0)).unwrap();
        s.apply(&GateOp::Cnot { control: 0, target: 1 }).unwrap();
        s
    }

    fn random_state(n: usize, seed: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = PureState::new(n).unwrap();
        for _ in 0..40 {
            let q = rng.gen_range(0..n);
            s.apply(&GateOp::Ry { qubit: q, angle: rng.gen_range(-3.0..3.0) }).unwrap();
            s.apply(&GateOp::Rz { qubit: q, angle: rng.gen_range(-3.0..3.0) }).unwrap();
            let t = (q + 1 + rng.gen_range(0..n - 1)) % n;
            s.apply(&GateOp::Cnot { control: q, target: t }).unwrap();
        }
        s
    }

    #[test]
    fn init_and_caps() {
        let s = PureState::new(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);
        assert_eq!(PureState::new(2).unwrap().purity(&subset(&[0], 2)).unwrap(), 1.0);
        assert!((PureState::new(3).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
        assert!(matches!(PureState::new(27), Err(Error::Resource(_))));
        assert!(matches!(PureState::with_cap(5, 4), Err(Error::Resource(_))));
    }

    #[test]
    fn t_on_plus() {
        let mut s = PureState::new(1).unwrap();
        s.apply(&GateOp::H(0)).unwrap();
        s.apply(&GateOp::T(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - Complex64::new(r, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - Complex64::from_polar(r, std::f64::consts::FRAC_PI_4)).norm() < 1e-12);
    }

    #[test]
    fn hadamard_is_involution() {
        let s0 = random_state(4, 1);
        let mut s = s0.clone();
        s.apply(&GateOp::H(2)).unwrap();
        s.apply(&GateOp::H(2)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rz_quarter_pi_matches_t_up_to_phase() {
        let mut a = random_state(3, 2);
        let mut b = a.clone();
        a.apply(&GateOp::T(1)).unwrap();
        b.apply(&GateOp::Rz { qubit: 1, angle: std::f64::consts::FRAC_PI_4 }).unwrap();
        assert!((a.overlap(&b) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_unitary_payload_rejected() {
        let mut s = PureState::new(2).unwrap();
        let mut m = Box::new([[ZERO; 4]; 4]);
        m[0][0] = Complex64::new(2.0, 0.0);
        let err = s.apply(&GateOp::Unitary2 { qubits: [0, 1], matrix: m }).unwrap_err();
        assert!(matches!(err, Error::InvalidGate(_)));
    }

    #[test]
    fn measurement_threshold_convention() {
        // u = 0.3: the standard f64 sampler uses the top 53 bits
        let bits = ((0.3f64 * (1u64 << 53) as f64) as u64) << 11;
        let mut rng = rand::rngs::mock::StepRng::new(bits, 0);
        let u: f64 = rng.gen();
        assert!((u - 0.3).abs() < 1e-12);
        let mut s = PureState::new(1).unwrap();
        s.apply(&GateOp::H(0)).unwrap();
        assert_eq!(s.measure_z(0, &mut rng).unwrap(), 0);
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        let mut zero = PureState::new(1).unwrap();
        assert_eq!(zero.measure_z(0, &mut rng).unwrap(), 0);
        assert_eq!(zero, PureState::new(1).unwrap());
    }

    #[test]
    fn born_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut base = PureState::new(1).unwrap();
        base.apply(&GateOp::Ry { qubit: 0, angle: 1.0 }).unwrap();
        let p0 = base.prob_zero(0);
        let trials = 10_000;
        let zeros = (0..trials).filter(|_| base.clone().measure_z(0, &mut rng).unwrap() == 0).count();
        let sigma = (trials as f64 * p0 * (1.0 - p0)).sqrt();
        assert!((zeros as f64 - trials as f64 * p0).abs() < 3.0 * sigma);
    }

    #[test]
    fn bell_observables() {
        let b = bell();
        let a0 = subset(&[0], 2);
        assert!((b.purity(&a0).unwrap() - 0.5).abs() < 1e-12);
        assert!((b.renyi_entropy(&a0, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((b.renyi_entropy(&a0, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!(b.spin_z(&a0).unwrap().abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let mut s = bell();
            let x = s.measure_z(0, &mut rng).unwrap();
            assert_eq!(s.measure_z(1, &mut rng).unwrap(), x);
        }
    }

    #[test]
    fn product_state_observables() {
        let mut s = PureState::new(4).unwrap();
        assert_eq!(s.spin_z(&subset(&[0, 1], 4)).unwrap(), 2.0);
        for q in 0..4 {
            s.apply(&GateOp::H(q)).unwrap();
        }
        let a = subset(&[1, 3], 4);
        assert!((s.purity(&a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.renyi_entropy(&a, 2).unwrap(), 0.0);
        assert_eq!(s.renyi_entropy(&a, 4).unwrap(), 0.0);
        assert!(s.spin_z(&subset(&[0, 2, 3], 4)).unwrap().abs() < 1e-12);
        assert!(matches!(s.renyi_entropy(&a, 3), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn gathered_purity_matches_explicit_density() {
        let s = random_state(6, 3);
        for ix in [vec![0], vec![1, 4], vec![0, 2, 5], vec![0, 1, 3, 4], vec![0, 1, 2, 3, 5]] {
            let a = subset(&ix, 6);
            let rho = s.reduced_density(&a).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.hermiticity_error() < 1e-9);
            assert!((rho.trace_power(2) - s.purity(&a).unwrap()).abs() < 1e-10);
            assert!((rho.trace_power(4) - s.trace_rho4(&a).unwrap()).abs() < 1e-10);
            let c = a.complement(6).unwrap();
            assert!((s.purity(&a).unwrap() - s.purity(&c).unwrap()).abs() < 1e-9);
            assert!(s.renyi_entropy(&a, 4).unwrap() <= s.renyi_entropy(&a, 2).unwrap() + 1e-9);
        }
    }

    #[test]
    fn norm_survives_long_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut s = PureState::new(5).unwrap();
        for _ in 0..10_000 {
            let q = rng.gen_range(0..5);
            let op = match rng.gen_range(0..5) {
                0 => GateOp::H(q),
                1 => GateOp::T(q),
                2 => GateOp::Rx { qubit: q, angle: rng.gen_range(-3.0..3.0) },
                3 => GateOp::Cnot { control: q, target: (q + 1) % 5 },
                _ => GateOp::Clifford2 { qubits: [q, (q + 2) % 5], element: crate::clifford2::Clifford2::sample(&mut rng) },
            };
            s.apply(&op).unwrap();
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
