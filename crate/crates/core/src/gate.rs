//! Gate operations and circuits shared by both simulation backends.
//!
//! Qubit convention is little-endian everywhere: qubit 0 is the least
//! significant bit of a basis-state index. For two-qubit payloads the local
//! basis index is `bit(qubits[0]) | bit(qubits[1]) << 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::clifford2::Clifford2;
use crate::error::{Error, Result};

pub type Matrix4 = [[Complex64; 4]; 4];

/// One operation in a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    I(usize),
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    /// Element of the two-qubit Clifford group acting on `qubits`.
    Clifford2 { qubits: [usize; 2], element: Clifford2 },
    /// Arbitrary two-qubit unitary (statevector backend only).
    Unitary2 { qubits: [usize; 2], matrix: Box<Matrix4> },
    MeasureZ(usize),
}

impl GateOp {
    pub fn name(&self) -> &'static str {
        match self {
            GateOp::I(_) => "I",
            GateOp::X(_) => "X",
            GateOp::Y(_) => "Y",
            GateOp::Z(_) => "Z",
            GateOp::H(_) => "H",
            GateOp::S(_) => "S",
            GateOp::T(_) => "T",
            GateOp::Cnot { .. } => "CNOT",
            GateOp::Rx { .. } => "RX",
            GateOp::Ry { .. } => "RY",
            GateOp::Rz { .. } => "RZ",
            GateOp::Clifford2 { .. } => "C2",
            GateOp::Unitary2 { .. } => "U2",
            GateOp::MeasureZ(_) => "MZ",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::I(q)
            | GateOp::X(q)
            | GateOp::Y(q)
            | GateOp::Z(q)
            | GateOp::H(q)
            | GateOp::S(q)
            | GateOp::T(q)
            | GateOp::MeasureZ(q)
            | GateOp::Rx { qubit: q, .. }
            | GateOp::Ry { qubit: q, .. }
            | GateOp::Rz { qubit: q, .. } => vec![q],
            GateOp::Cnot { control, target } => vec![control, target],
            GateOp::Clifford2 { qubits, .. } | GateOp::Unitary2 { qubits, .. } => qubits.to_vec(),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// True for gates the stabilizer backend can simulate (measurements included).
    pub fn is_clifford(&self) -> bool {
        match self {
            GateOp::T(_) | GateOp::Unitary2 { .. } => false,
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => *angle == 0.0,
            _ => true,
        }
    }

    /// Checks qubit indices and numeric payloads against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidGate(format!("{}: qubit {q} out of range for {n} qubits", self.name())));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidGate(format!("{}: repeated qubit {}", self.name(), qs[0])));
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidGate(format!("{}: non-finite angle", self.name())));
            }
        }
        if let GateOp::Unitary2 { matrix, .. } = self {
            let dev = unitarity_deviation(matrix);
            if dev > 1e-8 {
                return Err(Error::InvalidGate(format!("U2 payload is not unitary (deviation {dev:.3e})")));
            }
        }
        Ok(())
    }
}

/// Max-entry deviation of `M M^†` from the identity.
pub fn unitarity_deviation(m: &Matrix4) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let s: Complex64 = (0..4).map(|k| m[i][k] * m[j][k].conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((s - target).norm());
        }
    }
    dev
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        match self {
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => write!(f, " {angle:?}"),
            GateOp::Clifford2 { element, .. } => write!(f, " {}", element.index()),
            GateOp::Unitary2 { matrix, .. } => {
                for z in matrix.iter().flatten() {
                    write!(f, " {:?} {:?}", z.re, z.im)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("malformed op line: {line:?}"));
        let idx = |i: usize| -> Result<usize> { toks.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let real = |i: usize| -> Result<f64> { toks.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let expect_len = |k: usize| if toks.len() == k { Ok(()) } else { Err(bad()) };
        let kind = *toks.first().ok_or_else(bad)?;
        let op = match kind {
            "I" | "X" | "Y" | "Z" | "H" | "S" | "T" | "MZ" => {
                expect_len(2)?;
                let q = idx(1)?;
                match kind {
                    "I" => GateOp::I(q),
                    "X" => GateOp::X(q),
                    "Y" => GateOp::Y(q),
                    "Z" => GateOp::Z(q),
                    "H" => GateOp::H(q),
                    "S" => GateOp::S(q),
                    "T" => GateOp::T(q),
                    _ => GateOp::MeasureZ(q),
                }
            }
            "CNOT" => {
                expect_len(3)?;
                GateOp::Cnot { control: idx(1)?, target: idx(2)? }
            }
            "RX" | "RY" | "RZ" => {
                expect_len(3)?;
                let (qubit, angle) = (idx(1)?, real(2)?);
                match kind {
                    "RX" => GateOp::Rx { qubit, angle },
                    "RY" => GateOp::Ry { qubit, angle },
                    _ => GateOp::Rz { qubit, angle },
                }
            }
            "C2" => {
                expect_len(4)?;
                let element = Clifford2::from_index(idx(3)?).ok_or_else(bad)?;
                GateOp::Clifford2 { qubits: [idx(1)?, idx(2)?], element }
            }
            "U2" => {
                expect_len(3 + 32)?;
                let mut matrix = Box::new([[Complex64::new(0.0, 0.0); 4]; 4]);
                for k in 0..16 {
                    matrix[k / 4][k % 4] = Complex64::new(real(3 + 2 * k)?, real(4 + 2 * k)?);
                }
                GateOp::Unitary2 { qubits: [idx(1)?, idx(2)?], matrix }
            }
            _ => return Err(bad()),
        };
        Ok(op)
    }
}

/// Ensemble parameters a circuit was generated from.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitMeta {
    TDoped { n_t: usize },
    Mipt { theta: f64, p_m: f64, cycles: usize },
    Custom,
}

/// An ordered gate stream on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<GateOp>,
    pub meta: CircuitMeta,
    pub seed: u64,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new(), meta: CircuitMeta::Custom, seed: 0 }
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.ops.iter().try_for_each(|op| op.validate(self.n))?;
        if let CircuitMeta::TDoped { n_t } = self.meta {
            let t = self.count(|op| matches!(op, GateOp::T(_)));
            if t != n_t {
                return Err(Error::InvalidConfig(format!("circuit has {t} T gates, meta says {n_t}")));
            }
        }
        Ok(())
    }

    pub fn count(&self, pred: impl Fn(&GateOp) -> bool) -> usize {
        self.ops.iter().filter(|op| pred(op)).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(GateOp::is_clifford)
    }

    /// Line-oriented text form: a header comment, then one op per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {} seed {}\n", self.n, self.seed);
        for op in &self.ops {
            out.push_str(&op.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`Circuit::to_text`] output. Blank lines and `#` comments other
    /// than the header are ignored; the header is required.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty circuit text".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (n, seed) = match h.as_slice() {
            ["#", "qubits", n, "seed", s] => (
                n.parse().map_err(|_| Error::Parse(format!("bad header {header:?}")))?,
                s.parse().map_err(|_| Error::Parse(format!("bad header {header:?}")))?,
            ),
            _ => return Err(Error::Parse(format!("bad header {header:?}"))),
        };
        let mut c = Circuit { n, ops: Vec::new(), meta: CircuitMeta::Custom, seed };
        for l in lines.filter(|l| !l.starts_with('#')) {
            c.push(l.parse()?)?;
        }
        Ok(c)
    }
}
