//! A common interface over the stabilizer and statevector simulators.

use rand::Rng;

use crate::error::Result;
use crate::gate::{Circuit, GateOp};
use crate::statevector::PureState;
use crate::subset::QubitSubset;
use crate::tableau::StabilizerTableau;

pub trait Simulator {
    fn num_qubits(&self) -> usize;

    /// Applies one op; measurements draw from `rng` and return their outcome.
    fn step<R: Rng + ?Sized>(&mut self, op: &GateOp, rng: &mut R) -> Result<Option<u8>>;

    /// Renyi-2 entropy of `a` in bits.
    fn entropy2(&self, a: &QubitSubset) -> Result<f64>;

    /// `sum_{q in a} <Z_q>`.
    fn spin_z(&self, a: &QubitSubset) -> Result<f64>;

    fn run<R: Rng + ?Sized>(&mut self, circuit: &Circuit, rng: &mut R) -> Result<Vec<u8>> {
        let mut outcomes = Vec::new();
        for op in &circuit.ops {
            if let Some(b) = self.step(op, rng)? {
                outcomes.push(b);
            }
        }
        Ok(outcomes)
    }
}

impl Simulator for StabilizerTableau {
    fn num_qubits(&self) -> usize {
        StabilizerTableau::num_qubits(self)
    }

    fn step<R: Rng + ?Sized>(&mut self, op: &GateOp, rng: &mut R) -> Result<Option<u8>> {
        match *op {
            GateOp::MeasureZ(q) => self.measure_z(q, rng).map(Some),
            _ => self.apply(op).map(|_| None),
        }
    }

    fn entropy2(&self, a: &QubitSubset) -> Result<f64> {
        self.entropy(a).map(|s| s as f64)
    }

    fn spin_z(&self, a: &QubitSubset) -> Result<f64> {
        a.indices().iter().map(|&q| self.expectation_z(q).map(f64::from)).sum()
    }
}

impl Simulator for PureState {
    fn num_qubits(&self) -> usize {
        PureState::num_qubits(self)
    }

    fn step<R: Rng + ?Sized>(&mut self, op: &GateOp, rng: &mut R) -> Result<Option<u8>> {
        match *op {
            GateOp::MeasureZ(q) => self.measure_z(q, rng).map(Some),
            _ => self.apply(op).map(|_| None),
        }
    }

    fn entropy2(&self, a: &QubitSubset) -> Result<f64> {
        self.renyi_entropy(a, 2)
    }

    fn spin_z(&self, a: &QubitSubset) -> Result<f64> {
        PureState::spin_z(self, a)
    }
}
