//! Simulation of t-doped Clifford circuits and monitored random brickwork
//! circuits on two backends: a bit-packed stabilizer tableau for
//! Clifford-only workloads and a dense statevector for everything else.
//!
//! The crate also carries the statistics used to relate non-stabilizerness to
//! fluctuations of the Renyi-2 mutual information: population standard
//! deviation, kurtosis, linear fits and finite-size-scaling collapse, plus
//! exact Clifford-average predictions to check sampled ensembles against.
//!
//! ```
//! use magicflux::{GateOp, QubitSubset, StabilizerTableau};
//!
//! let mut t = StabilizerTableau::new(2).unwrap();
//! t.apply(&GateOp::H(0)).unwrap();
//! t.apply(&GateOp::Cnot { control: 0, target: 1 }).unwrap();
//! let a = QubitSubset::new([0], 2).unwrap();
//! assert_eq!(t.entropy(&a).unwrap(), 1);
//! ```

pub mod analysis;
pub mod backend;
pub mod clifford2;
pub mod error;
pub mod generate;
pub mod gate;
pub mod gf2;
pub mod harness;
pub mod observables;
pub mod oracle;
pub mod statevector;
pub mod subset;
pub mod tableau;
pub mod uniform_clifford;

pub use backend::Simulator;
pub use clifford2::Clifford2;
pub use error::{Error, Result};
pub use gate::{Circuit, CircuitMeta, GateOp};
pub use statevector::PureState;
pub use subset::QubitSubset;
pub use tableau::StabilizerTableau;
