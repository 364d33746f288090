//! Random-circuit simulation: a graph-state stabilizer engine for monitored
//! Clifford circuits, a dense statevector engine, and finite-size-scaling
//! analysis.

pub mod clifford;
pub mod dense;
pub mod error;
pub mod gf2;
pub mod graph_state;
pub mod linalg;
pub mod monitored;
pub mod pauli;
pub mod purification;
pub mod rng;
pub mod scaling;

pub use clifford::{conjugate_pauli, sample_uniform_two_qubit, tables, CliffordOne, CliffordTables, CliffordTwo};
pub use error::{Error, Result};
pub use graph_state::{GraphState, MeasurementOutcome};
pub use pauli::{Pauli, PauliKind, Sign};
