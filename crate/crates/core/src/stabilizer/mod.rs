//! Clifford simulation: Pauli strings, a CHP-style tableau, a dense
//! statevector reference and the circuit format shared by both.

pub mod circuit;
pub mod pauli;
pub mod statevector;
pub mod tableau;

pub use circuit::{run_circuit, Basis, Circuit, Gate, Instruction, Moment, Simulator};
pub use pauli::{Pauli, PauliString};
pub use statevector::StateVector;
pub use tableau::{Outcome, Tableau};
