//! Stabilizer-circuit toolkit for preparing X-cube ground states by
//! measuring a cluster state.
//!
//! * [`lattice`]: edge/cube geometry and index maps.
//! * [`stabilizer`]: Clifford simulators and the circuit text format.
//! * [`protocol`]: cluster preparation, ancilla measurement, correction.
//! * [`scheduler`]: movement and CZ12 schedules, circuit emission.
//! * [`syndrome`]: error injection, syndromes, single-error decoding, mobility.
//! * [`cli`]: the `xcube` command line.

pub mod cli;
pub mod error;
pub mod gf2;
pub mod lattice;
pub mod protocol;
pub mod scheduler;
pub mod stabilizer;
pub mod syndrome;

pub use error::{Error, Result};
