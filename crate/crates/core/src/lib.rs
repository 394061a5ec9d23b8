//! Workbench for ACC circuit satisfiability and succinct-3SAT witness
//! verification.
//!
//! The crate covers the circuit IR and its file formats, brute-force
//! ground truth, multilinear polynomials and the `g ∘ h` decomposition of
//! ACC circuits, the k-blowup satisfiability pipeline, succinct 3-CNF
//! encodings with the clause-check circuit, wire-value consistency
//! circuits, a toy Cook–Levin reduction and the end-to-end verification
//! harness.

pub mod accsat;
pub mod bench;
pub mod circuit;
pub mod consistency;
pub mod cooklevin;
pub mod cnf;
pub mod decompose;
pub mod error;
pub mod gen;
pub mod harness;
pub mod io;
pub mod multilinear;
pub mod oracle;
pub mod rom;
pub mod succinct;
pub mod truthtable;

pub use circuit::{Circuit, CircuitBuilder, CircuitStats, Gate, GateId, GateKind};
pub use error::{Error, Result};
pub use truthtable::TruthTable;
