//! diamondc: a compiler and noisy simulator for diamond NV-center quantum
//! computers.
//!
//! The pipeline takes a hardware-agnostic circuit (a small QASM-like text
//! format), lowers it onto the NV native gate set with electron-mediated
//! routing and diamond-specific optimizations (direct carbon control, partial
//! swaps), emits a quantum/classical assembly program, and can execute that
//! program on a density-matrix simulator with depolarization and idle
//! decoherence noise.
//!
//! See the `examples/` directory for one runnable example per capability, or
//! use the `diamondc` binary (`compile`, `simulate`, `experiment`).

pub mod circuit;
pub mod cli;
pub mod codegen;
pub mod experiments;
pub mod linalg;
pub mod native;
pub mod oracle;
pub mod passes;
pub mod simulator;
pub mod testgen;
pub mod topology;

pub use circuit::{parse_circuit, serialize_circuit, validate, Circuit};
pub use topology::{QubitId, QubitRole, TopologyConfig};
