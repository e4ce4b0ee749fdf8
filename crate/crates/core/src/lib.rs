//! Cyclic work extraction from arrays of identical d-level quantum batteries.
//!
//! The crate is organised bottom-up:
//!
//! - [`qmat`]: dense complex density-matrix kernel (Hermitian eigensolver, tensor
//!   products, partial traces, entropies, projective dephasing).
//! - [`battery`]: ensembles of identical batteries, composite Hamiltonians, Gibbs
//!   references and passivity checks.
//! - [`protocol`]: swap-based extraction cycles, their time evolution and the work
//!   bookkeeping against the optimal and classical limits.
//! - [`correlations`]: discord, classical correlations, global discord, genuine
//!   multipartite correlations, two-qubit entanglement and the commutator witness.
//! - [`mapping`]: reduction of a single-coherence qudit register onto qubits.
//!
//! All logarithms are base 2; entropies and correlations are reported in bits.

pub mod battery;
pub mod correlations;
pub mod error;
pub mod mapping;
pub mod protocol;
pub mod qmat;

pub use error::{Error, Result};
