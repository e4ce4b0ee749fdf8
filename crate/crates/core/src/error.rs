use thiserror::Error;

/// Failures reported by the simulation and correlation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Matrix or site layout is inconsistent with the requested operation.
    #[error("shape error: {0}")]
    Shape(String),
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A measurement basis is incomplete, non-orthonormal or does not fit the sites.
    #[error("basis error: {0}")]
    Basis(String),
    /// More than one independent coherence was found where exactly one is allowed.
    #[error("state has more than one coherence: ({0}, {1}) and ({2}, {3})")]
    MultipleCoherences(usize, usize, usize, usize),
    /// The projection onto the kept subspace carries (almost) no weight.
    #[error("projected weight {0:e} is below tolerance")]
    ZeroWeight(f64),
    /// The basis search did not converge after all restarts.
    #[error("minimizer did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
