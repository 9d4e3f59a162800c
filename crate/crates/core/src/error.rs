use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential term {index}: {reason}")]
    InvalidTerm { index: usize, reason: String },

    #[error("invalid channel configuration: {0}")]
    InvalidChannel(String),

    #[error("invalid energy grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("quadrature rule mismatch: {0}")]
    RuleMismatch(String),

    #[error("tridiagonal eigensolver failed to converge at index {index}")]
    TridiagonalNoConvergence { index: usize },

    #[error("QR iteration did not converge for a matrix of order {order} (last shifts: {shifts:?})")]
    NoConvergence { order: usize, shifts: Vec<num_complex::Complex64> },

    #[error("eigenvector is quasi-null (|x^T x| = {bilinear:e}); use a finite-difference derivative")]
    QuasiNullVector { bilinear: f64 },

    #[error("ambiguous eigenvalue selection near Z = {target}: {first} and {second} are equidistant; refine the grid")]
    AmbiguousSelection {
        target: f64,
        first: num_complex::Complex64,
        second: num_complex::Complex64,
    },

    #[error("at E = {energy}: {source}")]
    AtEnergy {
        energy: num_complex::Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("resonance at E = {0} is not converged")]
    NotConverged(num_complex::Complex64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at_energy(self, energy: num_complex::Complex64) -> Self {
        Error::AtEnergy { energy, source: Box::new(self) }
    }

    /// True for failures of an iterative solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::TridiagonalNoConvergence { .. }
            | Error::NoConvergence { .. }
            | Error::QuasiNullVector { .. }
            | Error::AmbiguousSelection { .. } => true,
            Error::AtEnergy { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
