use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain on which the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Holmes–Thompson volume requests are recognized but not computed.
    #[error("unsupported volume branch: {0}")]
    UnsupportedBranch(String),

    #[error("quadrature did not converge: last two estimates {previous} and {last}")]
    QuadratureNonConvergence { previous: f64, last: f64 },

    #[error("degenerate immersion jet: det A = {det_a:e} (trace A = {trace_a:e})")]
    DegenerateJet { det_a: f64, trace_a: f64 },

    #[error("transversal field lies in the tangent plane (triple product {triple:e})")]
    DegenerateTransversal { triple: f64 },

    #[error("pole: {0}")]
    Pole(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("Newton iteration did not converge in {} iterations (final residual {:e})", history.len().saturating_sub(1), history.last().copied().unwrap_or(f64::NAN))]
    SolverNonConvergence { history: Vec<f64> },

    #[error("line search stagnated at residual {:e}", history.last().copied().unwrap_or(f64::NAN))]
    Stagnation { history: Vec<f64> },

    #[error("singular linear system at row {0}")]
    SingularSystem(usize),

    #[error("grid file: {0}")]
    GridFormat(String),
}

impl Error {
    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::SolverNonConvergence { .. }
                | Error::Stagnation { .. }
                | Error::SingularSystem(_)
        )
    }
}
