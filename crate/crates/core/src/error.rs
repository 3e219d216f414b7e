use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants fall in two groups: input problems ([`Error::Domain`],
/// [`Error::Validation`], [`Error::Unsupported`], [`Error::Contract`]) and
/// numerical failures (everything else). [`Error::is_numerical`] tells them
/// apart; the command-line front end maps the groups to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation in {op}: {msg}")]
    Contract { op: &'static str, msg: String },

    #[error("quadrature did not reach tolerance: value {value:e}, error estimate {err_est:e} after {subdivisions} subdivisions")]
    Tolerance {
        value: f64,
        err_est: f64,
        subdivisions: usize,
    },

    #[error("degenerate channel: tilted Jeffreys normalization is {0:e}")]
    Degenerate(f64),

    #[error("no tilt satisfies the power budget after {doublings} doublings (lambda = {lambda:e}, M = {m:e}); channel is close to deterministic in cost")]
    UnboundedTilt {
        doublings: usize,
        lambda: f64,
        m: f64,
    },

    #[error("budget exceeded: {needed} evaluations requested, budget is {budget}; use a smaller output alphabet or fewer antennas")]
    Resource { needed: f64, budget: f64 },

    #[error("{op} did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("positivity violated: {0}")]
    Positivity(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn contract(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Contract {
            op,
            msg: msg.into(),
        }
    }

    /// True for failures of a numerical method, false for rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Tolerance { .. }
                | Error::Degenerate(_)
                | Error::UnboundedTilt { .. }
                | Error::Resource { .. }
                | Error::Convergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
