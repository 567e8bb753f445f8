use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of subdivisions (or extrapolation steps)
    /// before meeting its tolerance. The best estimate is kept.
    #[error(
        "quadrature did not converge: estimate {estimate:e} with error {error_estimate:e} \
         after {evaluations} evaluations"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("no sign change in bracket [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoRootInBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("tau = {tau} lies outside the table range [0, {tau_max}]")]
    OutOfRange { tau: f64, tau_max: f64 },

    #[error(
        "Markovian plateau not reached: Delta({tau_short}) = {value_short:e}, \
         Delta({tau_long}) = {value_long:e}"
    )]
    PlateauNotReached {
        tau_short: f64,
        value_short: f64,
        tau_long: f64,
        value_long: f64,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
