use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field} = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("recurrence is degenerate at {field} = {value}; use the series composition instead")]
    Degenerate { field: &'static str, value: f64 },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {abs_error:e})"
    )]
    Convergence {
        estimate: f64,
        abs_error: f64,
        subdivisions: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(field: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain { field, value, reason }
}
