use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch { context: String, expected: usize, got: usize },
    #[error("cannot parse {field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("domain error in {field}: {op} at {arg} in `{expr}`")]
    Domain { field: String, op: String, arg: f64, expr: String },
    #[error("singular velocity Hessian (|det| = {det:e}); the Lagrangian is degenerate here")]
    SingularHessian { det: f64 },
    #[error("no critical fiber found after {iterations} iterations (residual {residual:e})")]
    NoCriticalFiber { iterations: usize, residual: f64 },
    #[error("point violates {constraint}: residual {residual:e} exceeds {tolerance:e}")]
    Constraint { constraint: String, residual: f64, tolerance: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn dims(context: impl Into<String>, expected: usize, got: usize) -> Error {
        Error::DimensionMismatch { context: context.into(), expected, got }
    }

    pub(crate) fn check_dim(context: &str, expected: usize, got: usize) -> Result<(), Error> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::dims(context, expected, got))
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
