use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expression parse error in {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart file {path}: {message}")]
    ChartFile { path: String, message: String },
    #[error("invalid resolution: {0}")]
    Resolution(String),
    #[error("operator or state belongs to a different grid")]
    GridMismatch,
    #[error("unsupported chart: {0}")]
    UnsupportedChart(String),
    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },
    #[error("field is not tangential: normal component {component:.3e} at node {node}")]
    NotTangential { node: usize, component: f64 },
    #[error("operator is not Hermitian: residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("state is not representable in the resolved band: captured norm {captured:.6}")]
    OutsideBand { captured: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear algebra failure: {0}")]
    LinAlg(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
