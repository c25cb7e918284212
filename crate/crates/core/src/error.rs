use crate::C64;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("derivative requested at pole")]
    DerivativeAtPole,

    #[error("iteration singularity: {0}")]
    IterationSingularity(&'static str),

    #[error("formula undefined: {0}")]
    FormulaUndefined(String),

    /// `a = −1` turns the quadratic for `b` linear: one root is finite, the
    /// other has gone to infinity.
    #[error("unbounded branch: only b = {finite_root} is finite")]
    UnboundedBranch { finite_root: C64 },

    #[error("not a fixed point (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("polynomial solver did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize, estimates: Vec<C64> },

    #[error("order not measurable: {0}")]
    OrderNotMeasurable(String),

    #[error("no finite antenna bound when n = k")]
    NoAntennaBound,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
