use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive {what} {value} at {location}")]
    NonPositiveWeight {
        what: &'static str,
        location: String,
        value: f64,
    },

    #[error("asymmetric conductance on edge ({0}, {1})")]
    AsymmetricConductance(usize, usize),

    #[error("vertex index {index} out of range for a graph with {n} vertices")]
    DanglingVertex { index: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("region is empty")]
    EmptyRegion,

    #[error("schedule is empty")]
    EmptySchedule,

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("neighbor enumeration failed: {0}")]
    Enumeration(String),

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("graph is disconnected; vertices {component:?} form a separate component")]
    Disconnected { component: Vec<usize> },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid word `{0}`")]
    InvalidWord(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("fiber is infinite; a finite window is required")]
    InfiniteFiber,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("weight function is not positive at vertex {0}")]
    NonPositivePhi(usize),

    #[error("perturbation is not finite: {0}")]
    NonFinitePerturbation(String),

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("bracket does not straddle the convergence change: {0}")]
    Bracket(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error lies in the input (schema, parameters, graph data)
    /// rather than in a computation.
    pub fn is_input(&self) -> bool {
        !matches!(
            self,
            Error::ZeroFunction
                | Error::NotConverged(_)
                | Error::TooLarge(_)
                | Error::Residual { .. }
                | Error::NonPositivePhi(_)
                | Error::WindowOverflow(_)
                | Error::Overflow(_)
                | Error::Enumeration(_)
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
