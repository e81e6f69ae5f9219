use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cylinder Q_{radius}({x:?}, {t}) is not contained in the field domain")]
    CylinderOutsideDomain { x: Vec<f64>, t: f64, radius: f64 },

    #[error("cylinder of radius {radius} contains no samples: {reason}")]
    EmptyCylinder { radius: f64, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("PSOR did not converge at time index {time_index} after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        time_index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("damped wave solution blew up at time index {time_index}; explicit scheme requires dt <= {cfl_bound:e}")]
    Unstable { time_index: usize, cfl_bound: f64 },

    #[error("resampling requires extrapolation outside the table at ({x:?}, {t})")]
    Extrapolation { x: Vec<f64>, t: f64 },

    #[error("point ({x:?}, {t}) violates a precondition: {reason}")]
    Precondition { x: Vec<f64>, t: f64, reason: String },

    #[error("blow-up window exceeds the domain; largest admissible lambda is {max_lambda:e}")]
    BlowupWindow { max_lambda: f64 },

    #[error("Weiss extrapolation did not converge; sequence {values:?}")]
    WeissNotConverged { values: Vec<f64> },

    #[error("no feasible active set found for the LCP")]
    NoFeasibleActiveSet,

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
