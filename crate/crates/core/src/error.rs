use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input record. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The class has no in-class edges or no out-class edges, so the
    /// logit of the homophily index is infinite and the residuals are undefined.
    #[error("perfect separation for class {class}: homophily index is {h_hat}")]
    PerfectSeparation { class: String, h_hat: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("could not draw a split with both classes in train and test after {attempts} attempts")]
    DegenerateSplit { attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
