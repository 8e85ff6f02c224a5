use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// No admissible `A` produced exactly `k` seeds. `below`/`above` are the
    /// nearest seed counts observed on either side of `k`, when known.
    #[error("k = {k} is unachievable{}: nearest seed counts seen are {} (fewer) and {} (more)", if *.approximate { " (approx)" } else { "" }, count(.below), count(.above))]
    KUnachievable {
        k: usize,
        below: Option<usize>,
        above: Option<usize>,
        approximate: bool,
    },

    #[error("duplicate-degenerate density: point {point} has zero sparsity; use approximate mode or deduplicate input")]
    DegenerateDensity { point: usize },

    #[error("label vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    /// Every grid point of a parameter search failed.
    #[error("all {} parameter settings failed; first: {}", .failures.len(), .failures.first().map(String::as_str).unwrap_or("none"))]
    AllRunsFailed { failures: Vec<String> },

    #[error("unknown dataset kind `{0}`")]
    UnknownKind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn count(c: &Option<usize>) -> String {
    c.map_or_else(|| "none".to_string(), |c| c.to_string())
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
