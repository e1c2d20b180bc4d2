use thiserror::Error;

/// Errors raised by the simulation, dictionary, solver and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("integration diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate scaling: data is constant ({0})")]
    DegenerateScaling(f64),

    #[error("scaled data outside [-1, 1]: found {0}")]
    Scaling(f64),

    #[error("dictionary would have {requested} columns, above the cap of {cap}")]
    Capacity { requested: u128, cap: u128 },

    #[error("zero column in dictionary: {0}")]
    DegenerateColumn(String),

    #[error("column index mismatch between stacked parts")]
    ColumnMismatch,

    #[error("missing metadata: {0}")]
    MissingMetadata(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("rank-deficient support; {}", list_columns(.0))]
    RankDeficient(Vec<String>),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("hypothesis of the coherence bound violated: {0}")]
    Hypothesis(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Tags an error with the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// At most eight names, then a count of the rest.
fn list_columns(cols: &[String]) -> String {
    const SHOWN: usize = 8;
    let head = cols.iter().take(SHOWN).map(String::as_str).collect::<Vec<_>>().join(", ");
    if cols.len() > SHOWN {
        format!("{} dependent columns: {head}, …", cols.len())
    } else {
        format!("dependent columns: {head}")
    }
}
