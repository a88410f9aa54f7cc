use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or analysis parameter is out of range. `field` names the
    /// offending parameter.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: String, reason: String },

    #[error("agent index {index} out of range for {n_agents} agents")]
    Index { index: usize, n_agents: usize },

    /// The data cannot support the requested computation.
    #[error("data error: {0}")]
    Data(String),

    #[error("design matrix is rank deficient; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("solution {solution}: {source}")]
    Solution {
        solution: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parameter(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by invalid user input (as opposed to data
    /// problems or I/O failures).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parameter { .. } | Error::Index { .. } => true,
            Error::Solution { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    pub fn is_data(&self) -> bool {
        match self {
            Error::Data(_) | Error::RankDeficient { .. } | Error::Csv { .. } => true,
            Error::Solution { source, .. } => source.is_data(),
            _ => false,
        }
    }
}
