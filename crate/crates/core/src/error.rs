use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line number in the source file (header is line 1).
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{} rejected row(s):\n{}", .0.len(), join_rows(.0))]
    Rows(Vec<RowError>),

    #[error("unknown team(s): {}", .0.join(", "))]
    UnknownTeams(Vec<String>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("bracket structure: {0}")]
    Structure(String),

    #[error("bracket results inconsistent: {0}")]
    Consistency(String),

    #[error("schedule graph is disconnected; component not linked to the rest: {}", .0.join(", "))]
    Disconnected(Vec<String>),

    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(|r| format!("  {r}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
