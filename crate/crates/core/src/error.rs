use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("docking infeasible: {0}")]
    DockingInfeasible(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("training error on record {record}: {msg}")]
    Training { record: String, msg: String },

    #[error("training diverged at step {step}: loss {loss:.4e} vs initial {initial:.4e}")]
    Diverged { step: usize, loss: f64, initial: f64 },

    #[error("report error: unmatched case ids {orphans:?}")]
    Report { orphans: Vec<String> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined enrichment factor: {0}")]
    UndefinedEnrichment(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
