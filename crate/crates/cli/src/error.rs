use std::fmt;

/// Exit status 2 for usage problems, 1 for everything that goes wrong
/// while running a well-formed command.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Orphans(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Orphans(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Orphans(ids) => {
                writeln!(f, "predictions and references do not match; unmatched ids:")?;
                for id in ids {
                    writeln!(f, "  {id}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<dockforge::Error> for CliError {
    fn from(e: dockforge::Error) -> Self {
        match e {
            dockforge::Error::Config(m) => CliError::Usage(m),
            dockforge::Error::Report { orphans } => CliError::Orphans(orphans),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain(format!("json error: {e}"))
    }
}
