use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] multicmh::Error),
    #[error("cannot open `{path}`: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("write failed: {0}")]
    Write(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use multicmh::Error as E;
        match self {
            CliError::Input(e) => match e {
                E::MissingColumn(_) => "missing-column",
                E::NonNumeric { .. } => "non-numeric",
                E::NonFinite { .. } => "non-finite",
                E::Empty => "empty",
                E::NoConditioning => "no-conditioning",
                E::Shape(_) => "shape",
                E::NotBinary { .. } => "arity",
                E::Config(_) | E::InvalidArgument(_) => "config",
                E::Csv(_) => "csv",
                E::Io(_) => "io",
                _ => "input",
            },
            CliError::Open { .. } => "io",
            CliError::Write(_) => "io",
            CliError::Invariant(_) => "invariant",
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit: i32,
            message: String,
        }
        serde_json::to_string(&Line {
            error: self.kind(),
            exit: self.exit_code(),
            message: self.to_string(),
        })
        .expect("plain struct serializes")
    }
}
