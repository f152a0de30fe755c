//! JSON ingestion of surface descriptions and a deterministic command
//! line over the bgeom engine. All rationals travel as `p/q` strings in
//! lowest terms; reports are emitted with sorted keys so identical input
//! bytes and flags always produce identical output bytes.

pub mod expr;
pub mod run;
pub mod surface_file;

/// Errors at the CLI boundary, split by exit code: usage and parse
/// problems exit 2, domain errors exit 1.
#[derive(Debug, Clone)]
pub enum CliError {
    /// Bad flags, missing arguments, unreadable expressions.
    Usage(String),
    /// Malformed JSON or schema violations, with location context.
    Parse(String),
    /// A validated request the engine rejects; carries the stable code.
    Domain { code: String, message: String },
}

impl CliError {
    pub fn domain(code: &str, message: impl Into<String>) -> Self {
        CliError::Domain {
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Domain { .. } => 1,
        }
    }

    pub fn code(&self) -> &str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Parse(_) => "ParseError",
            CliError::Domain { code, .. } => code,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Parse(m) => m.clone(),
            CliError::Domain { message, .. } => message.clone(),
        }
    }
}

impl From<bgeom::Error> for CliError {
    fn from(e: bgeom::Error) -> Self {
        CliError::Domain {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}
