use bsa_core::arcs::ArcError;
use bsa_core::cad::CadError;
use bsa_core::catalog::{BetaError, TableError};
use bsa_core::formula::ParseError;
use bsa_core::zeta::{ResolutionError, ZetaError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Unsupported(_) => 4,
            CliError::Invariant(_) => 5,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Parse { .. } | TableError::Io(_) => {
                CliError::Parse(format!("class table: {e}"))
            }
            _ => CliError::Validation(format!("class table: {e}")),
        }
    }
}

impl From<ResolutionError> for CliError {
    fn from(e: ResolutionError) -> Self {
        match e {
            ResolutionError::Invalid(problems) => {
                CliError::Validation(format!("invalid resolution:\n  {}", problems.join("\n  ")))
            }
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<BetaError> for CliError {
    fn from(e: BetaError) -> Self {
        let lines: Vec<String> = e.0.iter().map(|u| u.to_string()).collect();
        CliError::Unsupported(format!(
            "extend the class table with:\n  {}",
            lines.join("\n  ")
        ))
    }
}

impl From<CadError> for CliError {
    fn from(e: CadError) -> Self {
        match e {
            CadError::CapExceeded { .. } => CliError::Unsupported(e.to_string()),
            CadError::UnknownVariable(_) | CadError::BadOrder { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        match e {
            ZetaError::Resolution(r) => r.into(),
            ZetaError::Cad(c) => c.into(),
            ZetaError::Unsupported(_) => CliError::Unsupported(e.to_string()),
            ZetaError::NotIntegral(_) => CliError::Invariant(e.to_string()),
            ZetaError::MissingCover(..) | ZetaError::NoFunction => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<ArcError> for CliError {
    fn from(e: ArcError) -> Self {
        match e {
            ArcError::Zeta(z) => z.into(),
            ArcError::Unsupported { .. } => CliError::Unsupported(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
