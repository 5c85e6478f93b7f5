use signdeg::boolfn::BoolFnError;
use signdeg::fourier::FourierError;
use signdeg::hardhs::HardError;
use signdeg::rapprox::RapproxError;
use signdeg::signrep::SignRepError;

/// Every failure maps onto one exit code: 2 usage, 3 size limit, 1 anything else.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("size limit: {0}")]
    Limit(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Limit(_) => 3,
            _ => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<BoolFnError> for CliError {
    fn from(e: BoolFnError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SignRepError> for CliError {
    fn from(e: SignRepError) -> Self {
        match e {
            SignRepError::DomainTooLarge { .. } => CliError::Limit(e.to_string()),
            SignRepError::NotCube | SignRepError::EmptyFamily => CliError::Usage(e.to_string()),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<RapproxError> for CliError {
    fn from(e: RapproxError) -> Self {
        match e {
            RapproxError::EpsilonOutOfRange | RapproxError::NonpositiveTolerance => CliError::Usage(e.to_string()),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<HardError> for CliError {
    fn from(e: HardError) -> Self {
        match e {
            HardError::TooLarge(_) => CliError::Limit(e.to_string()),
            HardError::Malformed(_) | HardError::DegreeExceedsCutoff { .. } => CliError::Usage(e.to_string()),
            HardError::Rapprox(r) => r.into(),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<FourierError> for CliError {
    fn from(e: FourierError) -> Self {
        match e {
            FourierError::TooLarge(_) => CliError::Limit(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
