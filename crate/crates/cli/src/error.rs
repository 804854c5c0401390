use iwasawa2::cache::CacheError;
use iwasawa2::cm::CmError;
use iwasawa2::elliptic::EllipticError;
use iwasawa2::formalgroup::FormalGroupError;
use iwasawa2::iwasawa::IwasawaError;
use iwasawa2::nf::NfError;
use iwasawa2::padic::RegulatorError;
use iwasawa2::pipeline::PipelineError;
use iwasawa2::units::UnitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Precision(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Precondition(_) => "precondition",
            CliError::Precision(_) => "precision",
            CliError::Mismatch(_) => "mismatch",
        }
    }
}

fn precondition(e: impl ToString) -> CliError {
    CliError::Precondition(e.to_string())
}

fn precision(e: impl ToString) -> CliError {
    CliError::Precision(e.to_string())
}

impl From<CmError> for CliError {
    fn from(e: CmError) -> Self {
        match e {
            CmError::TauTooLow(_) | CmError::InsufficientPrecision { .. } => precision(e),
            _ => precondition(e),
        }
    }
}

impl From<NfError> for CliError {
    fn from(e: NfError) -> Self {
        match e {
            NfError::Cm(c) => c.into(),
            _ => precondition(e),
        }
    }
}

impl From<UnitError> for CliError {
    fn from(e: UnitError) -> Self {
        match e {
            UnitError::EffortExhausted { .. } | UnitError::NoCertificate(_) => precision(e),
            UnitError::Field(f) => f.into(),
            _ => precondition(e),
        }
    }
}

impl From<RegulatorError> for CliError {
    fn from(e: RegulatorError) -> Self {
        match e {
            RegulatorError::Precision(_) => precision(e),
            RegulatorError::Field(f) => f.into(),
            _ => precondition(e),
        }
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Cm(c) => c.into(),
            _ => precondition(e),
        }
    }
}

impl From<IwasawaError> for CliError {
    fn from(e: IwasawaError) -> Self {
        match e {
            IwasawaError::Uncertified | IwasawaError::Interpolation { .. } | IwasawaError::TooShort { .. } => precision(e),
            _ => precondition(e),
        }
    }
}

impl From<EllipticError> for CliError {
    fn from(e: EllipticError) -> Self {
        match e {
            EllipticError::Extrapolation(_) => CliError::Mismatch(e.to_string()),
            EllipticError::NearLatticePoint(_) | EllipticError::Recognition(_) => precision(e),
            EllipticError::Cm(c) => c.into(),
            _ => precondition(e),
        }
    }
}

impl From<FormalGroupError> for CliError {
    fn from(e: FormalGroupError) -> Self {
        match e {
            FormalGroupError::Precision { .. } | FormalGroupError::DegreeTooSmall(_) => precision(e),
            FormalGroupError::NonIntegral { .. } | FormalGroupError::NonIntegralLaw { .. } | FormalGroupError::Congruence { .. } => {
                CliError::Mismatch(e.to_string())
            }
            FormalGroupError::Elliptic(x) => x.into(),
            _ => precondition(e),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Cm(x) => x.into(),
            PipelineError::Cache(x) => x.into(),
            PipelineError::Field(x) => x.into(),
            PipelineError::Units(x) => x.into(),
            PipelineError::Regulator(x) => x.into(),
            PipelineError::EvenIndex { .. } | PipelineError::NegativeIndex(_) => CliError::Mismatch(e.to_string()),
            _ => precondition(e),
        }
    }
}
