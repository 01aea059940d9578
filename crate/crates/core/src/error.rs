use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exact division failed: {0}")]
    NotDivisible(String),
    #[error("{0} is not invertible in the localised ring")]
    NotInvertible(String),
    #[error("denominator vanishes at q = {0}")]
    PoleAtQ(String),
    #[error("precision exhausted: every represented coefficient is zero above floor {0}")]
    PrecisionExhausted(i64),
    #[error("{0} is not a special group")]
    NotSpecial(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("mass is not positive: {0}")]
    NonPositive(String),
    #[error("invalid curve data: {0}")]
    InvalidCurve(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has no {what}")]
    MissingSymbolData { symbol: String, what: &'static str },
    #[error("parse error at byte {offset}: expected one of {}", expected.join(", "))]
    Parse { offset: usize, expected: Vec<String> },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name, used in JSON error output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotDivisible(_) => "NotDivisible",
            Error::NotInvertible(_) => "NotInvertible",
            Error::PoleAtQ(_) => "PoleAtQ",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotSpecial(_) => "NotSpecial",
            Error::Unsupported(_) => "Unsupported",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::NonPositive(_) => "NonPositive",
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::InvalidField(_) => "InvalidField",
            Error::UnknownSymbol(_) => "UnknownSymbol",
            Error::MissingSymbolData { .. } => "MissingSymbolData",
            Error::Parse { .. } => "ParseError",
            Error::Manifest(_) => "ManifestError",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
