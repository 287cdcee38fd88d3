use thiserror::Error;

/// Failure modes shared by every layer of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ZERO_LEADING: series is zero to its known precision")]
    ZeroLeading,
    #[error("INSUFFICIENT_PRECISION: {what} (need precision {needed})")]
    InsufficientPrecision { what: String, needed: i64 },
    #[error("NONSPLIT_FIELD: {0}")]
    NonsplitField(String),
    #[error("EMPTY_COMPOSITION: a lattice chain needs at least one nonzero block")]
    EmptyComposition,
    #[error("NOT_IN_FILTRATION: element lies in P^{actual}, not P^{wanted}")]
    NotInFiltration { wanted: i64, actual: i64 },
    #[error("IRREDUCIBLE: characteristic polynomial has a single root, no coprime split")]
    Irreducible,
    #[error("NOT_REGULAR: {0}")]
    NotRegular(String),
    #[error("GCD_VIOLATION: gcd(r, e) = {0} must be 1")]
    GcdViolation(i64),
    #[error("SINGULAR_GAUGE: gauge matrix is not invertible to the known precision")]
    SingularGauge,
    #[error("NOT_SPLIT: {0}")]
    NotSplit(String),
    #[error("SHAPE_MISMATCH: {0}")]
    ShapeMismatch(String),
    #[error("RESIDUE_NONZERO: residues sum to {0}")]
    ResidueNonzero(String),
    #[error("DUPLICATE_POINTS: point {0} appears twice")]
    DuplicatePoints(String),
    #[error("UNSUPPORTED_DEPTH: {0}")]
    UnsupportedDepth(String),
    #[error("PARSE: {0}")]
    Parse(String),
    #[error("INVALID_INPUT: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn precision(what: impl Into<String>, needed: i64) -> Self {
        Error::InsufficientPrecision {
            what: what.into(),
            needed,
        }
    }

    /// Stable upper-case code used in reports and by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroLeading => "ZERO_LEADING",
            Error::InsufficientPrecision { .. } => "INSUFFICIENT_PRECISION",
            Error::NonsplitField(_) => "NONSPLIT_FIELD",
            Error::EmptyComposition => "EMPTY_COMPOSITION",
            Error::NotInFiltration { .. } => "NOT_IN_FILTRATION",
            Error::Irreducible => "IRREDUCIBLE",
            Error::NotRegular(_) => "NOT_REGULAR",
            Error::GcdViolation(_) => "GCD_VIOLATION",
            Error::SingularGauge => "SINGULAR_GAUGE",
            Error::NotSplit(_) => "NOT_SPLIT",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::ResidueNonzero(_) => "RESIDUE_NONZERO",
            Error::DuplicatePoints(_) => "DUPLICATE_POINTS",
            Error::UnsupportedDepth(_) => "UNSUPPORTED_DEPTH",
            Error::Parse(_) => "PARSE",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
