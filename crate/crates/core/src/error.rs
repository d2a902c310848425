use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid semigroup presentation: {0}")]
    InvalidPresentation(String),

    #[error("multidegree {bottom:?} is not below {top:?} in the semigroup order")]
    NotComparable { bottom: Vec<u32>, top: Vec<u32> },

    #[error("malformed term order: {0}")]
    InvalidTermOrder(String),

    #[error("invalid Groebner basis: {0}")]
    InvalidBasis(String),

    #[error("Buchberger completion exceeded degree ceiling {ceiling}")]
    DegreeExplosion { ceiling: u32 },

    #[error("facet order violates the crossing condition at facet {facet:?}: skipped ranks {ranks:?}")]
    CrossingViolation { facet: Vec<usize>, ranks: Vec<usize> },

    #[error("matching is not acyclic: {0}")]
    AcyclicityFailure(String),

    #[error("gradient path enumeration exceeded the cap of {cap} paths")]
    PathCapExceeded { cap: usize },

    #[error("unsaturated critical cell left unmatched: {0}")]
    UnmatchedUnsaturatedCell(String),

    #[error("critical cell below the vanishing bound survived: {0}")]
    ResidualLowCell(String),

    #[error("cancellation certificate failed: {0}")]
    CertificationFailure(String),

    #[error("automaton construction exceeded the state budget of {budget}")]
    StateBudgetExceeded { budget: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
