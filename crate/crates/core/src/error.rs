use num_bigint::BigInt;
use thiserror::Error;

use crate::Exponent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("leading coefficient {leading} is not a unit")]
    NonUnitLeading { leading: BigInt },

    #[error("coefficient at q^({requested}) requested but the series is only known below q^({available})")]
    PrecisionExceeded { requested: Exponent, available: Exponent },

    #[error("series vanishes up to its precision q^({prec})")]
    ZeroUpToPrecision { prec: Exponent },

    #[error("operation needs an integer q-grid, found q^(1/{grid})")]
    GridError { grid: i64 },

    #[error("invalid eta quotient: {0}")]
    InvalidQuotient(String),

    #[error("term {term} is not a modular function on {group}: {reason}")]
    NotModular { term: usize, group: String, reason: String },

    #[error("Gordon-Hughes bound preconditions fail: {0}")]
    CaseError(String),

    #[error("identity has no constant term to normalize against")]
    NormalizationRequired,

    #[error("t-polynomial reduction did not terminate within precision (degree reached {degree}, precision {prec})")]
    NonTerminating { degree: i64, prec: i64 },

    #[error("t-polynomial reduction left a nonzero residual at q^({exponent})")]
    ResidualNonzero { exponent: Exponent },

    #[error("initial identity {name} failed certification: {reason}")]
    CertificationFailed { name: String, reason: String },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("coefficient table holds {have} entries but index {need} is required")]
    TableTooSmall { need: u64, have: u64 },

    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}
