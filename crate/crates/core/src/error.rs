use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inversion of a series that vanishes on its whole precision window")]
    InversionOfZero,
    #[error("exact non-monomial scalar has no finite inverse; give a precision window")]
    UnboundedInverse,
    #[error("pole at substitution {target}: coefficient {coefficient}")]
    PoleAtSubstitution { target: String, coefficient: String },
    #[error("non-terminating product: base {0} has non-positive p-order")]
    NonterminatingProduct(String),
    #[error("product form cannot be expanded in {direction}: {reason}")]
    NotExpandable { direction: String, reason: String },
    #[error("derivative factors are not supported by this engine")]
    UnsupportedDerivative,
    #[error("pole of order {order} at line {line}; only simple poles are supported")]
    HigherOrderPole { line: String, order: i32 },
    #[error("exchange functions differ between terms of {a} and {b}")]
    NonScalarExchange { a: String, b: String },
    #[error("relation is inconsistent: g+^-1 g- does not match the exchange function ({0})")]
    SpecInconsistent(String),
    #[error("fusion recursion mismatch at n={n}, i={i}: residue {residue} vs recursion {recursion}")]
    RecursionMismatch { n: usize, i: usize, residue: String, recursion: String },
    #[error("unknown series {0}")]
    UnknownSeries(String),
    #[error("unknown field {0}")]
    UnknownField(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("Fock modules with nonzero zero-mode eigenvalue are not supported")]
    NonVacuumModule,
    #[error("evaluation hit a zero of a denominator factor at x = {0}")]
    PoleAtEvaluation(String),
    #[error("insufficient precision: window {got} below required {need}")]
    InsufficientPrecision { got: i32, need: i32 },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
