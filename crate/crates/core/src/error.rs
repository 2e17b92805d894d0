use thiserror::Error;

/// Errors raised across the crate.
///
/// `TheoremViolation` is special: it signals that a computed object
/// contradicts an identity that must hold, and callers (the CLI in
/// particular) treat it as a mathematical counterexample rather than bad
/// input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 2 and below 2^31")]
    InvalidModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial {0:?} is not a monic irreducible polynomial of the requested degree")]
    Reducible(Vec<u64>),
    #[error("mu_{n} is not contained in F_{q}: {n} does not divide {q} - 1")]
    RootsOfUnityAbsent { n: u64, q: u64 },
    #[error("field of order {0} exceeds the supported size")]
    FieldTooLarge(u64),
    #[error("zero has no discrete logarithm")]
    ZeroElement,
    #[error("{0} is not an element of the field")]
    NotAnElement(u64),
    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: u64, modulus: u64 },
    #[error("F_{sub} does not embed in F_{ext}")]
    NotEmbeddable { sub: u64, ext: u64 },
    #[error("incompatible roots of unity: {0}")]
    IncompatibleOmega(String),
    #[error("objects live over different fields")]
    FieldMismatch,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("group of order {order} exceeds the limit {limit}")]
    GroupTooLarge { order: usize, limit: usize },
    #[error("not a 2-cocycle: identity fails at ({0}, {1}, {2})")]
    NotCocycle(usize, usize, usize),
    #[error("quotient is not elementary abelian of exponent {0}")]
    NotElementary(u64),
    #[error("extension is not central: {0}")]
    NonCentral(String),
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
