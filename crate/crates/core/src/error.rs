use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("operands live in different rings")]
    MixedRings,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("d∘d ≠ 0 at degree {0}")]
    NotAComplex(i64),

    #[error("map is not surjective")]
    NotSurjective,

    #[error("map is not well defined: {0}")]
    NotWellDefined(String),

    #[error("module is not torsion")]
    NotTorsion,

    #[error("complex is not torsion: {0}")]
    ComplexNotTorsion(String),

    #[error("ideal is not invertible")]
    NotInvertible,

    #[error("generator not found within {0} attempts")]
    GeneratorNotFound(usize),

    #[error("pd witness not found: {0}")]
    PdWitnessNotFound(String),

    #[error("precision exhausted: effective precision {0:?} below floor {1:?}")]
    PrecisionExhausted((i64, i64), (u32, u32)),

    #[error("Euler factor undefined at this level: {0}")]
    EulerFactorUndefined(String),

    #[error("sequence is not exact: {0}")]
    NotExact(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported in this mode: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
