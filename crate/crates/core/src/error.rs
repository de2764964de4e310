use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field of size {p}^{n} exceeds the supported table size")]
    FieldTooLarge { p: u32, n: u32 },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("ring mismatch")]
    RingMismatch,
    #[error("operation needs an Artinian ring")]
    NotArtinian,
    #[error("target module is not unit")]
    NotUnit,
    #[error("module is not torsion")]
    NotTorsion,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("map is not structure-preserving: {0}")]
    NotEquivariant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
