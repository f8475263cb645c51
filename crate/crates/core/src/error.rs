use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bit width {0} is outside 1..=64")]
    WidthOutOfRange(usize),

    #[error("value {value:#x} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("domain too large: {0}")]
    DomainTooLarge(String),

    #[error("branch-number search cap reached; value lies in [{lower}, {upper}]")]
    SearchCapReached { lower: usize, upper: usize },

    #[error("S-box is not injective: inputs {0:#x} and {1:#x} collide")]
    NotInjective(u64, u64),

    #[error("S-box does not map 0 to 0 (0 -> {0:#x})")]
    NotNormalized(u64),

    #[error("linear layer is not surjective: rank {rank} < {cols}")]
    NotSurjective { rank: usize, cols: usize },

    #[error("wave function is not bijective")]
    NotBijective,

    #[error("group action is not transitive (orbit of 0 has {orbit} of {domain} points)")]
    NotTransitive { orbit: u64, domain: u64 },

    #[error("generating function is affine; the reduction hypothesis does not hold")]
    AffineRho,

    #[error("linear bound needs a multiple of three rounds, got {0}")]
    RoundsNotMultipleOfThree(usize),

    #[error("bound is not a power of two: {0}")]
    NonDyadic(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
