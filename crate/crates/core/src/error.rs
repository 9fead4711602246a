use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),

    #[error("invalid fraction {a}/{b}: {reason}")]
    InvalidFraction { a: u64, b: u64, reason: &'static str },

    #[error("cannot parse fraction {0:?}, expected a/b")]
    FractionSyntax(String),

    #[error("modulus {m} must exceed the squared denominator {b}² = {}", (*b as u128) * (*b as u128))]
    ModulusNotAboveDenominatorSquare { m: u64, b: u64 },

    #[error("window {window} must be smaller than half the modulus {m}")]
    WindowTooLarge { window: u64, m: u64 },

    #[error("lattice point x = {x} lies outside [0, {m})")]
    OutOfRange { x: i128, m: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Λ must be an even integer ≥ 4, got {0}")]
    InvalidLambda(u128),

    #[error("denominator {b} is not in the set admitted by Λ = {lambda}")]
    NotInDenominatorSet { b: u64, lambda: u128 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("malformed PGM data: {0}")]
    Pgm(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
