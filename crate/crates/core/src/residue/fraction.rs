use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::{Error, Result};

/// A fraction `a/b` in lowest terms with `0 ≤ a/b ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ReducedFraction {
    a: u64,
    b: u64,
}

impl ReducedFraction {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidFraction { a, b, reason: "zero denominator" });
        }
        if a > b {
            return Err(Error::InvalidFraction { a, b, reason: "fraction exceeds 1" });
        }
        if a.gcd(&b) != 1 {
            return Err(Error::InvalidFraction { a, b, reason: "not in lowest terms" });
        }
        Ok(Self { a, b })
    }

    pub const ZERO: Self = Self { a: 0, b: 1 };
    pub const ONE: Self = Self { a: 1, b: 1 };

    pub fn numer(self) -> u64 {
        self.a
    }

    pub fn denom(self) -> u64 {
        self.b
    }

    /// `b′`: `b` for odd `b`, `b/2` for even `b`.
    pub fn half_denom(self) -> u64 {
        if self.b % 2 == 0 {
            self.b / 2
        } else {
            self.b
        }
    }

    /// `c = b / b′`, 1 for odd denominators and 2 for even ones.
    pub fn parity_factor(self) -> u64 {
        if self.b % 2 == 0 {
            2
        } else {
            1
        }
    }

    /// Ordering used when reporting: denominator first, then numerator.
    pub fn simplicity_key(self) -> (u64, u64) {
        (self.b, self.a)
    }
}

impl Ord for ReducedFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.a as u128 * other.b as u128;
        let rhs = other.a as u128 * self.b as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for ReducedFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

impl FromStr for ReducedFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::FractionSyntax(s.to_string()))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::FractionSyntax(s.to_string()))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}
