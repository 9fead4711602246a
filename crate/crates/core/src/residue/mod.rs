//! Exact integer and rational primitives.
//!
//! Nothing in here touches floating point. Products of two residues are
//! formed in `u128`, so every operation is exact for any `u64` modulus.

mod fraction;
mod rational;

use std::fmt;

use num_integer::Integer;

pub use fraction::ReducedFraction;
pub use rational::{q_congruent, ExactRational};

use crate::{Error, Result};

/// Plot modulus, `m ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::ModulusTooSmall(m));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(m: u64) -> Result<Self> {
        Self::new(m)
    }
}

/// `v mod n` in `[0, n)` for any signed `v`.
pub(crate) fn reduce(v: i128, n: u64) -> u64 {
    v.rem_euclid(n as i128) as u64
}

/// `a·b mod n` for `a, b < n`.
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

/// The quadratic residue `x² mod m`.
pub fn qr_mod(x: i128, m: Modulus) -> u64 {
    let r = reduce(x, m.0);
    mul_mod(r, r, m.0)
}

/// Balanced residue of `v` modulo `n`: the `r ≡ v (mod n)` with
/// `−n/2 ≤ r < n/2`.
///
/// At the even-`n` tie the result is `−n/2`, so that `(a·m − α)/b` equals
/// `⌊a·m/b + 1/2⌋` when `α` is the balanced residue of `a·m` mod `b`.
pub fn balanced_residue(v: i128, n: u64) -> Result<i128> {
    if n == 0 {
        return Err(Error::InvalidArgument("balanced residue modulo zero".into()));
    }
    let r = reduce(v, n) as i128;
    let n = n as i128;
    Ok(if 2 * r >= n { r - n } else { r })
}

/// All reduced fractions in `[0, 1]` with denominator at most
/// `max_denominator`, in increasing order (the Farey sequence).
pub fn farey_fractions(max_denominator: u64) -> Result<Vec<ReducedFraction>> {
    if max_denominator == 0 {
        return Err(Error::InvalidArgument("max denominator must be positive".into()));
    }
    let n = max_denominator;
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    let mut out = vec![ReducedFraction::ZERO];
    while c <= n {
        let k = (n + b) / d;
        let next = (c, d, k * c - a, k * d - b);
        (a, b, c, d) = next;
        out.push(ReducedFraction::new(a, b)?);
    }
    Ok(out)
}

/// `Λ(n) = 2·lcm(2, 3, …, n)`.
pub fn lambda_value(n: u32) -> Result<u128> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Λ(n) needs n ≥ 2, got {n}")));
    }
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        let g = acc.gcd(&k);
        acc = acc
            .checked_mul(k / g)
            .ok_or(Error::Overflow("lambda_value"))?;
    }
    acc.checked_mul(2).ok_or(Error::Overflow("lambda_value"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_guard() {
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(2).is_ok());
    }

    #[test]
    fn qr_examples() {
        let m = Modulus::new(20171).unwrap();
        assert_eq!(qr_mod(0, m), 0);
        // 6724² = 45212176 = 2241·20171 + 8965
        assert_eq!(6724u64 * 6724, 45_212_176);
        assert_eq!(45_212_176 % 20171, 8965);
        assert_eq!(qr_mod(6724, m), 8965);
        assert_eq!(qr_mod(-6724, m), 8965);
    }

    #[test]
    fn qr_near_u64_max_is_exact() {
        let m = Modulus::new(u64::MAX - 58).unwrap();
        let x = (m.get() - 1) as i128;
        // (m − 1)² ≡ 1
        assert_eq!(qr_mod(x, m), 1);
        let big = Modulus::new(1 << 62).unwrap();
        assert_eq!(qr_mod(1 << 31, big), 0);
        assert_eq!(qr_mod((1 << 31) + 1, big), (1 << 32) + 1);
    }

    #[test]
    fn balanced_examples() {
        assert_eq!(balanced_residue(0, 9).unwrap(), 0);
        assert_eq!(balanced_residue(20171, 3).unwrap(), -1);
        assert_eq!(balanced_residue(2, 4).unwrap(), -2);
        assert_eq!(balanced_residue(1, 2).unwrap(), -1);
        assert_eq!(balanced_residue(-7, 1).unwrap(), 0);
        assert!(balanced_residue(5, 0).is_err());
    }

    #[test]
    fn farey_examples() {
        let show = |d| {
            farey_fractions(d)
                .unwrap()
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(show(1), ["0/1", "1/1"]);
        assert_eq!(show(3), ["0/1", "1/3", "1/2", "2/3", "1/1"]);
        assert_eq!(farey_fractions(5).unwrap().len(), 11);
        assert!(farey_fractions(0).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_value(2).unwrap(), 4);
        assert_eq!(lambda_value(4).unwrap(), 24);
        assert_eq!(lambda_value(9).unwrap(), 5040);
        assert_eq!(lambda_value(9).unwrap(), 16 * 9 * 5 * 7);
        assert!(lambda_value(1).is_err());
        assert!(lambda_value(200).is_err());
    }
}
