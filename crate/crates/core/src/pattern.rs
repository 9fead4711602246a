//! Layout fingerprints of a modulus and the bundle of curves through the
//! parabola vertices.
//!
//! The vertex ordinates of a family, taken as a set, are
//! `β′·m/b² + k·m/b′` with `β′ = β mod cb`. Since `β ≡ −a²·m (mod cb)`, two
//! moduli congruent modulo `Λ = 2·lcm(2..n)` share every `β′` with
//! `cb | Λ`, and with `s ≡ m (mod Λ)` each normalized vertex satisfies
//! `Y ≡ 2nX − sX² (mod 1)` for some integer `n`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::Serialize;

use crate::predictor::fraction_params;
use crate::residue::{farey_fractions, mul_mod, reduce, ExactRational, Modulus, ReducedFraction};
use crate::{Error, Result};

fn check_lambda(lambda: u128) -> Result<()> {
    if lambda < 4 || lambda % 2 != 0 {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

/// Denominators `b ≤ max_b` with `b | Λ` (odd `b`) or `2b | Λ` (even `b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenominatorSet {
    pub lambda: u128,
    pub members: BTreeSet<u64>,
}

impl DenominatorSet {
    pub fn contains(&self, b: u64) -> bool {
        self.members.contains(&b)
    }
}

/// True iff `cb` divides `Λ`.
pub fn admits(lambda: u128, b: u64) -> bool {
    let cb = if b % 2 == 0 { 2 * b as u128 } else { b as u128 };
    lambda % cb == 0
}

pub fn denominator_set(lambda: u128, max_b: u64) -> Result<DenominatorSet> {
    check_lambda(lambda)?;
    let members = (1..=max_b).filter(|&b| admits(lambda, b)).collect();
    Ok(DenominatorSet { lambda, members })
}

/// `β′ = β mod cb` for every reduced `a/b` with `b ≤ max_denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSignature {
    pub m: u64,
    pub max_denominator: u64,
    pub entries: BTreeMap<ReducedFraction, u64>,
}

pub fn beta_signature(m: Modulus, max_denominator: u64) -> Result<BetaSignature> {
    let entries = farey_fractions(max_denominator)?
        .into_iter()
        .map(|frac| {
            let p = fraction_params(m, frac)?;
            let cb = p.c * frac.denom();
            Ok((frac, p.beta % cb))
        })
        .collect::<Result<_>>()?;
    Ok(BetaSignature { m: m.get(), max_denominator, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Simplest fraction (smallest denominator, then numerator) whose `β′`
    /// differs between the two moduli.
    pub witness: Option<ReducedFraction>,
}

/// Compares the `β′` fingerprints of two moduli over every denominator in
/// the set admitted by `lambda`.
pub fn layouts_equivalent(
    m1: Modulus,
    m2: Modulus,
    lambda: u128,
    max_denominator: u64,
) -> Result<Equivalence> {
    let dens = denominator_set(lambda, max_denominator)?;
    let s1 = beta_signature(m1, max_denominator)?;
    let s2 = beta_signature(m2, max_denominator)?;
    let witness = s1
        .entries
        .iter()
        .filter(|(f, _)| dens.contains(f.denom()))
        .filter(|(f, beta)| s2.entries.get(f) != Some(beta))
        .map(|(f, _)| *f)
        .min_by_key(|f| f.simplicity_key());
    Ok(Equivalence { equivalent: witness.is_none(), witness })
}

/// Balanced representative `s` of `m mod Λ`, `−Λ/2 < s ≤ Λ/2`.
pub fn bundle_parameter(m: Modulus, lambda: u128) -> Result<i128> {
    check_lambda(lambda)?;
    let lambda_i = i128::try_from(lambda).map_err(|_| Error::Overflow("bundle_parameter"))?;
    let r = (m.get() as i128).rem_euclid(lambda_i);
    Ok(if 2 * r > lambda_i { r - lambda_i } else { r })
}

/// A curve `Y ≡ 2nX − sX² (mod 1)` of the bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BundleLine {
    pub s: i128,
    pub n: i64,
}

impl BundleLine {
    /// `(2nX − sX²) mod 1`.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let two_n = ExactRational::from_integer(2 * self.n as i128);
        let s = ExactRational::from_integer(self.s);
        (&two_n * x - &(&s * &(x * x))).fract_floor()
    }

    /// Exact membership of `(x, y)` modulo 1.
    pub fn contains(&self, x: &ExactRational, y: &ExactRational) -> bool {
        (y - &self.eval(x)).is_integer()
    }
}

/// A normalized vertex `(a/b, β′/b² + k/b′ mod 1)` and the line through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleVertex {
    pub frac: ReducedFraction,
    pub k: u64,
    pub n: i64,
    pub x: ExactRational,
    pub y: ExactRational,
}

/// Normalized vertex ordinates `β′/b² + k/b′ mod 1`, indexed by `k ∈ Z_b′`.
pub fn normalized_vertices(m: Modulus, frac: ReducedFraction) -> Result<Vec<(u64, ExactRational)>> {
    let p = fraction_params(m, frac)?;
    let b = frac.denom();
    let beta_prime = p.beta % (p.c * b);
    let base = ExactRational::new(beta_prime, b * b)?;
    (0..p.b_prime)
        .map(|k| {
            let y = (&base + &ExactRational::new(k, p.b_prime)?).fract_floor();
            Ok((k, y))
        })
        .collect()
}

/// Solves `Y_v + s·X_v² − 2n·X_v ∈ Z` for every vertex of `frac`, with an
/// explicit class representative `s ≡ m (mod Λ)`.
pub fn bundle_vertices_with(
    m: Modulus,
    lambda: u128,
    s: i128,
    frac: ReducedFraction,
) -> Result<Vec<BundleVertex>> {
    check_lambda(lambda)?;
    let lambda_i = i128::try_from(lambda).map_err(|_| Error::Overflow("bundle_vertices"))?;
    if (m.get() as i128 - s).rem_euclid(lambda_i) != 0 {
        return Err(Error::InvalidArgument(format!("s = {s} is not congruent to m = {m} mod {lambda}")));
    }
    let (a, b) = (frac.numer(), frac.denom());
    if !admits(lambda, b) {
        return Err(Error::NotInDenominatorSet { b, lambda });
    }
    let x = ExactRational::new(a, b)?;
    let c = frac.parity_factor() as i128;
    let bp = frac.half_denom() as i128;
    let b2 = (b * b) as i128;
    let p = fraction_params(m, frac)?;
    let beta_prime = (p.beta % (p.c * b)) as i128;
    // Multiplying the membership condition by b² turns it into
    //   2ab·n ≡ β′ + k·cb + s·a² (mod b²),
    // solvable because gcd(2ab, b²) = cb divides β′ + s·a² when b is admitted.
    let lhs = 2 * a as i128 * b as i128;
    let g = lhs.gcd(&b2);
    let period = b2 / g;
    let b2u = b * b;
    let s_a2 = mul_mod(reduce(s, b2u), mul_mod(a % b2u, a % b2u, b2u), b2u) as i128;

    normalized_vertices(m, frac)?
        .into_iter()
        .map(|(k, y)| {
            let rhs = (beta_prime + k as i128 * c * b as i128 + s_a2).rem_euclid(b2);
            if rhs % g != 0 {
                return Err(Error::NotInDenominatorSet { b, lambda });
            }
            let n0 = if period == 1 {
                0
            } else {
                let inv = mod_inverse((lhs / g).rem_euclid(period), period)
                    .expect("reduced coefficient is a unit");
                ((rhs / g) % period * inv).rem_euclid(period)
            };
            // smallest |n|, ties toward positive
            let n = if 2 * n0 > period { n0 - period } else { n0 };
            debug_assert!(n.abs() <= bp);
            let line = BundleLine { s, n: n as i64 };
            if !line.contains(&x, &y) {
                return Err(Error::InvalidArgument(format!(
                    "vertex ({x}, {y}) of {frac} failed exact bundle membership"
                )));
            }
            Ok(BundleVertex { frac, k, n: n as i64, x: x.clone(), y })
        })
        .collect()
}

/// Bundle line indices for the vertices of `frac`, using the balanced `s`.
pub fn vertex_on_bundle(
    m: Modulus,
    lambda: u128,
    frac: ReducedFraction,
) -> Result<Vec<BundleVertex>> {
    let s = bundle_parameter(m, lambda)?;
    bundle_vertices_with(m, lambda, s, frac)
}

fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let e = a.extended_gcd(&n);
    (e.gcd == 1).then(|| e.x.rem_euclid(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn f(a: u64, b: u64) -> ReducedFraction {
        ReducedFraction::new(a, b).unwrap()
    }

    #[test]
    fn denominator_set_examples() {
        let set = |l, d| denominator_set(l, d).unwrap().members.into_iter().collect::<Vec<_>>();
        assert_eq!(set(5040, 9), (1..=9).collect::<Vec<_>>());
        let wide = set(5040, 18);
        for b in [10, 12, 14, 15, 18] {
            assert!(wide.contains(&b), "{b}");
        }
        // 2·16 = 32 does not divide 5040 = 2⁴·3²·5·7
        for b in [11, 13, 16, 17] {
            assert!(!wide.contains(&b), "{b}");
        }
        assert_eq!(set(4, 2), vec![1, 2]);
        assert!(denominator_set(5041, 9).is_err());
        assert!(denominator_set(2, 9).is_err());
    }

    #[test]
    fn signature_examples() {
        let sig = beta_signature(m(20179), 3).unwrap();
        assert_eq!(sig.entries[&f(1, 3)], 2);
        assert_eq!(sig.entries[&f(0, 1)], 0);
        assert_eq!(sig.entries.len(), 5);
        assert!(beta_signature(m(9), 3).is_err());
    }

    #[test]
    fn shifting_by_cb_keeps_entry() {
        for b in 1..=9u64 {
            let cb = if b % 2 == 0 { 2 * b } else { b };
            let s1 = beta_signature(m(20179), b).unwrap();
            let s2 = beta_signature(m(20179 + 7 * cb), b).unwrap();
            for a in 0..=b {
                if let Ok(fr) = ReducedFraction::new(a, b) {
                    assert_eq!(s1.entries[&fr], s2.entries[&fr]);
                }
            }
        }
    }

    #[test]
    fn congruent_pair_mod_5040() {
        let eq = layouts_equivalent(m(20179), m(25219), 5040, 18).unwrap();
        assert!(eq.equivalent);
        assert_eq!(eq.witness, None);
        let neq = layouts_equivalent(m(20179), m(20180), 5040, 9).unwrap();
        assert!(!neq.equivalent);
        assert_eq!(neq.witness, Some(f(1, 2)));
        assert!(layouts_equivalent(m(777), m(777), 24, 5).unwrap().equivalent);
    }

    #[test]
    fn bundle_parameter_examples() {
        assert_eq!(bundle_parameter(m(20179), 5040).unwrap(), 19);
        assert_eq!(bundle_parameter(m(25219), 5040).unwrap(), 19);
        assert_eq!(bundle_parameter(m(25200), 5040).unwrap(), 0);
        assert_eq!(bundle_parameter(m(5040 + 2520), 5040).unwrap(), 2520);
        assert_eq!(bundle_parameter(m(5040 + 2521), 5040).unwrap(), -2519);
    }

    #[test]
    fn zero_fraction_vertex() {
        let v = vertex_on_bundle(m(20179), 5040, f(0, 1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].k, v[0].n), (0, 0));
    }

    #[test]
    fn one_third_with_zero_s() {
        // s = 0, β′ = 0: 2n ≡ k (mod 3); k = 1 gives n ≡ 2, smallest |n| = −1.
        let v = vertex_on_bundle(m(25200), 5040, f(1, 3)).unwrap();
        let k1 = v.iter().find(|v| v.k == 1).unwrap();
        assert_eq!(k1.n, -1);
    }

    #[test]
    fn one_third_of_20179() {
        let v = vertex_on_bundle(m(20179), 5040, f(1, 3)).unwrap();
        assert_eq!(v.len(), 3);
        for vert in &v {
            assert!(BundleLine { s: 19, n: vert.n }.contains(&vert.x, &vert.y));
        }
    }

    #[test]
    fn rejects_denominator_outside_set() {
        let err = vertex_on_bundle(m(20179), 5040, f(1, 11)).unwrap_err();
        assert!(matches!(err, Error::NotInDenominatorSet { b: 11, .. }));
    }

    #[test]
    fn rejects_wrong_representative() {
        assert!(bundle_vertices_with(m(20179), 5040, 20, f(1, 3)).is_err());
        assert!(bundle_vertices_with(m(20179), 5040, 19 + 5040, f(1, 3)).is_ok());
    }
}
