//! Parabola families anchored at a fraction `a/b` of the modulus.
//!
//! With `x₀ = ⌊a·m/b + 1/2⌋` and `α` the balanced residue of `a·m` mod `b`,
//! the residues of the lattice `x = x₀ + i + j·b′` satisfy
//!
//! ```text
//! r ≡ b′²·j² + (2b′i − (2/c)·α)·j + r_i   (mod m)
//! ```
//!
//! one parabola per residue class `i` mod `b′`. All of them have their vertex
//! at `x = a·m/b`, and the vertex ordinates are `β·m/b² + a′·m/b′` where `a′`
//! runs over all of `Z_b′`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::residue::{
    add_mod, balanced_residue, mul_mod, qr_mod, reduce, ExactRational, Modulus, ReducedFraction,
};
use crate::{Error, Result};

/// Per-fraction quantities shared by a whole parabola family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FractionParams {
    pub m: u64,
    pub frac: ReducedFraction,
    pub b_prime: u64,
    pub c: u64,
    pub alpha: i64,
    /// Canonical representative in `[0, b²)`.
    pub beta: u64,
    pub x0: u64,
    pub r0: u64,
}

impl FractionParams {
    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.m).expect("params built from a valid modulus")
    }

    pub fn b_squared(&self) -> u64 {
        self.frac.denom() * self.frac.denom()
    }

    /// Canonical offsets `i`, one per residue class mod `b′`:
    /// `−⌈b′/2⌉ + 1 ..= ⌊b′/2⌋`.
    pub fn offsets(&self) -> std::ops::RangeInclusive<i64> {
        let bp = self.b_prime as i64;
        (-((bp + 1) / 2) + 1)..=(bp / 2)
    }
}

/// Computes `x₀`, `r₀`, `α`, `β`, `b′` and `c` for the anchor `a/b` of `m`.
///
/// Requires `m > b²`.
pub fn fraction_params(m: Modulus, frac: ReducedFraction) -> Result<FractionParams> {
    let (a, b) = (frac.numer(), frac.denom());
    let mv = m.get();
    if (b as u128) * (b as u128) >= mv as u128 {
        return Err(Error::ModulusNotAboveDenominatorSquare { m: mv, b });
    }
    let b2 = b * b;
    let am = a as i128 * mv as i128;
    let alpha = balanced_residue(am, b)?;
    let x0 = (am - alpha) / b as i128;
    debug_assert_eq!((am - alpha) % b as i128, 0);

    // β ≡ a²m − 2aα (mod b²)
    let a_red = a % b2;
    let a2m = mul_mod(mul_mod(a_red, a_red, b2), mv % b2, b2);
    let two_a_alpha = reduce(2 * a as i128 * alpha, b2);
    let beta = reduce(a2m as i128 - two_a_alpha as i128, b2);

    Ok(FractionParams {
        m: mv,
        frac,
        b_prime: frac.half_denom(),
        c: frac.parity_factor(),
        alpha: alpha as i64,
        beta,
        x0: x0 as u64,
        r0: qr_mod(x0, m),
    })
}

/// Checks `b²·r₀ = β·m + α²` exactly.
///
/// Given `0 ≤ β < b²` and `m > b²/4` this is the integer form of
/// `r₀ ≡ β·m/b² + α²/b² (mod m)`, and it implies `r₀` is the nearest integer
/// to `β·m/b²` because `α²/b² ≤ 1/4`.
pub fn verify_prop1(params: &FractionParams) -> bool {
    let b2 = params.b_squared() as u128;
    let m = params.m as u128;
    let alpha2 = (params.alpha as i128 * params.alpha as i128) as u128;
    let lhs = b2.checked_mul(params.r0 as u128);
    let rhs = (params.beta as u128)
        .checked_mul(m)
        .and_then(|v| v.checked_add(alpha2));
    matches!((lhs, rhs), (Some(l), Some(r)) if l == r)
}

/// One member `P_i(j) = A·j² + B·j + C (mod m)` of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parabola {
    pub params: FractionParams,
    pub i: i64,
    /// `A = b′²`.
    pub quad: u64,
    /// `B = 2b′i − (2/c)·α`.
    pub linear: i128,
    /// `C = r_i`, the residue of `(x₀ + i)²`.
    pub constant: u64,
    /// `a′ ≡ (2/c)·i·a (mod b′)`.
    pub a_prime: u64,
    /// Abscissa of the vertex, computed from the coefficients.
    pub vertex_x: ExactRational,
    /// Ordinate of the vertex reduced into `[0, m)`, computed from the coefficients.
    pub vertex_y: ExactRational,
}

impl Parabola {
    fn new(params: FractionParams, i: i64) -> Self {
        let bp = params.b_prime as i128;
        let two_over_c = (2 / params.c) as i128;
        let quad = params.b_prime * params.b_prime;
        let linear = 2 * bp * i as i128 - two_over_c * params.alpha as i128;
        let constant = qr_mod(params.x0 as i128 + i as i128, params.modulus());
        let a_prime = reduce(two_over_c * i as i128 * params.frac.numer() as i128, params.b_prime);

        // Vertex at j_v = −B/(2A): x_v = x₀ + i + j_v·b′, y_v = C − B²/(4A).
        let a_big = BigInt::from(quad);
        let b_big = BigInt::from(linear);
        let j_v = ExactRational::new(-b_big.clone(), BigInt::from(2) * &a_big)
            .expect("A > 0");
        let vertex_x = ExactRational::from_integer(params.x0 as i128 + i as i128)
            + &j_v * &ExactRational::from_integer(params.b_prime);
        let drop = ExactRational::new(&b_big * &b_big, BigInt::from(4) * &a_big).expect("A > 0");
        let vertex_y = (ExactRational::from_integer(constant) - drop).rem_modulus(params.m);

        Self { params, i, quad, linear, constant, a_prime, vertex_x, vertex_y }
    }

    /// Lattice abscissa `x₀ + i + j·b′`.
    pub fn abscissa(&self, j: i64) -> i128 {
        self.params.x0 as i128 + self.i as i128 + j as i128 * self.params.b_prime as i128
    }

    /// Index `j` of `x` on this member's lattice, if `x` belongs to it.
    pub fn lattice_index(&self, x: i128) -> Option<i64> {
        let off = x - self.params.x0 as i128 - self.i as i128;
        let bp = self.params.b_prime as i128;
        (off % bp == 0).then(|| (off / bp) as i64)
    }

    /// `A·j² + B·j + C mod m`, without range checks on `x`.
    pub fn residue_at(&self, j: i64) -> u64 {
        let m = self.params.m;
        let jm = reduce(j as i128, m);
        let quad = mul_mod(mul_mod(self.quad % m, jm, m), jm, m);
        let lin = mul_mod(reduce(self.linear, m), jm, m);
        add_mod(add_mod(quad, lin, m), self.constant % m, m)
    }
}

/// Evaluates a member at lattice index `j`, returning `(x, r)`.
///
/// The point must lie in `[0, m)`.
pub fn evaluate_parabola(p: &Parabola, j: i64) -> Result<(u64, u64)> {
    let x = p.abscissa(j);
    if x < 0 || x >= p.params.m as i128 {
        return Err(Error::OutOfRange { x, m: p.params.m });
    }
    Ok((x as u64, p.residue_at(j)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolaFamily {
    pub params: FractionParams,
    pub members: Vec<Parabola>,
}

impl ParabolaFamily {
    /// Members whose lattice contains `x` and whose value there is `r`,
    /// as `(member index, j)`.
    pub fn covering(&self, x: u64, r: u64) -> Vec<(usize, i64)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(idx, p)| {
                let j = p.lattice_index(x as i128)?;
                (p.residue_at(j) == r).then_some((idx, j))
            })
            .collect()
    }

    /// Vertex ordinates sorted within `[0, m)`.
    pub fn sorted_ordinates(&self) -> Vec<ExactRational> {
        let mut ys: Vec<_> = self.members.iter().map(|p| p.vertex_y.clone()).collect();
        ys.sort();
        ys
    }

    /// Gaps between cyclically consecutive vertex ordinates, including the
    /// wrap-around gap from the highest back to the lowest.
    pub fn cyclic_gaps(&self) -> Vec<ExactRational> {
        let ys = self.sorted_ordinates();
        let m = ExactRational::from_integer(self.params.m);
        let mut gaps: Vec<_> = ys.windows(2).map(|w| &w[1] - &w[0]).collect();
        if let (Some(first), Some(last)) = (ys.first(), ys.last()) {
            gaps.push(first + &(&m - last));
        }
        gaps
    }
}

/// Builds the `b′` parabolas anchored at `params.frac`.
pub fn parabola_family(params: &FractionParams) -> ParabolaFamily {
    let members = params.offsets().map(|i| Parabola::new(*params, i)).collect();
    ParabolaFamily { params: *params, members }
}

/// Nearest integer to `a·m/b`, ties rounded up.
fn rounded_anchor(m: u64, frac: ReducedFraction) -> u64 {
    let num = 2 * frac.numer() as u128 * m as u128 + frac.denom() as u128;
    (num / (2 * frac.denom() as u128)) as u64
}

/// All `(x, x² mod m)` with `|x − x₀| ≤ window` and `0 ≤ x < m`, by direct
/// squaring.
pub fn residues_near(m: Modulus, frac: ReducedFraction, window: u64) -> Result<Vec<(u64, u64)>> {
    let mv = m.get();
    if window as u128 * 2 >= mv as u128 {
        return Err(Error::WindowTooLarge { window, m: mv });
    }
    let x0 = rounded_anchor(mv, frac);
    let lo = x0.saturating_sub(window);
    let hi = (x0 + window).min(mv - 1);
    Ok((lo..=hi).map(|x| (x, qr_mod(x as i128, m))).collect())
}
