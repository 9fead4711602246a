//! Named verification checks run per fraction by `qrpat verify`.
//!
//! Each check implements [`Check`] and is registered under a stable name in a
//! [`CheckRegistry`]; the CLI selects a subset with `--checks`.

use rayon::prelude::*;
use serde::Serialize;

use crate::predictor::{fraction_params, parabola_family, residues_near, verify_prop1, FractionParams, ParabolaFamily};
use crate::residue::{farey_fractions, ExactRational, Modulus, ReducedFraction};
use crate::{Error, Result};

/// Everything a check may look at for one `(m, a/b)` pair.
pub struct FractionContext {
    pub m: Modulus,
    pub frac: ReducedFraction,
    pub params: FractionParams,
    pub family: ParabolaFamily,
    pub window: u64,
}

impl FractionContext {
    pub fn new(m: Modulus, frac: ReducedFraction, window: u64) -> Result<Self> {
        let params = fraction_params(m, frac)?;
        let family = parabola_family(&params);
        Ok(Self { m, frac, params, family, window })
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// `Err` carries a human-readable description of the first violation.
    fn run(&self, ctx: &FractionContext) -> std::result::Result<(), String>;
}

/// `b²·r₀ = β·m + α²`.
pub struct Prop1Identity;

impl Check for Prop1Identity {
    fn name(&self) -> &'static str {
        "prop1"
    }

    fn description(&self) -> &'static str {
        "anchor residue identity b²·r0 = β·m + α²"
    }

    fn run(&self, ctx: &FractionContext) -> std::result::Result<(), String> {
        let p = &ctx.params;
        if verify_prop1(p) {
            Ok(())
        } else {
            Err(format!("b²·r0 ≠ β·m + α² (β = {}, α = {}, r0 = {})", p.beta, p.alpha, p.r0))
        }
    }
}

/// Member count, common vertex abscissa, vertex lattice and cyclic gaps.
pub struct FamilyStructure;

impl Check for FamilyStructure {
    fn name(&self) -> &'static str {
        "structure"
    }

    fn description(&self) -> &'static str {
        "b′ members, vertices at a·m/b on multiples of m/b² spaced m/b′"
    }

    fn run(&self, ctx: &FractionContext) -> std::result::Result<(), String> {
        let p = &ctx.params;
        let fam = &ctx.family;
        let (a, b) = (p.frac.numer(), p.frac.denom());
        let rat = |n: u128, d: u128| ExactRational::new(n, d).expect("nonzero denominator");

        if fam.members.len() as u64 != p.b_prime {
            return Err(format!("{} members, expected {}", fam.members.len(), p.b_prime));
        }
        let vx = rat(a as u128 * p.m as u128, b as u128);
        let lattice = rat(p.m as u128, b as u128 * b as u128);
        let step = rat(p.m as u128, p.b_prime as u128);
        let m = ExactRational::from_integer(p.m);
        let mut seen = vec![false; p.b_prime as usize];
        for member in &fam.members {
            if member.vertex_x != vx {
                return Err(format!("member i = {} has vertex x = {}, expected {vx}", member.i, member.vertex_x));
            }
            let y = &member.vertex_y;
            if y.is_negative() || *y >= m {
                return Err(format!("member i = {} vertex y = {y} outside [0, m)", member.i));
            }
            let units = y * &lattice.recip().expect("m > 0");
            if !units.is_integer() {
                return Err(format!("member i = {} vertex y = {y} is not a multiple of m/b²", member.i));
            }
            let predicted = (&ExactRational::from_integer(p.beta) * &lattice
                + &ExactRational::from_integer(member.a_prime) * &step)
                .rem_modulus(p.m);
            if predicted != *y {
                return Err(format!(
                    "member i = {} vertex y = {y} but β·m/b² + a′·m/b′ = {predicted}",
                    member.i
                ));
            }
            seen[member.a_prime as usize] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err("a′ values do not cover Z_b′".into());
        }
        if let Some(g) = fam.cyclic_gaps().into_iter().find(|g| *g != step) {
            return Err(format!("vertex gap {g} differs from m/b′ = {step}"));
        }
        Ok(())
    }
}

/// Every directly squared residue near `x₀` lies on exactly one member.
pub struct NearCoverage;

impl Check for NearCoverage {
    fn name(&self) -> &'static str {
        "coverage"
    }

    fn description(&self) -> &'static str {
        "residues within the window around x0 lie on exactly one member"
    }

    fn run(&self, ctx: &FractionContext) -> std::result::Result<(), String> {
        let points = residues_near(ctx.m, ctx.frac, ctx.window).map_err(|e| e.to_string())?;
        for (x, r) in points {
            let hits = ctx.family.covering(x, r);
            if hits.len() != 1 {
                return Err(format!("point ({x}, {r}) lies on {} members", hits.len()));
            }
        }
        Ok(())
    }
}

pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Prop1Identity));
        reg.register(Box::new(FamilyStructure));
        reg.register(Box::new(NearCoverage));
        reg
    }
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new() }
    }

    /// Adds a check; a later registration replaces an earlier one of the same name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn all(&self) -> Vec<&dyn Check> {
        self.checks.iter().map(|c| c.as_ref()).collect()
    }

    pub fn select(&self, names: &[String]) -> Result<Vec<&dyn Check>> {
        names
            .iter()
            .map(|n| {
                self.get(n).ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown check {n:?}, available: {}", self.names().join(", ")))
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckSummary {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub fraction: String,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VerifyReport {
    pub modulus: u64,
    pub max_denominator: u64,
    pub window: u64,
    pub fractions: usize,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<Failure>,
    pub ok: bool,
}

/// Runs `checks` for every reduced `a/b` with `b ≤ max_denominator`.
pub fn run_checks(m: Modulus, max_denominator: u64, window: u64, checks: &[&dyn Check]) -> Result<VerifyReport> {
    let mv = m.get();
    if (max_denominator as u128).pow(2) >= mv as u128 {
        return Err(Error::ModulusNotAboveDenominatorSquare { m: mv, b: max_denominator });
    }
    if window as u128 * 2 >= mv as u128 {
        return Err(Error::WindowTooLarge { window, m: mv });
    }
    let fracs = farey_fractions(max_denominator)?;
    let outcomes: Vec<Vec<(usize, std::result::Result<(), String>)>> = fracs
        .par_iter()
        .map(|&frac| {
            let ctx = FractionContext::new(m, frac, window)?;
            Ok(checks.iter().enumerate().map(|(idx, c)| (idx, c.run(&ctx))).collect())
        })
        .collect::<Result<_>>()?;

    let mut summaries: Vec<CheckSummary> = checks
        .iter()
        .map(|c| CheckSummary { name: c.name().to_string(), passed: 0, failed: 0 })
        .collect();
    let mut failures = Vec::new();
    for (frac, results) in fracs.iter().zip(outcomes) {
        for (idx, res) in results {
            match res {
                Ok(()) => summaries[idx].passed += 1,
                Err(detail) => {
                    summaries[idx].failed += 1;
                    failures.push(Failure {
                        fraction: frac.to_string(),
                        check: checks[idx].name().to_string(),
                        detail,
                    });
                }
            }
        }
    }
    Ok(VerifyReport {
        modulus: mv,
        max_denominator,
        window,
        fractions: fracs.len(),
        checks: summaries,
        ok: failures.is_empty(),
        failures,
    })
}
