//! Exhaustive ground-truth machinery for small ground sets.
//!
//! Every audit here enumerates; nothing is sampled. Capacity limits keep the
//! scans tractable: 24 elements for minimization, 16 for the submodularity
//! and sandwich audits, 12 for the pairwise Lipschitz scan.

use crate::error::{Error, Result};
use crate::sets::{FeasibleFamily, SetFunction, SubsetMask, ENUMERATION_LIMIT};

pub const SUBMODULARITY_LIMIT: usize = 16;
pub const SANDWICH_LIMIT: usize = 16;
pub const LIPSCHITZ_LIMIT: usize = 12;

fn capacity(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity { what, n, limit });
    }
    Ok(())
}

/// Exact minimizer over an enumerable family; ties go to the smallest mask.
pub fn brute_force_min(f: &SetFunction, family: &FeasibleFamily) -> Result<(SubsetMask, f64)> {
    capacity("brute-force minimization", family.n(), ENUMERATION_LIMIT)?;
    if family.n() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            found: family.n(),
        });
    }
    let masks = family.enumerate().ok_or_else(|| {
        Error::Config(format!("family '{}' cannot be enumerated", family.label()))
    })?;
    let mut best: Option<(SubsetMask, f64)> = None;
    for s in masks {
        let v = f.eval(&s)?;
        let better = match &best {
            None => true,
            Some((bs, bv)) => v < *bv || (v == *bv && s < *bs),
        };
        if better {
            best = Some((s, v));
        }
    }
    best.ok_or_else(|| Error::Domain(format!("family '{}' is empty", family.label())))
}

/// A violating triple `A ⊂ B`, `i ∉ B` with
/// `f(A∪{i}) − f(A) < f(B∪{i}) − f(B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub i: usize,
}

#[derive(Clone, Debug)]
pub struct SubmodularityReport {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Smallest `[f(A∪{i}) − f(A)] − [f(B∪{i}) − f(B)]` over all triples with
    /// `A ⊊ B`; zero when no such triple exists.
    pub margin: f64,
    pub tolerance: f64,
}

/// Exhaustive submodularity check with a tolerance scaled to the function's
/// magnitude (`1e-9 · max(1, max|f|)`).
pub fn check_submodular(f: &SetFunction) -> Result<SubmodularityReport> {
    capacity("submodularity check", f.n(), SUBMODULARITY_LIMIT)?;
    let table = f.table()?;
    let scale = table.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(scan_submodular(f.n(), &table, 1e-9 * scale))
}

pub fn check_submodular_with_tolerance(
    f: &SetFunction,
    tolerance: f64,
) -> Result<SubmodularityReport> {
    capacity("submodularity check", f.n(), SUBMODULARITY_LIMIT)?;
    Ok(scan_submodular(f.n(), &f.table()?, tolerance))
}

fn scan_submodular(n: usize, table: &[f64], tolerance: f64) -> SubmodularityReport {
    let full = (1usize << n) - 1;
    let mut worst: Option<(f64, usize, usize, usize)> = None;
    for b in 0..=full {
        let outside = full & !b;
        if outside == 0 || b == 0 {
            continue;
        }
        // Proper subsets of B, largest first: (a - 1) & b walks all submasks.
        let mut a = (b - 1) & b;
        loop {
            let mut rest = outside;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let bit = 1 << i;
                let margin = (table[a | bit] - table[a]) - (table[b | bit] - table[b]);
                if worst.is_none_or(|(w, ..)| margin < w) {
                    worst = Some((margin, a, b, i));
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    match worst {
        Some((margin, a, b, i)) if margin < -tolerance => SubmodularityReport {
            holds: false,
            counterexample: Some(Counterexample {
                a: SubsetMask::from_bits(n, a as u64).expect("in range"),
                b: SubsetMask::from_bits(n, b as u64).expect("in range"),
                i,
            }),
            margin,
            tolerance,
        },
        Some((margin, ..)) => SubmodularityReport {
            holds: true,
            counterexample: None,
            margin,
            tolerance,
        },
        None => SubmodularityReport {
            holds: true,
            counterexample: None,
            margin: 0.0,
            tolerance,
        },
    }
}

/// Outcome of the `f ≤ f̃ ≤ β f` audit.
#[derive(Clone, Debug)]
pub struct SandwichAudit {
    pub passes: bool,
    /// Largest `f̃(S) / f(S)` over masks with `f(S) > 0`.
    pub worst_ratio: Option<f64>,
    /// Masks with `f(S) ≤ 0`, where only the absolute inequalities were checked.
    pub flagged: Vec<SubsetMask>,
    /// Masks violating either inequality.
    pub violations: Vec<SubsetMask>,
}

pub fn audit_beta_sandwich(
    f: &SetFunction,
    approx: &SetFunction,
    beta: f64,
) -> Result<SandwichAudit> {
    capacity("beta-sandwich audit", f.n(), SANDWICH_LIMIT)?;
    if approx.n() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            found: approx.n(),
        });
    }
    let mut audit = SandwichAudit {
        passes: true,
        worst_ratio: None,
        flagged: Vec::new(),
        violations: Vec::new(),
    };
    for s in crate::sets::all_masks(f.n())? {
        let fv = f.eval(&s)?;
        let av = approx.eval(&s)?;
        let tol = 1e-12 * fv.abs().max(av.abs()).max(1.0);
        if fv > 0.0 {
            let r = av / fv;
            audit.worst_ratio = Some(audit.worst_ratio.map_or(r, |w: f64| w.max(r)));
        } else {
            audit.flagged.push(s.clone());
        }
        if fv > av + tol || av > beta * fv + tol {
            audit.violations.push(s);
        }
    }
    audit.passes = audit.violations.is_empty();
    Ok(audit)
}

/// `max_{S₁≠S₂} |f(S₁) − f(S₂)| / card(S₁ ⊖ S₂)`.
pub fn exact_lipschitz_modulus(f: &SetFunction) -> Result<f64> {
    capacity("Lipschitz modulus scan", f.n(), LIPSCHITZ_LIMIT)?;
    let table = f.table()?;
    let mut best = 0.0f64;
    for a in 0..table.len() {
        for b in a + 1..table.len() {
            let d = (a ^ b).count_ones() as f64;
            best = best.max((table[a] - table[b]).abs() / d);
        }
    }
    Ok(best)
}
