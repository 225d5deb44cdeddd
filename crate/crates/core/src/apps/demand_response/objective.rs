//! The tracking objective: among dispatches meeting the signal, prefer the
//! least aggregate power.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::sets::{all_masks, GroundSet, SetFunction, SubsetMask, ENUMERATION_LIMIT};

/// Largest fleet for the literal sum over all partitions (`4^n` terms per
/// full table).
pub const LITERAL_LIMIT: usize = 15;

/// One round's data: the clamped setpoint and per-load available power.
#[derive(Clone, Debug, PartialEq)]
pub struct DrRound {
    r_t: f64,
    u: Vec<f64>,
    total: f64,
}

impl DrRound {
    /// Clamps `r_raw` into `[0, Σ u]`.
    pub fn new(r_raw: f64, u: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = u
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(Error::Domain(format!(
                "u[{i}] = {v} must be finite and nonnegative"
            )));
        }
        if r_raw.is_nan() {
            return Err(Error::Domain("regulation setpoint is NaN".into()));
        }
        let total = u.iter().fold(0.0, |a, x| a + x);
        Ok(Self {
            r_t: r_raw.clamp(0.0, total),
            u,
            total,
        })
    }

    pub fn r_t(&self) -> f64 {
        self.r_t
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `Σ_{n∈S} u_n` in ascending index order.
    pub fn dispatched(&self, s: &SubsetMask) -> f64 {
        s.iter().fold(0.0, |a, i| a + self.u[i])
    }
}

/// `(s² − U²)·𝟙[s ≥ r]` for dispatched power `s` and fleet total `U`.
pub fn dr_value(dispatched: f64, total: f64, r_t: f64) -> f64 {
    if dispatched >= r_t {
        dispatched * dispatched - total * total
    } else {
        0.0
    }
}

/// Closed form of the partition sum; valid for `n ≤ 24`.
pub fn dr_objective(round: &DrRound) -> Result<SetFunction> {
    let n = round.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "demand-response objective",
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let bound = (round.total * round.total * (1.0 + 1e-12)).max(f64::MIN_POSITIVE);
    let r = round.clone();
    SetFunction::new(GroundSet::new(n)?, bound, move |s| {
        dr_value(r.dispatched(s), r.total, r.r_t)
    })
}

/// Sum over every partition `A` of
/// `[(Σ_A u)² − U²]·max{0, |S∩A| − |S∪A| + 1}·𝟙[Σ_A u ≥ r]`.
pub fn dr_objective_literal(round: &DrRound) -> Result<SetFunction> {
    let n = round.n();
    if n > LITERAL_LIMIT {
        return Err(Error::Capacity {
            what: "literal demand-response objective",
            n,
            limit: LITERAL_LIMIT,
        });
    }
    let bound = (round.total * round.total * (1.0 + 1e-12)).max(f64::MIN_POSITIVE);
    let r = round.clone();
    SetFunction::new(GroundSet::new(n)?, bound, move |s| {
        let mut acc = 0.0;
        for a in all_masks(n).expect("n within limit") {
            let inter = s.intersection(&a).expect("same n").card() as f64;
            let union = s.union(&a).expect("same n").card() as f64;
            let selector = (inter - union + 1.0).max(0.0);
            let sum_a = r.dispatched(&a);
            let feasible = if sum_a >= r.r_t { 1.0 } else { 0.0 };
            acc += (sum_a * sum_a - r.total * r.total) * selector * feasible;
        }
        acc
    })
}

/// `Σ_{n∈m} u_n` for every mask `m`, bit-identical to ascending summation.
pub fn subset_sums(u: &[f64]) -> Result<Vec<f64>> {
    let n = u.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "subset-sum table",
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut sums = vec![0.0; 1usize << n];
    for m in 1..sums.len() {
        let hb = usize::BITS - 1 - m.leading_zeros();
        sums[m] = sums[m ^ (1 << hb)] + u[hb as usize];
    }
    Ok(sums)
}

/// Exact round minimizer from a subset-sum table; ties go to the smallest mask.
pub fn round_optimum(round: &DrRound, sums: &[f64]) -> Result<(SubsetMask, f64)> {
    let mut best = (0usize, f64::INFINITY);
    for (m, &s) in sums.iter().enumerate() {
        let v = dr_value(s, round.total, round.r_t);
        if v < best.1 {
            best = (m, v);
        }
    }
    Ok((SubsetMask::from_bits(round.n(), best.0 as u64)?, best.1))
}

/// Uniform draw among the masks meeting the setpoint.
pub fn uniform_feasible(round: &DrRound, sums: &[f64], rng: &mut SeededRng) -> Result<SubsetMask> {
    let count = sums.iter().filter(|&&s| s >= round.r_t).count();
    if count == 0 {
        return Err(Error::Invariant(
            "no dispatch meets the clamped setpoint".into(),
        ));
    }
    let k = rng.below(count);
    let m = sums
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= round.r_t)
        .nth(k)
        .map(|(m, _)| m)
        .expect("k < count");
    SubsetMask::from_bits(round.n(), m as u64)
}
