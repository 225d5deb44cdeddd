//! Lovász extension and its greedy subgradient.
//!
//! For `x ∈ [0,1]^n` sorted as `x_{π(1)} ≥ … ≥ x_{π(n)}` (ties by ascending
//! index) with prefix sets `P_i = {π(1), …, π(i)}`:
//!
//! ```text
//! f̂(x)      = Σ_i x_{π(i)} (f(P_i) − f(P_{i−1}))
//! g[π(i)]   = f(P_i) − f(P_{i−1})
//! ```
//!
//! The value is accumulated in the level-set form
//! `Σ_i (x_{π(i)} − x_{π(i+1)}) f(P_i)`, which is algebraically identical and
//! returns `f(A)` bit-exactly at a characteristic vector `χ_A`.

use crate::error::{Error, Result};
use crate::sets::{SetFunction, SubsetMask};

/// A point of the unit cube.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedPoint(Vec<f64>);

impl RelaxedPoint {
    /// Rejects coordinates outside `[0, 1]` (including NaN).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Domain(format!(
                "coordinate {i} = {v} outside [0, 1]"
            )));
        }
        Ok(Self(coords))
    }

    pub fn center(n: usize) -> Self {
        Self(vec![0.5; n])
    }

    pub fn from_mask(s: &SubsetMask) -> Self {
        Self(s.characteristic())
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Indices ordered by descending coordinate, ties by ascending index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortPermutation(Vec<usize>);

impl SortPermutation {
    pub fn order(&self) -> &[usize] {
        &self.0
    }
}

pub fn sort_descending(x: &RelaxedPoint) -> SortPermutation {
    let c = x.coords();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
    SortPermutation(order)
}

/// Value and subgradient from one sweep over the `n + 1` prefix sets.
#[derive(Clone, Debug)]
pub struct LovaszEval {
    pub value: f64,
    pub subgradient: Vec<f64>,
    pub order: SortPermutation,
}

fn check(f: &SetFunction, x: &RelaxedPoint) -> Result<()> {
    if f.n() != x.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            found: x.n(),
        });
    }
    Ok(())
}

/// Fused evaluation of `f̂(x)` and `g ∈ ∂f̂(x)`; exactly `n + 1` calls to `f`.
pub fn lovasz_eval(f: &SetFunction, x: &RelaxedPoint) -> Result<LovaszEval> {
    check(f, x)?;
    let n = x.n();
    let mut prefix = SubsetMask::empty(n);
    let mut prev = f.eval(&prefix)?;
    if prev != 0.0 {
        return Err(Error::Contract(format!(
            "Lovász extension needs a normalized function, got f(∅) = {prev}"
        )));
    }
    let order = sort_descending(x);
    let c = x.coords();
    let mut value = 0.0;
    let mut subgradient = vec![0.0; n];
    for (k, &j) in order.order().iter().enumerate() {
        prefix.insert(j);
        let cur = f.eval(&prefix)?;
        subgradient[j] = cur - prev;
        let next = order.order().get(k + 1).map_or(0.0, |&nj| c[nj]);
        let weight = c[j] - next;
        if weight != 0.0 {
            value += weight * cur;
        }
        prev = cur;
    }
    Ok(LovaszEval {
        value,
        subgradient,
        order,
    })
}

pub fn lovasz_value(f: &SetFunction, x: &RelaxedPoint) -> Result<f64> {
    Ok(lovasz_eval(f, x)?.value)
}

pub fn lovasz_subgradient(f: &SetFunction, x: &RelaxedPoint) -> Result<Vec<f64>> {
    Ok(lovasz_eval(f, x)?.subgradient)
}
