//! Greedy updates: OSGA on a β-approximation, its unconstrained special
//! case, and OSGGA on the generic square-root-of-modular approximation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracle::brute_force_min;
use crate::rng::SeededRng;
use crate::sets::{FeasibleFamily, GroundSet, SetFunction, SubsetMask};

use super::driver::{OnlineAlgorithm, Round};

/// Exact minimizer of a (surrogate) set function over a family.
pub type ExactMinimizer =
    Arc<dyn Fn(&SetFunction, &FeasibleFamily) -> Result<(SubsetMask, f64)> + Send + Sync>;

/// A β-approximation scheme: the factor, an exact minimizer for the
/// surrogate, and the surrogate's Lipschitz modulus when known.
#[derive(Clone)]
pub struct ApproxSpec {
    pub beta: f64,
    pub exact_min: ExactMinimizer,
    pub lipschitz: Option<f64>,
}

impl fmt::Debug for ApproxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApproxSpec")
            .field("beta", &self.beta)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ApproxSpec {
    pub fn new(beta: f64, exact_min: ExactMinimizer) -> Result<Self> {
        if !(beta >= 1.0) {
            return Err(Error::Domain(format!("beta must be >= 1, got {beta}")));
        }
        Ok(Self {
            beta,
            exact_min,
            lipschitz: None,
        })
    }

    /// Exhaustive minimization; only for enumerable families.
    pub fn brute_force(beta: f64) -> Result<Self> {
        Self::new(beta, Arc::new(brute_force_min))
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }
}

/// `S_t ∈ argmin_{S∈𝒮} f̃_{t−1}(S)`.
pub fn osga_step(
    spec: &ApproxSpec,
    prev_approx: &SetFunction,
    family: &FeasibleFamily,
) -> Result<SubsetMask> {
    let (s, _) = (spec.exact_min)(prev_approx, family)?;
    if !family.contains(&s) {
        return Err(Error::Invariant(format!(
            "exact minimizer returned {s}, outside family '{}'",
            family.label()
        )));
    }
    Ok(s)
}

/// Exhaustive minimizer over `2^V` (n ≤ 24).
pub fn brute_force_unconstrained(f: &SetFunction) -> Result<(SubsetMask, f64)> {
    brute_force_min(f, &FeasibleFamily::power_set(f.ground().clone()))
}

/// `S_t ∈ argmin_{S⊆V} f_{t−1}(S)` via the supplied exact minimizer.
pub fn osga_unconstrained_step<M>(f_prev: &SetFunction, min_oracle: M) -> Result<SubsetMask>
where
    M: Fn(&SetFunction) -> Result<(SubsetMask, f64)>,
{
    Ok(min_oracle(f_prev)?.0)
}

/// Generic approximation `f̃ᵍ(S) = sqrt(Σ_{i∈S} c_i)` with sandwich factor
/// `γ` and a lower bound `ν` on the round minima.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericApproxSpec {
    pub c: Vec<f64>,
    pub gamma: f64,
    pub nu: f64,
}

impl GenericApproxSpec {
    pub fn new(c: Vec<f64>, gamma: f64, nu: f64) -> Result<Self> {
        if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("c[{i}] = {v} must be nonnegative")));
        }
        if !(gamma > 0.0) || !(nu > 0.0) {
            return Err(Error::Domain(format!(
                "gamma and nu must be positive, got {gamma}, {nu}"
            )));
        }
        Ok(Self { c, gamma, nu })
    }

    /// `(f̃ᵍ(S))² = Σ_{i∈S} c_i`, summed in ascending index order.
    pub fn squared(&self, s: &SubsetMask) -> f64 {
        s.iter().map(|i| self.c[i]).fold(0.0, |a, x| a + x)
    }

    pub fn value(&self, s: &SubsetMask) -> f64 {
        self.squared(s).sqrt()
    }

    pub fn squared_function(&self) -> Result<SetFunction> {
        let c = self.c.clone();
        let bound = c.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        SetFunction::new(GroundSet::new(c.len())?, bound, move |s| {
            s.iter().map(|i| c[i]).fold(0.0, |a, x| a + x)
        })
    }
}

/// `S_t ∈ argmin_{S∈𝒮} Σ_{i∈S} c_{i,t−1}`, a linear problem over the family.
pub fn osgga_step(spec: &GenericApproxSpec, family: &FeasibleFamily) -> Result<SubsetMask> {
    if spec.c.len() != family.n() {
        return Err(Error::Dimension {
            expected: family.n(),
            found: spec.c.len(),
        });
    }
    if let Some(s) = family.linear_min(&spec.c) {
        return s;
    }
    let masks = family.enumerate().ok_or_else(|| {
        Error::Config(format!(
            "family '{}' has neither a linear oracle nor an enumerator",
            family.label()
        ))
    })?;
    masks
        .map(|s| (spec.squared(&s), s))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .map(|(_, s)| s)
        .ok_or_else(|| Error::Domain(format!("family '{}' is empty", family.label())))
}

/// First decision of the greedy algorithms: `∅` when feasible, otherwise the
/// smallest feasible mask.
fn initial_decision(family: &FeasibleFamily) -> Result<SubsetMask> {
    let empty = SubsetMask::empty(family.n());
    if family.contains(&empty) {
        return Ok(empty);
    }
    if let Some(s) = family.linear_min(&vec![0.0; family.n()]) {
        return s;
    }
    family
        .enumerate()
        .and_then(|mut it| it.next())
        .ok_or_else(|| {
            Error::Config(format!(
                "no initial decision available for family '{}'",
                family.label()
            ))
        })
}

/// OSGA as an online algorithm. Uses `round.approx` when the stream supplies
/// a surrogate and the round's own loss otherwise.
pub struct Osga {
    spec: ApproxSpec,
    family: FeasibleFamily,
    next: Option<SubsetMask>,
}

impl Osga {
    pub fn new(spec: ApproxSpec, family: FeasibleFamily) -> Self {
        Self {
            spec,
            family,
            next: None,
        }
    }

    pub fn with_initial(mut self, s: SubsetMask) -> Self {
        self.next = Some(s);
        self
    }
}

impl OnlineAlgorithm for Osga {
    fn name(&self) -> &str {
        "osga"
    }

    fn decide(&mut self, _t: usize, _rng: &mut SeededRng) -> Result<SubsetMask> {
        match self.next.take() {
            Some(s) => Ok(s),
            None => initial_decision(&self.family),
        }
    }

    fn observe(&mut self, round: &Round, _rng: &mut SeededRng) -> Result<()> {
        let surrogate = round.approx.as_ref().unwrap_or(&round.f);
        self.next = Some(osga_step(&self.spec, surrogate, &self.family)?);
        Ok(())
    }
}

pub struct Osgga {
    family: FeasibleFamily,
    next: Option<SubsetMask>,
}

impl Osgga {
    pub fn new(family: FeasibleFamily) -> Self {
        Self { family, next: None }
    }
}

impl OnlineAlgorithm for Osgga {
    fn name(&self) -> &str {
        "osgga"
    }

    fn decide(&mut self, _t: usize, _rng: &mut SeededRng) -> Result<SubsetMask> {
        match self.next.take() {
            Some(s) => Ok(s),
            None => initial_decision(&self.family),
        }
    }

    fn observe(&mut self, round: &Round, _rng: &mut SeededRng) -> Result<()> {
        let spec = round.generic.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "round {} carries no generic approximation",
                round.t
            ))
        })?;
        self.next = Some(osgga_step(spec, &self.family)?);
        Ok(())
    }
}
