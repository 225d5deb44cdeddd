//! Rounding maps from relaxed points back to feasible subsets.

use std::fmt;
use std::sync::Arc;

use log::debug;

use crate::error::{Error, Result};
use crate::lovasz::{lovasz_value, RelaxedPoint};
use crate::rng::SeededRng;
use crate::sets::{FeasibleFamily, GroundSet, SetFunction, SubsetMask};

/// Draws one `p ~ Uniform(0, 1]` and returns `{i : x_i ≥ p}`.
///
/// A single shared threshold gives `E[f(S)] = f̂(x)` over the draw of `p`.
pub fn threshold_round(x: &RelaxedPoint, rng: &mut SeededRng) -> SubsetMask {
    let p = rng.uniform_open_closed();
    let mut s = SubsetMask::empty(x.n());
    for (i, &xi) in x.coords().iter().enumerate() {
        if xi >= p {
            s.insert(i);
        }
    }
    s
}

/// A rounding map `Round_𝒮` with approximation guarantee `alpha`.
pub trait Rounder: Send + Sync {
    fn alpha(&self) -> f64;
    fn family(&self) -> &FeasibleFamily;
    fn round(&self, x: &RelaxedPoint, rng: &mut SeededRng) -> Result<SubsetMask>;
}

/// Threshold rounding for the unconstrained family; unbiased, so `alpha = 1`
/// in expectation.
#[derive(Clone, Debug)]
pub struct ThresholdRounder {
    family: FeasibleFamily,
}

impl ThresholdRounder {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            family: FeasibleFamily::power_set(GroundSet::new(n)?),
        })
    }
}

impl Rounder for ThresholdRounder {
    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &FeasibleFamily {
        &self.family
    }

    fn round(&self, x: &RelaxedPoint, rng: &mut SeededRng) -> Result<SubsetMask> {
        Ok(threshold_round(x, rng))
    }
}

/// Accepts only vertices of the cube and returns their set.
#[derive(Clone, Debug)]
pub struct IdentityRounder {
    family: FeasibleFamily,
}

impl IdentityRounder {
    pub fn new(family: FeasibleFamily) -> Self {
        Self { family }
    }
}

impl Rounder for IdentityRounder {
    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &FeasibleFamily {
        &self.family
    }

    fn round(&self, x: &RelaxedPoint, _rng: &mut SeededRng) -> Result<SubsetMask> {
        SubsetMask::from_characteristic(x.coords())
    }
}

type RoundFn = dyn Fn(&RelaxedPoint, &mut SeededRng) -> Result<SubsetMask> + Send + Sync;

/// User-supplied rounding map.
#[derive(Clone)]
pub struct FnRounder {
    alpha: f64,
    family: FeasibleFamily,
    round: Arc<RoundFn>,
}

impl fmt::Debug for FnRounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnRounder")
            .field("alpha", &self.alpha)
            .field("family", &self.family)
            .finish()
    }
}

impl FnRounder {
    pub fn new<F>(alpha: f64, family: FeasibleFamily, round: F) -> Result<Self>
    where
        F: Fn(&RelaxedPoint, &mut SeededRng) -> Result<SubsetMask> + Send + Sync + 'static,
    {
        if !(alpha >= 1.0) {
            return Err(Error::Domain(format!(
                "rounding guarantee alpha must be >= 1, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            family,
            round: Arc::new(round),
        })
    }
}

impl Rounder for FnRounder {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn family(&self) -> &FeasibleFamily {
        &self.family
    }

    fn round(&self, x: &RelaxedPoint, rng: &mut SeededRng) -> Result<SubsetMask> {
        (self.round)(x, rng)
    }
}

/// A rounded decision with the realized ratio `f(S) / f̂(x)` when audited.
#[derive(Clone, Debug)]
pub struct Rounded {
    pub mask: SubsetMask,
    pub ratio: Option<f64>,
}

/// Rounds `x` and fails fast if the rounder leaves its family. When `audit`
/// is given and `f̂(x) > 0`, the realized ratio is logged and returned.
pub fn round_with_guarantee(
    rounder: &dyn Rounder,
    x: &RelaxedPoint,
    rng: &mut SeededRng,
    audit: Option<&SetFunction>,
) -> Result<Rounded> {
    let mask = rounder.round(x, rng)?;
    if !rounder.family().contains(&mask) {
        return Err(Error::Invariant(format!(
            "rounder returned {mask}, which is outside family '{}'",
            rounder.family().label()
        )));
    }
    let ratio = match audit {
        Some(f) => {
            let relaxed = lovasz_value(f, x)?;
            if relaxed > 0.0 {
                let r = f.eval(&mask)? / relaxed;
                debug!(
                    "rounding ratio f(S)/f̂(x) = {r:.6} (alpha = {})",
                    rounder.alpha()
                );
                Some(r)
            } else {
                None
            }
        }
        None => None,
    };
    Ok(Rounded { mask, ratio })
}
