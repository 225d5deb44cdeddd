//! Projected subgradient descent on the Lovász extension with randomized
//! rounding of each iterate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lovasz::{lovasz_subgradient, RelaxedPoint};
use crate::rng::SeededRng;
use crate::rounding::{round_with_guarantee, Rounder};
use crate::sets::{SetFunction, SubsetMask};

use super::driver::{OnlineAlgorithm, Round};

/// Projection onto the relaxed feasible region.
pub trait Projector: Send + Sync {
    fn project(&self, v: &[f64]) -> Result<RelaxedPoint>;
}

/// Projection onto `[0,1]^n`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoxProjector;

impl Projector for BoxProjector {
    fn project(&self, v: &[f64]) -> Result<RelaxedPoint> {
        Ok(box_project(v))
    }
}

/// Componentwise clamp to `[0,1]`. NaN maps to 0.
pub fn box_project(v: &[f64]) -> RelaxedPoint {
    let coords = v
        .iter()
        .map(|&a| if a.is_nan() { 0.0 } else { a.clamp(0.0, 1.0) })
        .collect();
    RelaxedPoint::new(coords).expect("clamped coordinates lie in [0,1]")
}

#[derive(Clone)]
pub struct OspgdConfig {
    delta: f64,
    horizon: usize,
    eta: f64,
    pub x_init: RelaxedPoint,
    pub projector: Arc<dyn Projector>,
    pub rounder: Arc<dyn Rounder>,
}

impl fmt::Debug for OspgdConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OspgdConfig")
            .field("delta", &self.delta)
            .field("horizon", &self.horizon)
            .field("eta", &self.eta)
            .field("x_init", &self.x_init)
            .finish()
    }
}

impl OspgdConfig {
    /// Box projector, center start and the given rounder; `η = δ/√T`.
    pub fn new(delta: f64, horizon: usize, rounder: Arc<dyn Rounder>) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if horizon == 0 {
            return Err(Error::Domain("horizon must be at least 1".into()));
        }
        let n = rounder.family().n();
        Ok(Self {
            delta,
            horizon,
            eta: delta / (horizon as f64).sqrt(),
            x_init: RelaxedPoint::center(n),
            projector: Arc::new(BoxProjector),
            rounder,
        })
    }

    pub fn with_x_init(mut self, x: RelaxedPoint) -> Result<Self> {
        if x.n() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: x.n(),
            });
        }
        self.x_init = x;
        Ok(self)
    }

    pub fn with_projector(mut self, p: Arc<dyn Projector>) -> Self {
        self.projector = p;
        self
    }

    pub fn n(&self) -> usize {
        self.rounder.family().n()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// One descent step on `f̂_{t−1}` followed by rounding of the new iterate.
///
/// The returned point does not depend on the rounding draw.
pub fn ospgd_step(
    f_prev: &SetFunction,
    x: &RelaxedPoint,
    cfg: &OspgdConfig,
    rng: &mut SeededRng,
) -> Result<(RelaxedPoint, SubsetMask)> {
    let x_next = descend(f_prev, x, cfg)?;
    let s = round_with_guarantee(cfg.rounder.as_ref(), &x_next, rng, None)?.mask;
    Ok((x_next, s))
}

fn descend(f_prev: &SetFunction, x: &RelaxedPoint, cfg: &OspgdConfig) -> Result<RelaxedPoint> {
    let g = lovasz_subgradient(f_prev, x)?;
    let v: Vec<f64> = x
        .coords()
        .iter()
        .zip(&g)
        .map(|(xi, gi)| xi - cfg.eta * gi)
        .collect();
    let p = cfg.projector.project(&v)?;
    if p.n() != x.n() || p.coords().iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::Invariant("projector output left [0,1]^n".into()));
    }
    Ok(p)
}

/// OSPGD as an online algorithm. Losses that are not normalized are shifted
/// by `f(∅)`, which leaves the subgradient unchanged.
pub struct Ospgd {
    cfg: OspgdConfig,
    x: RelaxedPoint,
    pending: Option<SubsetMask>,
    iterates: Vec<RelaxedPoint>,
}

impl Ospgd {
    pub fn new(cfg: OspgdConfig) -> Self {
        let x = cfg.x_init.clone();
        Self {
            iterates: vec![x.clone()],
            x,
            cfg,
            pending: None,
        }
    }

    pub fn config(&self) -> &OspgdConfig {
        &self.cfg
    }

    pub fn current(&self) -> &RelaxedPoint {
        &self.x
    }

    /// `x_1, x_2, …` including the iterate prepared for the next round.
    pub fn iterates(&self) -> &[RelaxedPoint] {
        &self.iterates
    }
}

impl OnlineAlgorithm for Ospgd {
    fn name(&self) -> &str {
        "ospgd"
    }

    fn decide(&mut self, _t: usize, rng: &mut SeededRng) -> Result<SubsetMask> {
        match self.pending.take() {
            Some(s) => Ok(s),
            None => Ok(round_with_guarantee(self.cfg.rounder.as_ref(), &self.x, rng, None)?.mask),
        }
    }

    fn observe(&mut self, round: &Round, rng: &mut SeededRng) -> Result<()> {
        let f = if round.f.is_normalized() {
            round.f.clone()
        } else {
            round.f.normalize()?
        };
        let (x_next, s) = ospgd_step(&f, &self.x, &self.cfg, rng)?;
        self.x = x_next.clone();
        self.iterates.push(x_next);
        self.pending = Some(s);
        Ok(())
    }
}
