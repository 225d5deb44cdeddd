//! Closed-loop dispatch: the fleet state at round `t` depends on every
//! earlier dispatch, so this loop owns the physics and the regret ledger.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::objective::{dr_objective, round_optimum, subset_sums, uniform_feasible, DrRound};
use super::tcl::{classify, tcl_step, Control, TclParams, TclState};
use crate::algorithms::{ospgd_step, OspgdConfig, RegretLedger};
use crate::error::{Error, Result};
use crate::lovasz::RelaxedPoint;
use crate::rng::SeededRng;
use crate::rounding::{round_with_guarantee, ThresholdRounder};
use crate::sets::{SubsetMask, VariationLedger, ENUMERATION_LIMIT};
use crate::signals::{regulation_trace, SignalConfig};

/// Fleet file entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TclSpec {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub cop: f64,
    pub setpoint: f64,
    pub deadband: f64,
    pub ambient: f64,
    pub theta0: f64,
}

impl TclSpec {
    pub fn params(&self) -> TclParams {
        TclParams {
            thermal_resistance: self.r,
            thermal_capacitance: self.c,
            rated_power: self.p,
            cop: self.cop,
            setpoint: self.setpoint,
            deadband_halfwidth: self.deadband,
            ambient: self.ambient,
        }
    }

    pub fn into_pair(&self) -> Result<(TclParams, TclState)> {
        let p = self.params();
        p.validate()?;
        if !self.theta0.is_finite() {
            return Err(Error::Config(format!(
                "theta0 must be finite, got {}",
                self.theta0
            )));
        }
        Ok((p, TclState::new(self.theta0, false)))
    }
}

/// Air conditioners drawn log-uniformly around nominal values:
///
/// | field | range |
/// |---|---|
/// | R (°C/kW) | 1.5 – 2.5 |
/// | C (kWh/°C) | 7.5 – 12.5 |
/// | P (kW, electrical) | 4.0 – 7.0 |
/// | cop | 2.5 |
/// | setpoint (°C) | 20 – 25, uniform |
/// | deadband (°C) | 0.5 |
/// | ambient (°C) | 32 |
/// | theta0 | uniform inside the deadband |
pub fn random_fleet(n: usize, rng: &mut SeededRng) -> Vec<TclSpec> {
    (0..n)
        .map(|_| {
            let r = rng.log_uniform(1.5, 2.5);
            let c = rng.log_uniform(7.5, 12.5);
            let p = rng.log_uniform(4.0, 7.0);
            let setpoint = rng.uniform_range(20.0, 25.0);
            let theta0 = rng.uniform_range(setpoint - 0.5, setpoint + 0.5);
            TclSpec {
                r,
                c,
                p,
                cop: 2.5,
                setpoint,
                deadband: 0.5,
                ambient: 32.0,
                theta0,
            }
        })
        .collect()
}

fn default_dt_hours() -> f64 {
    4.0 / 3600.0
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrExperimentConfig {
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default = "default_dt_hours")]
    pub dt_hours: f64,
    /// Regret factor for the ledger.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

impl DrExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("T must be at least 1".into()));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        if !(self.dt_hours > 0.0) {
            return Err(Error::Config("dt_hours must be positive".into()));
        }
        self.signal.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrPolicy {
    Ospgd,
    RoundOptimal,
    RandomFeasible,
}

impl DrPolicy {
    pub fn name(self) -> &'static str {
        match self {
            DrPolicy::Ospgd => "ospgd",
            DrPolicy::RoundOptimal => "round_optimal",
            DrPolicy::RandomFeasible => "random_feasible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DrRow {
    pub t: usize,
    pub algorithm: String,
    pub loss: f64,
    pub optimum: Option<f64>,
    pub alpha_regret_cum: Option<f64>,
    pub regret_time_avg: Option<f64>,
    pub variation_cum: Option<f64>,
    pub mask_hex: String,
    pub r_t: f64,
    pub dispatched_kw: f64,
    pub tracking_error: f64,
}

#[derive(Clone, Debug)]
pub struct DrRun {
    pub rows: Vec<DrRow>,
    /// kW
    pub rmse: f64,
    pub ledger: RegretLedger,
    pub variation: VariationLedger,
    pub fleet: Vec<TclState>,
}

/// Runs one policy for `cfg.horizon` rounds. Each round advances nothing
/// before the decision: the available power `u_t` and setpoint `r_t` are
/// read from the current fleet, the committed set is dispatched, then the
/// fleet evolves and OSPGD steps on the revealed objective.
pub fn run_dr_experiment(
    fleet: &[(TclParams, TclState)],
    cfg: &DrExperimentConfig,
    policy: DrPolicy,
) -> Result<DrRun> {
    cfg.validate()?;
    if fleet.is_empty() {
        return Err(Error::Config("fleet is empty".into()));
    }
    for (p, _) in fleet {
        p.validate()?;
    }
    let n = fleet.len();
    let exact = n <= ENUMERATION_LIMIT;
    if !exact && policy != DrPolicy::Ospgd {
        return Err(Error::Capacity {
            what: "demand-response round oracle",
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let signal = regulation_trace(&cfg.signal, cfg.horizon)?;
    let mut rng = SeededRng::new(cfg.seed).split(1);
    let ospgd_cfg = OspgdConfig::new(cfg.delta, cfg.horizon, Arc::new(ThresholdRounder::new(n)?))?;
    let mut x = RelaxedPoint::center(n);
    let mut pending: Option<SubsetMask> = None;

    let params: Vec<&TclParams> = fleet.iter().map(|(p, _)| p).collect();
    let mut states: Vec<TclState> = fleet.iter().map(|(_, s)| s.clone()).collect();
    let mut ledger = RegretLedger::new(cfg.alpha);
    let mut variation = VariationLedger::new();
    let mut rows = Vec::with_capacity(cfg.horizon);
    let mut sq_err = 0.0;

    for t in 1..=cfg.horizon {
        let u: Vec<f64> = params
            .iter()
            .zip(&states)
            .map(|(p, s)| match classify(p, s.temperature) {
                Control::ForcedOff => 0.0,
                _ => p.rated_power,
            })
            .collect();
        let round = DrRound::new(signal[t - 1], u)?;
        let f = dr_objective(&round)?;
        let sums = if exact {
            Some(subset_sums(round.u())?)
        } else {
            None
        };
        let optimum = match &sums {
            Some(s) => Some(round_optimum(&round, s)?),
            None => None,
        };

        let s_t = match policy {
            DrPolicy::Ospgd => match pending.take() {
                Some(s) => s,
                None => round_with_guarantee(ospgd_cfg.rounder.as_ref(), &x, &mut rng, None)?.mask,
            },
            DrPolicy::RoundOptimal => optimum.as_ref().expect("exact").0.clone(),
            DrPolicy::RandomFeasible => {
                uniform_feasible(&round, sums.as_ref().expect("exact"), &mut rng)?
            }
        };

        let loss = f.eval(&s_t)?;
        let opt_value = optimum.as_ref().map(|o| o.1);
        if let Some((s_star, _)) = &optimum {
            variation.push(s_star.clone())?;
        }
        ledger.push(loss, opt_value);
        let dispatched = round.dispatched(&s_t);
        let err = dispatched - round.r_t();
        sq_err += err * err;
        rows.push(DrRow {
            t,
            algorithm: policy.name().to_string(),
            loss,
            optimum: opt_value,
            alpha_regret_cum: ledger.cumulative_alpha_regret(),
            regret_time_avg: ledger.time_averaged(),
            variation_cum: optimum.as_ref().map(|_| variation.cumulative()),
            mask_hex: s_t.to_hex(),
            r_t: round.r_t(),
            dispatched_kw: dispatched,
            tracking_error: err,
        });

        for (k, (p, s)) in params.iter().zip(states.iter_mut()).enumerate() {
            *s = tcl_step(p, s, s_t.contains(k), cfg.dt_hours);
        }

        if policy == DrPolicy::Ospgd {
            let f_norm = if f.is_normalized() { f } else { f.normalize()? };
            let (x_next, s_next) = ospgd_step(&f_norm, &x, &ospgd_cfg, &mut rng)?;
            x = x_next;
            pending = Some(s_next);
        }
    }

    Ok(DrRun {
        rows,
        rmse: (sq_err / cfg.horizon as f64).sqrt(),
        ledger,
        variation,
        fleet: states,
    })
}
