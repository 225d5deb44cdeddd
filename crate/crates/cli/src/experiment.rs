//! Executes a prepared configuration and renders its artifacts in memory, so
//! nothing reaches disk unless the whole run succeeds.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use subdyn::algorithms::{
    run_online, write_trace_csv, ApproxSpec, BruteForceOracle, OnlineAlgorithm, Osga, Osgga, Ospgd,
    OspgdConfig, Round, RunConfig, RunOutput, VecStream,
};
use subdyn::apps::demand_response::{
    random_fleet, run_dr_experiment, DrExperimentConfig, DrPolicy,
};
use subdyn::apps::network_reconfig::{run_reconfiguration, NrPolicy, PfOptions};
use subdyn::oracle::{audit_beta_sandwich, brute_force_min};
use subdyn::rng::SeededRng;
use subdyn::rounding::ThresholdRounder;
use subdyn::sets::{FeasibleFamily, GroundSet};
use subdyn::synthetic::{drifting_params, rounds_from_params, GenericParams};
use subdyn::{Error, Result};

use crate::config::{Algorithm, Input, Kind, Prepared};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub kind: Kind,
    pub algorithm: Algorithm,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    pub alpha: f64,
    /// kW, demand response only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    /// Σ_t f_t(S_t): per-unit losses for reconfiguration, objective units otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_losses: Option<f64>,
    pub cumulative_alpha_regret: Option<f64>,
    #[serde(rename = "variation_V_T")]
    pub variation: f64,
    /// Seconds.
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct Artifacts {
    pub trace_csv: Vec<u8>,
    pub summary: Summary,
}

pub fn run(prepared: &Prepared) -> Result<Artifacts> {
    let started = Instant::now();
    let cfg = &prepared.config;
    let mut summary = Summary {
        kind: cfg.kind,
        algorithm: cfg.algorithm,
        horizon: cfg.horizon,
        seed: cfg.seed,
        alpha: cfg.alpha.unwrap_or(1.0),
        rmse: None,
        total_losses: None,
        cumulative_alpha_regret: None,
        variation: 0.0,
        wall_time: 0.0,
    };
    let mut trace_csv = Vec::new();
    match cfg.kind {
        Kind::Synthetic => {
            let (out, alpha) = run_synthetic(prepared)?;
            write_trace_csv(&mut trace_csv, &out.trace)?;
            summary.alpha = alpha;
            summary.total_losses = Some(out.ledger.cumulative_loss());
            summary.cumulative_alpha_regret = out.ledger.cumulative_alpha_regret();
            summary.variation = out.variation.cumulative();
        }
        Kind::DemandResponse => {
            let specs = match &prepared.input {
                Input::Fleet(f) => f.clone(),
                _ => random_fleet(
                    cfg.demand_response.n_tcls,
                    &mut SeededRng::new(cfg.seed).split(20),
                ),
            };
            let fleet = specs
                .iter()
                .map(|s| s.into_pair())
                .collect::<Result<Vec<_>>>()?;
            let dr = DrExperimentConfig {
                horizon: cfg.horizon,
                delta: cfg.delta,
                seed: cfg.seed,
                signal: cfg.demand_response.signal.clone(),
                dt_hours: cfg.demand_response.dt_hours,
                alpha: summary.alpha,
            };
            let run = run_dr_experiment(&fleet, &dr, DrPolicy::Ospgd)?;
            write_trace_csv(&mut trace_csv, &run.rows)?;
            summary.rmse = Some(run.rmse);
            summary.total_losses = Some(run.ledger.cumulative_loss());
            summary.cumulative_alpha_regret = run.ledger.cumulative_alpha_regret();
            summary.variation = run.variation.cumulative();
        }
        Kind::NetworkReconfig => {
            let Input::Network(net) = &prepared.input else {
                return Err(Error::Config("network fixture was not loaded".into()));
            };
            let nr = &cfg.network_reconfig;
            let opts = PfOptions {
                tolerance: nr.tolerance,
                max_iter: nr.max_iter,
            };
            let run = run_reconfiguration(
                net,
                &nr.noise,
                cfg.horizon,
                cfg.seed,
                NrPolicy::Osga,
                nr.big_m,
                summary.alpha,
                opts,
            )?;
            write_trace_csv(&mut trace_csv, &run.rows)?;
            summary.total_losses = Some(run.total_losses_pu);
            summary.cumulative_alpha_regret = run.ledger.cumulative_alpha_regret();
            summary.variation = run.variation.cumulative();
        }
    }
    summary.wall_time = started.elapsed().as_secs_f64();
    Ok(Artifacts { trace_csv, summary })
}

/// Returns the run and the regret factor it was accounted with.
fn run_synthetic(prepared: &Prepared) -> Result<(RunOutput, f64)> {
    let cfg = &prepared.config;
    let s = &cfg.synthetic;
    let mut rng = SeededRng::new(cfg.seed).split(10);
    let ground = GroundSet::new(s.n)?;
    let power_set = FeasibleFamily::power_set(ground.clone());
    let run_cfg = RunConfig::new(cfg.horizon, cfg.seed);

    let (rounds, family, mut alg, alpha): (
        Vec<Round>,
        FeasibleFamily,
        Box<dyn OnlineAlgorithm>,
        f64,
    ) = match cfg.algorithm {
        Algorithm::Osga => {
            let params = drifting_params(s.n, cfg.horizon, s.drift, &mut rng)
                .into_iter()
                .map(|p| p.lifted(s.floor))
                .collect::<Result<Vec<_>>>()?;
            let rounds = rounds_from_params(&params, true)?;
            let mut beta = 1.0f64;
            for r in &rounds {
                let approx = r.approx.as_ref().expect("surrogate requested");
                let audit = audit_beta_sandwich(&r.f, approx, f64::INFINITY)?;
                if !audit.passes {
                    return Err(Error::Invariant(format!(
                        "round {} surrogate is not an upper bound",
                        r.t
                    )));
                }
                beta = beta.max(audit.worst_ratio.unwrap_or(1.0));
            }
            let alg = Osga::new(ApproxSpec::brute_force(beta)?, power_set.clone());
            (rounds, power_set, Box::new(alg), cfg.alpha.unwrap_or(beta))
        }
        Algorithm::Osgga => {
            let family = FeasibleFamily::cardinality_exactly(ground, s.k)?;
            let mut gp = GenericParams::random(s.n, s.gamma, &mut rng);
            let mut params = Vec::with_capacity(cfg.horizon);
            for _ in 0..cfg.horizon {
                params.push(gp.clone());
                gp = gp.drifted(s.drift, &mut rng);
            }
            let mut fs = Vec::with_capacity(params.len());
            let mut nu = f64::INFINITY;
            for p in &params {
                let f = p.function()?;
                nu = nu.min(brute_force_min(&f, &family)?.1);
                fs.push(f);
            }
            let rounds = fs
                .into_iter()
                .zip(&params)
                .enumerate()
                .map(|(k, (f, p))| Ok(Round::new(k + 1, f).with_generic(p.spec(nu)?)))
                .collect::<Result<Vec<_>>>()?;
            (
                rounds,
                family.clone(),
                Box::new(Osgga::new(family)),
                cfg.alpha.unwrap_or(1.0),
            )
        }
        Algorithm::Ospgd => {
            let params = drifting_params(s.n, cfg.horizon, s.drift, &mut rng);
            let rounds = rounds_from_params(&params, false)?;
            let ospgd = OspgdConfig::new(
                cfg.delta,
                cfg.horizon,
                Arc::new(ThresholdRounder::new(s.n)?),
            )?;
            (
                rounds,
                power_set,
                Box::new(Ospgd::new(ospgd)),
                cfg.alpha.unwrap_or(1.0),
            )
        }
    };
    let oracle = BruteForceOracle::new(family);
    let out = run_online(
        &mut VecStream::new(rounds),
        alg.as_mut(),
        &run_cfg.with_alpha(alpha),
        Some(&oracle),
    )?;
    Ok((out, alpha))
}
