//! The causal online loop: decide, then reveal, then account.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::brute_force_min;
use crate::rng::SeededRng;
use crate::sets::{FeasibleFamily, SetFunction, SubsetMask, VariationLedger};

use super::greedy::GenericApproxSpec;
use super::regret::RegretLedger;

/// What the environment reveals after round `t`.
#[derive(Clone, Debug)]
pub struct Round {
    pub t: usize,
    pub f: SetFunction,
    pub approx: Option<SetFunction>,
    pub generic: Option<GenericApproxSpec>,
}

impl Round {
    pub fn new(t: usize, f: SetFunction) -> Self {
        Self {
            t,
            f,
            approx: None,
            generic: None,
        }
    }

    pub fn with_approx(mut self, approx: SetFunction) -> Self {
        self.approx = Some(approx);
        self
    }

    pub fn with_generic(mut self, generic: GenericApproxSpec) -> Self {
        self.generic = Some(generic);
        self
    }
}

/// Source of rounds. The driver pulls round `t` only after `S_t` is fixed.
pub trait ProblemStream {
    fn next_round(&mut self) -> Option<Round>;
}

/// A precomputed stream.
#[derive(Clone, Debug)]
pub struct VecStream {
    rounds: std::vec::IntoIter<Round>,
}

impl VecStream {
    pub fn new(rounds: Vec<Round>) -> Self {
        Self {
            rounds: rounds.into_iter(),
        }
    }
}

impl ProblemStream for VecStream {
    fn next_round(&mut self) -> Option<Round> {
        self.rounds.next()
    }
}

pub trait OnlineAlgorithm {
    fn name(&self) -> &str;
    /// Commits `S_t` using only rounds `< t`.
    fn decide(&mut self, t: usize, rng: &mut SeededRng) -> Result<SubsetMask>;
    /// Receives round `t` after `S_t` has been committed.
    fn observe(&mut self, round: &Round, rng: &mut SeededRng) -> Result<()>;
}

/// Round optimum `(S_t^⋆, f_t(S_t^⋆))`, used only for accounting.
pub trait RoundOracle: Send + Sync {
    fn optimum(&self, round: &Round) -> Result<(SubsetMask, f64)>;
}

#[derive(Clone, Debug)]
pub struct BruteForceOracle {
    pub family: FeasibleFamily,
}

impl BruteForceOracle {
    pub fn new(family: FeasibleFamily) -> Self {
        Self { family }
    }
}

impl RoundOracle for BruteForceOracle {
    fn optimum(&self, round: &Round) -> Result<(SubsetMask, f64)> {
        brute_force_min(&round.f, &self.family)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub horizon: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl RunConfig {
    pub fn new(horizon: usize, seed: u64) -> Self {
        Self {
            horizon,
            seed,
            alpha: 1.0,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// One CSV row. Missing optima leave the regret columns empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub algorithm: String,
    pub loss: f64,
    pub optimum: Option<f64>,
    pub alpha_regret_cum: Option<f64>,
    pub regret_time_avg: Option<f64>,
    pub variation_cum: Option<f64>,
    pub mask_hex: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: Vec<TraceRow>,
    pub decisions: Vec<SubsetMask>,
    pub ledger: RegretLedger,
    /// Variation of the round optima; empty without an oracle.
    pub variation: VariationLedger,
}

/// Runs `alg` for `cfg.horizon` rounds. The algorithm's randomness comes from
/// a generator seeded with `cfg.seed`.
pub fn run_online(
    stream: &mut dyn ProblemStream,
    alg: &mut dyn OnlineAlgorithm,
    cfg: &RunConfig,
    oracle: Option<&dyn RoundOracle>,
) -> Result<RunOutput> {
    if cfg.horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let mut rng = SeededRng::new(cfg.seed);
    let mut ledger = RegretLedger::new(cfg.alpha);
    let mut variation = VariationLedger::new();
    let mut trace = Vec::with_capacity(cfg.horizon);
    let mut decisions = Vec::with_capacity(cfg.horizon);
    let name = alg.name().to_string();

    for t in 1..=cfg.horizon {
        let s = alg.decide(t, &mut rng)?;
        let round = stream.next_round().ok_or(Error::Truncated {
            expected: cfg.horizon,
            got: t - 1,
        })?;
        if round.t != t {
            return Err(Error::Contract(format!(
                "stream delivered round {} while round {t} was expected",
                round.t
            )));
        }
        let loss = round.f.eval(&s)?;
        let optimum = match oracle {
            Some(o) => {
                let (s_star, v) = o.optimum(&round)?;
                variation.push(s_star)?;
                Some(v)
            }
            None => None,
        };
        ledger.push(loss, optimum);
        trace.push(TraceRow {
            t,
            algorithm: name.clone(),
            loss,
            optimum,
            alpha_regret_cum: ledger.cumulative_alpha_regret(),
            regret_time_avg: ledger.time_averaged(),
            variation_cum: oracle.map(|_| variation.cumulative()),
            mask_hex: s.to_hex(),
        });
        decisions.push(s);
        alg.observe(&round, &mut rng)?;
    }
    Ok(RunOutput {
        trace,
        decisions,
        ledger,
        variation,
    })
}

/// Runs `job` for every seed in parallel; results keep the seed order.
pub fn sweep_seeds<T, F>(seeds: &[u64], job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    seeds.par_iter().map(|&s| job(s)).collect()
}

pub fn write_trace_csv<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
