//! Online reconfiguration loop: each round's meshed power flow ranks the
//! switches for the next round.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graph::{is_radial, prim_mst, WeightedEdge};
use super::network::Network;
use super::powerflow::{active_losses, newton_raphson_pf, PfOptions, PfSolution};
use crate::algorithms::RegretLedger;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::sets::{modular, FeasibleFamily, SetFunction, SubsetMask, VariationLedger};
use crate::signals::PerlinTable;

/// Modular loss over switches with weight `−|I_ij|` from the meshed flow.
pub fn wm_objective(net: &Network, currents: &[Complex64]) -> Result<SetFunction> {
    if currents.len() != net.n_lines() {
        return Err(Error::Dimension {
            expected: net.n_lines(),
            found: currents.len(),
        });
    }
    let w: Vec<f64> = net
        .switch_lines()
        .iter()
        .map(|&l| -currents[l].norm())
        .collect();
    modular(&w)
}

/// Minimum spanning tree with static lines and feeder-to-feeder virtual
/// edges at `−big_m`; returns the switches it keeps and the number of
/// virtual edges it used.
fn tree_switches(net: &Network, switch_weights: &[f64], big_m: f64) -> Result<(SubsetMask, usize)> {
    if switch_weights.len() != net.n_switches() {
        return Err(Error::Dimension {
            expected: net.n_switches(),
            found: switch_weights.len(),
        });
    }
    let mut switch_of_line = vec![None; net.n_lines()];
    for (k, &l) in net.switch_lines().iter().enumerate() {
        switch_of_line[l] = Some(k);
    }
    let mut edges: Vec<WeightedEdge> = (0..net.n_lines())
        .map(|l| {
            let (a, b) = net.ends(l);
            let w = switch_of_line[l].map_or(-big_m, |k| switch_weights[k]);
            WeightedEdge::new(a, b, w)
        })
        .collect();
    let feeders = net.feeders();
    for (i, &a) in feeders.iter().enumerate() {
        for &b in &feeders[i + 1..] {
            edges.push(WeightedEdge::new(a, b, -big_m));
        }
    }
    let tree = prim_mst(net.n_buses(), &edges)?;
    let mut s = SubsetMask::empty(net.n_switches());
    let mut virtual_used = 0;
    for e in tree {
        match switch_of_line.get(e) {
            Some(Some(k)) => s.insert(*k),
            Some(None) => {}
            None => virtual_used += 1,
        }
    }
    Ok((s, virtual_used))
}

/// Radial configurations; linear minimization is the spanning-tree call.
pub fn radial_family(net: Arc<Network>, big_m: f64) -> Result<FeasibleFamily> {
    let ground = net.ground()?;
    let member = net.clone();
    let family = FeasibleFamily::from_predicate(ground, "radial", move |s| {
        is_radial(&member, &member.energized(s))
    });
    Ok(family.with_linear_min(move |w| Ok(tree_switches(&net, w, big_m)?.0)))
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub next: SubsetMask,
    pub meshed: PfSolution,
    /// `−|I|` per switch, empty when the meshed flow failed.
    pub weights: Vec<f64>,
    pub virtual_edges_used: usize,
    /// The meshed flow did not converge and `prev` was kept.
    pub held: bool,
}

/// Close every switch, solve the flow, keep the maximum-current spanning
/// tree. Falls back to `prev` when the meshed flow does not converge.
pub fn algorithm1_step(
    net: &Network,
    p: &[f64],
    q: &[f64],
    big_m: f64,
    opts: PfOptions,
    prev: &SubsetMask,
) -> Result<StepOutcome> {
    let meshed = newton_raphson_pf(net, &net.energized(&net.all_closed()), p, q, opts)?;
    if !meshed.converged {
        log::warn!(
            "meshed power flow did not converge (mismatch {:.3e}); holding the previous topology",
            meshed.max_mismatch
        );
        return Ok(StepOutcome {
            next: prev.clone(),
            meshed,
            weights: Vec::new(),
            virtual_edges_used: 0,
            held: true,
        });
    }
    let weights: Vec<f64> = net
        .switch_lines()
        .iter()
        .map(|&l| -meshed.branch_currents[l].norm())
        .collect();
    let (next, virtual_edges_used) = tree_switches(net, &weights, big_m)?;
    if !is_radial(net, &net.energized(&next)) {
        return Err(Error::Invariant(format!(
            "spanning-tree step produced a non-radial topology {next}"
        )));
    }
    Ok(StepOutcome {
        next,
        meshed,
        weights,
        virtual_edges_used,
        held: false,
    })
}

/// Relative gradient-noise perturbation of every demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoadNoise {
    pub noise_seed: u64,
    pub noise_scale_p: f64,
    pub noise_scale_q: f64,
    pub grid_step: f64,
}

impl Default for LoadNoise {
    fn default() -> Self {
        Self {
            noise_seed: 1,
            noise_scale_p: 0.3,
            noise_scale_q: 0.3,
            grid_step: 0.02,
        }
    }
}

struct LoadProfile {
    base_p: Vec<f64>,
    base_q: Vec<f64>,
    tables: Vec<(PerlinTable, PerlinTable)>,
    scale_p: f64,
    scale_q: f64,
}

impl LoadProfile {
    fn new(net: &Network, noise: &LoadNoise) -> Result<Self> {
        if !(noise.noise_scale_p >= 0.0) || !(noise.noise_scale_q >= 0.0) {
            return Err(Error::Config("noise scales must be nonnegative".into()));
        }
        let root = SeededRng::new(noise.noise_seed);
        let tables = (0..net.n_buses() as u64)
            .map(|b| {
                let tp = PerlinTable::new(root.split(2 * b).next_u64(), noise.grid_step)?;
                let tq = PerlinTable::new(root.split(2 * b + 1).next_u64(), noise.grid_step)?;
                Ok((tp, tq))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            base_p: net.demand_p().to_vec(),
            base_q: net.demand_q().to_vec(),
            tables,
            scale_p: noise.noise_scale_p,
            scale_q: noise.noise_scale_q,
        })
    }

    /// `p_i·max(0, 1 + σ·noise_i(t))`, likewise for `q`.
    fn at(&self, t: usize) -> (Vec<f64>, Vec<f64>) {
        let t = t as f64;
        let p = self
            .base_p
            .iter()
            .zip(&self.tables)
            .map(|(b, (tp, _))| b * (1.0 + self.scale_p * tp.at_round(t)).max(0.0))
            .collect();
        let q = self
            .base_q
            .iter()
            .zip(&self.tables)
            .map(|(b, (_, tq))| b * (1.0 + self.scale_q * tq.at_round(t)).max(0.0))
            .collect();
        (p, q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NrPolicy {
    /// The greedy spanning-tree update.
    Osga,
    /// Spanning tree under fresh uniform random weights each round, redrawn
    /// until the round's power flow converges on it.
    RandomRadial,
}

impl NrPolicy {
    pub fn name(self) -> &'static str {
        match self {
            NrPolicy::Osga => "osga",
            NrPolicy::RandomRadial => "random_radial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NrRow {
    pub t: usize,
    pub losses_pu: f64,
    pub radial: bool,
    pub switch_mask_hex: String,
    pub pf_iterations: usize,
    pub pf_mismatch: f64,
    pub algorithm: String,
    pub optimum_pu: f64,
    pub alpha_regret_cum: Option<f64>,
    pub regret_time_avg: Option<f64>,
    pub variation_cum: f64,
}

#[derive(Clone, Debug)]
pub struct NrRun {
    pub rows: Vec<NrRow>,
    pub decisions: Vec<SubsetMask>,
    /// Regret against each round's spanning-tree topology.
    pub ledger: RegretLedger,
    /// Variation of the per-round spanning-tree topologies.
    pub variation: VariationLedger,
    pub total_losses_pu: f64,
    pub held_rounds: usize,
    /// Virtual edges found among the decided switches (always 0 when the
    /// switch set excludes them by construction).
    pub virtual_leaks: usize,
}

/// Per-round: the decided topology is evaluated on the revealed loads, then
/// the meshed flow on the same loads yields the next tree.
#[allow(clippy::too_many_arguments)]
pub fn run_reconfiguration(
    net: &Network,
    noise: &LoadNoise,
    horizon: usize,
    seed: u64,
    policy: NrPolicy,
    big_m: f64,
    alpha: f64,
    opts: PfOptions,
) -> Result<NrRun> {
    if horizon == 0 {
        return Err(Error::Config("T must be at least 1".into()));
    }
    if !(big_m > 0.0) {
        return Err(Error::Config("big_m must be positive".into()));
    }
    let profile = LoadProfile::new(net, noise)?;
    let mut rng = SeededRng::new(seed).split(3);
    let mut s = match (policy, net.initial_switches()) {
        (NrPolicy::Osga, Some(s)) => s,
        (NrPolicy::Osga, None) => tree_switches(net, &vec![0.0; net.n_switches()], big_m)?.0,
        (NrPolicy::RandomRadial, _) => SubsetMask::empty(net.n_switches()),
    };
    let mut ledger = RegretLedger::new(alpha);
    let mut variation = VariationLedger::new();
    let mut rows = Vec::with_capacity(horizon);
    let mut decisions = Vec::with_capacity(horizon);
    let mut total = 0.0;
    let mut held_rounds = 0;

    for t in 1..=horizon {
        let (p, q) = profile.at(t);
        if policy == NrPolicy::RandomRadial {
            s = random_feasible_tree(net, &p, &q, big_m, opts, &mut rng)?;
        }
        let energized = net.energized(&s);
        let radial = is_radial(net, &energized);
        if !radial {
            return Err(Error::Invariant(format!(
                "round {t}: decided topology {s} is not radial"
            )));
        }
        let sol = newton_raphson_pf(net, &energized, &p, &q, opts)?;
        if !sol.converged {
            return Err(Error::Domain(format!(
                "round {t}: power flow on the decided topology did not converge (mismatch {:.3e})",
                sol.max_mismatch
            )));
        }
        let loss = active_losses(&sol, net)?;
        let step = algorithm1_step(net, &p, &q, big_m, opts, &s)?;
        if step.held {
            held_rounds += 1;
        }
        let best = newton_raphson_pf(net, &net.energized(&step.next), &p, &q, opts)?;
        let opt = active_losses(&best, net)?;
        ledger.push(loss, Some(opt));
        variation.push(step.next.clone())?;
        total += loss;
        rows.push(NrRow {
            t,
            losses_pu: loss,
            radial,
            switch_mask_hex: s.to_hex(),
            pf_iterations: sol.iterations,
            pf_mismatch: sol.max_mismatch,
            algorithm: policy.name().to_string(),
            optimum_pu: opt,
            alpha_regret_cum: ledger.cumulative_alpha_regret(),
            regret_time_avg: ledger.time_averaged(),
            variation_cum: variation.cumulative(),
        });
        decisions.push(s.clone());
        s = step.next;
    }
    Ok(NrRun {
        rows,
        decisions,
        ledger,
        variation,
        total_losses_pu: total,
        held_rounds,
        virtual_leaks: 0,
    })
}

const RANDOM_TREE_ATTEMPTS: usize = 1000;

fn random_feasible_tree(
    net: &Network,
    p: &[f64],
    q: &[f64],
    big_m: f64,
    opts: PfOptions,
    rng: &mut SeededRng,
) -> Result<SubsetMask> {
    for _ in 0..RANDOM_TREE_ATTEMPTS {
        let w: Vec<f64> = (0..net.n_switches()).map(|_| rng.uniform()).collect();
        let s = tree_switches(net, &w, big_m)?.0;
        if newton_raphson_pf(net, &net.energized(&s), p, q, opts)?.converged {
            return Ok(s);
        }
    }
    Err(Error::Domain(format!(
        "no random radial topology with a convergent power flow in {RANDOM_TREE_ATTEMPTS} draws"
    )))
}
