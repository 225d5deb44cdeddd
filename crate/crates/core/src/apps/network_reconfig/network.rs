//! Network description, validation and per-unit conversion.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graph::{is_radial, reachable_from_feeders};
use crate::error::{Error, Result};
use crate::sets::{GroundSet, SubsetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    Slack,
    Load,
}

/// Bus entry of the network file; `p` in kW, `q` in kvar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusSpec {
    pub id: i64,
    pub kind: BusKind,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub feeder: bool,
}

/// Line entry; `r`, `x` in ohms. `closed` sets the initial state of a switch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub from: i64,
    pub to: i64,
    pub r: f64,
    pub x: f64,
    pub switched: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub buses: Vec<BusSpec>,
    pub lines: Vec<LineSpec>,
    pub base_mva: f64,
    pub base_kv: f64,
}

/// Validated network in per-unit, buses and lines indexed from 0.
#[derive(Clone, Debug)]
pub struct Network {
    ids: Vec<i64>,
    feeder: Vec<bool>,
    p: Vec<f64>,
    q: Vec<f64>,
    ends: Vec<(usize, usize)>,
    admittance: Vec<Complex64>,
    switched: Vec<bool>,
    switch_lines: Vec<usize>,
    initial_closed: Vec<Option<bool>>,
    base_mva: f64,
    base_kv: f64,
}

impl Network {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NetworkSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &NetworkSpec) -> Result<Self> {
        let bad = |m: String| Error::Config(m);
        if !(spec.base_mva > 0.0) || !(spec.base_kv > 0.0) {
            return Err(bad("base_mva and base_kv must be positive".into()));
        }
        let mut index = HashMap::new();
        for (k, b) in spec.buses.iter().enumerate() {
            if index.insert(b.id, k).is_some() {
                return Err(bad(format!("duplicate bus id {}", b.id)));
            }
            if (b.kind == BusKind::Slack) != b.feeder {
                return Err(bad(format!(
                    "bus {}: feeders must be exactly the slack buses",
                    b.id
                )));
            }
            if !(b.p >= 0.0) || !(b.q >= 0.0) || !b.p.is_finite() || !b.q.is_finite() {
                return Err(bad(format!(
                    "bus {}: demands must be finite and nonnegative",
                    b.id
                )));
            }
        }
        if !spec.buses.iter().any(|b| b.feeder) {
            return Err(bad("network has no feeder".into()));
        }
        let z_base = spec.base_kv * spec.base_kv / spec.base_mva;
        let s_base_kw = spec.base_mva * 1000.0;
        let mut ends = Vec::new();
        let mut admittance = Vec::new();
        for (k, l) in spec.lines.iter().enumerate() {
            let lookup = |id: i64| {
                index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| bad(format!("line {k}: unknown bus {id}")))
            };
            let (a, b) = (lookup(l.from)?, lookup(l.to)?);
            if a == b {
                return Err(bad(format!("line {k}: from and to coincide")));
            }
            let z = Complex64::new(l.r, l.x) / z_base;
            if !(z.norm() > 0.0) || !z.re.is_finite() || !z.im.is_finite() || l.r < 0.0 {
                return Err(bad(format!(
                    "line {k}: impedance must be finite and nonzero with r >= 0"
                )));
            }
            ends.push((a, b));
            admittance.push(z.inv());
        }
        let net = Self {
            ids: spec.buses.iter().map(|b| b.id).collect(),
            feeder: spec.buses.iter().map(|b| b.feeder).collect(),
            p: spec.buses.iter().map(|b| b.p / s_base_kw).collect(),
            q: spec.buses.iter().map(|b| b.q / s_base_kw).collect(),
            switched: spec.lines.iter().map(|l| l.switched).collect(),
            switch_lines: spec
                .lines
                .iter()
                .enumerate()
                .filter(|(_, l)| l.switched)
                .map(|(k, _)| k)
                .collect(),
            initial_closed: spec.lines.iter().map(|l| l.closed).collect(),
            ends,
            admittance,
            base_mva: spec.base_mva,
            base_kv: spec.base_kv,
        };
        net.check_structure()?;
        Ok(net)
    }

    /// Static lines must form a forest with at most one feeder per tree,
    /// and closing every switch must supply every bus.
    fn check_structure(&self) -> Result<()> {
        let all = vec![true; self.n_lines()];
        if !reachable_from_feeders(self, &all).iter().all(|&r| r) {
            return Err(Error::Config(
                "some bus is unreachable even with every switch closed".into(),
            ));
        }
        let static_only: Vec<bool> = self.switched.iter().map(|s| !s).collect();
        let mut parent: Vec<usize> = (0..self.n_buses()).collect();
        fn root(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for (k, &(a, b)) in self.ends.iter().enumerate() {
            if !static_only[k] {
                continue;
            }
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return Err(Error::Config(format!(
                    "static lines contain a cycle through line {k}"
                )));
            }
            parent[ra] = rb;
        }
        let mut feeders_per_root = HashMap::new();
        for bus in (0..self.n_buses()).filter(|&b| self.feeder[b]) {
            let r = root(&mut parent, bus);
            let c = feeders_per_root.entry(r).or_insert(0usize);
            *c += 1;
            if *c > 1 {
                return Err(Error::Config("static lines connect two feeders".into()));
            }
        }
        Ok(())
    }

    pub fn n_buses(&self) -> usize {
        self.ids.len()
    }

    pub fn n_lines(&self) -> usize {
        self.ends.len()
    }

    pub fn n_feeders(&self) -> usize {
        self.feeder.iter().filter(|&&f| f).count()
    }

    pub fn n_switches(&self) -> usize {
        self.switch_lines.len()
    }

    pub fn bus_id(&self, bus: usize) -> i64 {
        self.ids[bus]
    }

    pub fn is_feeder(&self, bus: usize) -> bool {
        self.feeder[bus]
    }

    pub fn feeders(&self) -> Vec<usize> {
        (0..self.n_buses()).filter(|&b| self.feeder[b]).collect()
    }

    /// Nominal demands in per-unit.
    pub fn demand_p(&self) -> &[f64] {
        &self.p
    }

    pub fn demand_q(&self) -> &[f64] {
        &self.q
    }

    pub fn ends(&self, line: usize) -> (usize, usize) {
        self.ends[line]
    }

    pub fn admittance(&self, line: usize) -> Complex64 {
        self.admittance[line]
    }

    pub fn is_switched(&self, line: usize) -> bool {
        self.switched[line]
    }

    /// Line index of each switch; switch `k` is ground-set element `k`.
    pub fn switch_lines(&self) -> &[usize] {
        &self.switch_lines
    }

    pub fn ground(&self) -> Result<GroundSet> {
        GroundSet::with_labels(
            self.switch_lines
                .iter()
                .map(|&l| format!("{}-{}", self.ids[self.ends[l].0], self.ids[self.ends[l].1]))
                .collect(),
        )
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn base_kv(&self) -> f64 {
        self.base_kv
    }

    /// Static lines plus the closed switches.
    pub fn energized(&self, closed: &SubsetMask) -> Vec<bool> {
        let mut on: Vec<bool> = self.switched.iter().map(|s| !s).collect();
        for k in closed.iter() {
            on[self.switch_lines[k]] = true;
        }
        on
    }

    pub fn all_closed(&self) -> SubsetMask {
        SubsetMask::full(self.n_switches())
    }

    /// Switch states from the file when every switch is given and the
    /// result is radial.
    pub fn initial_switches(&self) -> Option<SubsetMask> {
        let mut s = SubsetMask::empty(self.n_switches());
        for (k, &l) in self.switch_lines.iter().enumerate() {
            match self.initial_closed[l] {
                Some(true) => s.insert(k),
                Some(false) => {}
                None => return None,
            }
        }
        is_radial(self, &self.energized(&s)).then_some(s)
    }
}
