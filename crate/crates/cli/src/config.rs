//! Experiment configuration: file fields, defaults, flag overrides and the
//! validation gate that runs before any output is written.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subdyn::apps::demand_response::TclSpec;
use subdyn::apps::network_reconfig::{LoadNoise, Network};
use subdyn::signals::SignalConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Synthetic,
    DemandResponse,
    NetworkReconfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Osga,
    Osgga,
    Ospgd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Osga => "osga",
            Algorithm::Osgga => "osgga",
            Algorithm::Ospgd => "ospgd",
        }
    }
}

/// Random drifting instances over a small ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSection {
    pub n: usize,
    /// Half-width of the per-round random walk on the weights.
    pub drift: f64,
    /// Minimum loss after lifting, used by OSGA so ratios are defined.
    pub floor: f64,
    /// Sandwich factor of the generic approximation (OSGGA).
    pub gamma: f64,
    /// OSGGA decides among sets of exactly this size.
    pub k: usize,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        Self {
            n: 8,
            drift: 0.02,
            floor: 1.0,
            gamma: 1.5,
            k: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemandResponseSection {
    /// Fleet size when no fleet fixture is given.
    pub n_tcls: usize,
    pub signal: SignalConfig,
    pub dt_hours: f64,
}

impl Default for DemandResponseSection {
    fn default() -> Self {
        Self {
            n_tcls: 15,
            signal: SignalConfig::default(),
            dt_hours: 4.0 / 3600.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkReconfigSection {
    pub noise: LoadNoise,
    pub big_m: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for NetworkReconfigSection {
    fn default() -> Self {
        Self {
            noise: LoadNoise::default(),
            big_m: 1e6,
            tolerance: 1e-8,
            max_iter: 50,
        }
    }
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub algorithm: Algorithm,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Regret factor; OSGA on synthetic streams defaults to the audited β,
    /// everything else to 1.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Network file, or fleet file for demand response. Relative paths
    /// resolve against the config file's directory.
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: SyntheticSection,
    #[serde(default)]
    pub demand_response: DemandResponseSection,
    #[serde(default)]
    pub network_reconfig: NetworkReconfigSection,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub rounds: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Everything a run needs, loaded and checked.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub input: Input,
}

#[derive(Clone, Debug)]
pub enum Input {
    None,
    Fleet(Vec<TclSpec>),
    Network(Box<Network>),
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

fn invalid<T>(msg: impl Into<String>) -> Result<T, ValidationError> {
    Err(ValidationError(msg.into()))
}

/// Largest synthetic ground set: every round is solved by enumeration.
pub const SYNTHETIC_LIMIT: usize = 16;

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ValidationError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ValidationError(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| ValidationError(format!("{}: {e}", path.display())))?;
        if let (Some(f), Some(dir)) = (&cfg.fixture, path.parent()) {
            if f.is_relative() {
                cfg.fixture = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.rounds {
            self.horizon = t;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = o.delta {
            self.delta = d;
        }
        if let Some(a) = o.alpha {
            self.alpha = Some(a);
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
    }

    /// Checks every field and loads the fixture.
    pub fn prepare(self) -> Result<Prepared, ValidationError> {
        if self.horizon == 0 {
            return invalid("T must be at least 1");
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return invalid(format!(
                "delta must be positive and finite, got {}",
                self.delta
            ));
        }
        if let Some(a) = self.alpha {
            if !(a >= 1.0 && a.is_finite()) {
                return invalid(format!("alpha must be at least 1, got {a}"));
            }
        }
        let input = match self.kind {
            Kind::Synthetic => {
                let s = &self.synthetic;
                if s.n == 0 || s.n > SYNTHETIC_LIMIT {
                    return invalid(format!(
                        "synthetic.n must be in 1..={SYNTHETIC_LIMIT}, got {}",
                        s.n
                    ));
                }
                if !(s.drift >= 0.0 && s.drift.is_finite()) {
                    return invalid("synthetic.drift must be nonnegative");
                }
                if !(s.floor > 0.0 && s.floor.is_finite()) {
                    return invalid("synthetic.floor must be positive");
                }
                if !(s.gamma >= 1.0 && s.gamma.is_finite()) {
                    return invalid("synthetic.gamma must be at least 1");
                }
                if self.algorithm == Algorithm::Osgga && (s.k == 0 || s.k > s.n) {
                    return invalid(format!("synthetic.k must be in 1..={}, got {}", s.n, s.k));
                }
                if self.fixture.is_some() {
                    return invalid("synthetic experiments take no fixture");
                }
                Input::None
            }
            Kind::DemandResponse => {
                if self.algorithm != Algorithm::Ospgd {
                    return invalid("demand_response runs with algorithm ospgd");
                }
                let d = &self.demand_response;
                d.signal
                    .validate()
                    .map_err(|e| ValidationError(e.to_string()))?;
                if !(d.dt_hours > 0.0 && d.dt_hours.is_finite()) {
                    return invalid("demand_response.dt_hours must be positive");
                }
                match &self.fixture {
                    Some(path) => {
                        let fleet: Vec<TclSpec> = read_json(path)?;
                        check_fleet(&fleet)?;
                        Input::Fleet(fleet)
                    }
                    None => {
                        if d.n_tcls == 0 || d.n_tcls > subdyn::sets::ENUMERATION_LIMIT {
                            return invalid(format!(
                                "demand_response.n_tcls must be in 1..={}, got {}",
                                subdyn::sets::ENUMERATION_LIMIT,
                                d.n_tcls
                            ));
                        }
                        Input::None
                    }
                }
            }
            Kind::NetworkReconfig => {
                if self.algorithm != Algorithm::Osga {
                    return invalid("network_reconfig runs with algorithm osga");
                }
                let nr = &self.network_reconfig;
                if !(nr.big_m > 0.0 && nr.big_m.is_finite()) {
                    return invalid("network_reconfig.big_m must be positive");
                }
                if !(nr.tolerance > 0.0) || nr.max_iter == 0 {
                    return invalid("network_reconfig.tolerance and max_iter must be positive");
                }
                if !(nr.noise.noise_scale_p >= 0.0 && nr.noise.noise_scale_q >= 0.0) {
                    return invalid("noise scales must be nonnegative");
                }
                if !(nr.noise.grid_step > 0.0 && nr.noise.grid_step.is_finite()) {
                    return invalid("noise grid_step must be positive");
                }
                let Some(path) = &self.fixture else {
                    return invalid("network_reconfig needs a network fixture");
                };
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ValidationError(format!("cannot read {}: {e}", path.display())))?;
                let net = Network::from_json(&text)
                    .map_err(|e| ValidationError(format!("{}: {e}", path.display())))?;
                Input::Network(Box::new(net))
            }
        };
        Ok(Prepared {
            config: self,
            input,
        })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ValidationError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ValidationError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ValidationError(format!("{}: {e}", path.display())))
}

fn check_fleet(fleet: &[TclSpec]) -> Result<(), ValidationError> {
    if fleet.is_empty() || fleet.len() > subdyn::sets::ENUMERATION_LIMIT {
        return invalid(format!(
            "fleet size must be in 1..={}, got {}",
            subdyn::sets::ENUMERATION_LIMIT,
            fleet.len()
        ));
    }
    for (i, spec) in fleet.iter().enumerate() {
        spec.into_pair()
            .map_err(|e| ValidationError(format!("fleet[{i}]: {e}")))?;
    }
    Ok(())
}
