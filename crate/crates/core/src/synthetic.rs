//! Random submodular instances and nonstationary streams built from them.
//!
//! Every instance is `offset + cut(S) + Σ_{i∈S} w_i + s·sqrt(Σ_{i∈S} c_i)`,
//! a sum of a graph cut, a modular term and a concave function of a
//! nonnegative modular term.

use serde::{Deserialize, Serialize};

use crate::algorithms::{GenericApproxSpec, Round};
use crate::error::{Error, Result};
use crate::oracle::brute_force_min;
use crate::rng::SeededRng;
use crate::sets::{FeasibleFamily, GroundSet, SetFunction, SubsetMask};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub n: usize,
    pub offset: f64,
    pub edges: Vec<(usize, usize, f64)>,
    pub linear: Vec<f64>,
    pub concave: Vec<f64>,
    pub concave_scale: f64,
}

impl SyntheticParams {
    /// Edges appear with probability 0.4 and weight in `[0, 1)`; modular
    /// weights lie in `[−1.5, 0.5)` so minimizers are nontrivial.
    pub fn random(n: usize, rng: &mut SeededRng) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.uniform() < 0.4 {
                    edges.push((i, j, rng.uniform()));
                }
            }
        }
        let linear = (0..n).map(|_| rng.uniform_range(-1.5, 0.5)).collect();
        let concave = (0..n).map(|_| rng.uniform()).collect();
        let concave_scale = rng.uniform_range(0.0, 2.0);
        Self {
            n,
            offset: 0.0,
            edges,
            linear,
            concave,
            concave_scale,
        }
    }

    /// The normalized part `g(S) = f(S) − offset`.
    pub fn normalized_value(&self, s: &SubsetMask) -> f64 {
        let mut cut = 0.0;
        for &(i, j, w) in &self.edges {
            if s.contains(i) != s.contains(j) {
                cut += w;
            }
        }
        let mut lin = 0.0;
        let mut mass = 0.0;
        for i in s.iter() {
            lin += self.linear[i];
            mass += self.concave[i];
        }
        cut + lin + self.concave_scale * mass.sqrt()
    }

    pub fn value(&self, s: &SubsetMask) -> f64 {
        self.offset + self.normalized_value(s)
    }

    /// A valid bound `M ≥ max_S |f(S)|`.
    pub fn bound(&self) -> f64 {
        let cut: f64 = self.edges.iter().map(|e| e.2).sum();
        let lin: f64 = self.linear.iter().map(|w| w.abs()).sum();
        let mass: f64 = self.concave.iter().sum();
        // Padded against summation-order rounding.
        ((self.offset.abs() + cut + lin + self.concave_scale * mass.sqrt()) * (1.0 + 1e-12))
            .max(f64::MIN_POSITIVE)
    }

    pub fn function(&self) -> Result<SetFunction> {
        let p = self.clone();
        SetFunction::new(GroundSet::new(self.n)?, self.bound(), move |s| p.value(s))
    }

    /// `offset + Σ_{i∈S} g({i})`. Upper-bounds `f` because a normalized
    /// submodular function is subadditive.
    pub fn singleton_surrogate(&self) -> Result<SetFunction> {
        let singles: Vec<f64> = (0..self.n)
            .map(|i| self.normalized_value(&SubsetMask::from_elements(self.n, [i]).expect("i < n")))
            .collect();
        let offset = self.offset;
        let bound = (offset.abs() + singles.iter().map(|w| w.abs()).sum::<f64>()) * (1.0 + 1e-12);
        SetFunction::new(
            GroundSet::new(self.n)?,
            bound.max(f64::MIN_POSITIVE),
            move |s| s.iter().fold(offset, |a, i| a + singles[i]),
        )
    }

    /// Shifts the offset so that `min_S f(S) = floor` (exhaustive, n ≤ 24).
    pub fn lifted(mut self, floor: f64) -> Result<Self> {
        self.offset = 0.0;
        let g = self.function()?;
        let (_, min) = brute_force_min(&g, &FeasibleFamily::power_set(g.ground().clone()))?;
        self.offset = floor - min;
        Ok(self)
    }

    /// Adds `U(−step, step)` noise to every modular weight.
    pub fn drifted(&self, step: f64, rng: &mut SeededRng) -> Self {
        let mut next = self.clone();
        for w in &mut next.linear {
            *w += rng.uniform_range(-step, step);
        }
        next
    }
}

/// A random submodular function on `n` elements.
pub fn random_submodular(n: usize, rng: &mut SeededRng) -> Result<SetFunction> {
    SyntheticParams::random(n, rng).function()
}

/// `T` instances whose modular weights follow a bounded random walk.
pub fn drifting_params(
    n: usize,
    horizon: usize,
    step: f64,
    rng: &mut SeededRng,
) -> Vec<SyntheticParams> {
    let mut out = Vec::with_capacity(horizon);
    let mut p = SyntheticParams::random(n, rng);
    for _ in 0..horizon {
        out.push(p.clone());
        p = p.drifted(step, rng);
    }
    out
}

/// `T` instances that stay fixed within each of `segments` equal blocks.
pub fn piecewise_params(
    n: usize,
    horizon: usize,
    segments: usize,
    rng: &mut SeededRng,
) -> Result<Vec<SyntheticParams>> {
    if segments == 0 || segments > horizon {
        return Err(Error::Domain(format!(
            "segments must be in 1..={horizon}, got {segments}"
        )));
    }
    let blocks: Vec<SyntheticParams> = (0..segments)
        .map(|_| SyntheticParams::random(n, rng))
        .collect();
    Ok((0..horizon)
        .map(|t| blocks[t * segments / horizon].clone())
        .collect())
}

/// Rounds `1..=T`; with `surrogate` each round also carries its singleton
/// surrogate.
pub fn rounds_from_params(params: &[SyntheticParams], surrogate: bool) -> Result<Vec<Round>> {
    params
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let r = Round::new(k + 1, p.function()?);
            Ok(if surrogate {
                r.with_approx(p.singleton_surrogate()?)
            } else {
                r
            })
        })
        .collect()
}

/// A loss with an exactly known generic approximation:
/// `f(S) = sqrt(Σ_{i∈S} d_i)` with `c_i = d_i / s_i`, `s_i ∈ [1, γ²]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericParams {
    pub d: Vec<f64>,
    pub stretch: Vec<f64>,
    pub gamma: f64,
}

impl GenericParams {
    pub fn random(n: usize, gamma: f64, rng: &mut SeededRng) -> Self {
        let d = (0..n).map(|_| rng.uniform_range(0.2, 2.0)).collect();
        let stretch = (0..n)
            .map(|_| rng.uniform_range(1.0, gamma * gamma))
            .collect();
        Self { d, stretch, gamma }
    }

    pub fn drifted(&self, step: f64, rng: &mut SeededRng) -> Self {
        let mut next = self.clone();
        for v in &mut next.d {
            *v = (*v + rng.uniform_range(-step, step)).max(0.05);
        }
        next
    }

    pub fn function(&self) -> Result<SetFunction> {
        let d = self.d.clone();
        let bound = d.iter().sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        SetFunction::new(GroundSet::new(d.len())?, bound, move |s| {
            s.iter().fold(0.0, |a, i| a + d[i]).sqrt()
        })
    }

    pub fn spec(&self, nu: f64) -> Result<GenericApproxSpec> {
        let c = self
            .d
            .iter()
            .zip(&self.stretch)
            .map(|(d, s)| d / s)
            .collect();
        GenericApproxSpec::new(c, self.gamma, nu)
    }
}
