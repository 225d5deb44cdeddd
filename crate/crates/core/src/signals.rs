//! One-dimensional gradient noise and the regulation signal built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Seeded single-octave gradient-noise lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct PerlinTable {
    seed: u64,
    perm: Vec<u8>,
    grid_step: f64,
}

impl PerlinTable {
    pub fn new(seed: u64, grid_step: f64) -> Result<Self> {
        if !(grid_step > 0.0) || !grid_step.is_finite() {
            return Err(Error::Domain(format!(
                "grid_step must be positive, got {grid_step}"
            )));
        }
        let mut base: Vec<u8> = (0..=255).collect();
        SeededRng::new(seed).shuffle(&mut base);
        let mut perm = base.clone();
        perm.extend_from_slice(&base);
        Ok(Self {
            seed,
            perm,
            grid_step,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    /// The 256-entry permutation (stored twice for wraparound).
    pub fn permutation(&self) -> &[u8] {
        &self.perm[..256]
    }

    fn gradient(&self, cell: i64) -> f64 {
        let h = self.perm[cell.rem_euclid(256) as usize];
        h as f64 / 127.5 - 1.0
    }

    /// Noise at lattice coordinate `x`; zero on integers, within `[−1, 1]`.
    pub fn sample(&self, x: f64) -> f64 {
        let cell = x.floor();
        let u = x - cell;
        let i = cell as i64;
        let d0 = self.gradient(i) * u;
        let d1 = self.gradient(i.wrapping_add(1)) * (u - 1.0);
        let s = fade(u);
        2.0 * (d0 + s * (d1 - d0))
    }

    /// Noise for round `t`, sampled at `t · grid_step`.
    pub fn at_round(&self, t: f64) -> f64 {
        self.sample(t * self.grid_step)
    }
}

/// `6u⁵ − 15u⁴ + 10u³`.
fn fade(u: f64) -> f64 {
    u * u * u * (u * (u * 6.0 - 15.0) + 10.0)
}

pub fn perlin_sample(table: &PerlinTable, x: f64) -> f64 {
    table.sample(x)
}

/// Parameters of the decaying sinusoid plus noise.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalConfig {
    /// kW
    pub amplitude: f64,
    /// per round
    pub decay: f64,
    /// rounds
    pub period: f64,
    /// kW
    pub noise_scale: f64,
    pub noise_seed: u64,
    pub grid_step: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            amplitude: 40.0,
            decay: 1.0 / 800.0,
            period: 300.0,
            noise_scale: 3.0,
            noise_seed: 7,
            grid_step: 0.02,
        }
    }
}

impl SignalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0) || !(self.period > 0.0) {
            return Err(Error::Config(
                "signal amplitude and period must be positive".into(),
            ));
        }
        if !(self.decay >= 0.0) || !(self.noise_scale >= 0.0) {
            return Err(Error::Config(
                "signal decay and noise_scale must be nonnegative".into(),
            ));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::Config("signal grid_step must be positive".into()));
        }
        Ok(())
    }

    pub fn table(&self) -> Result<PerlinTable> {
        PerlinTable::new(self.noise_seed, self.grid_step)
    }
}

/// `A·e^{−λt}·sin(2πt/P) + σ·noise(t)`, unclamped.
pub fn regulation_signal(
    t: f64,
    amplitude: f64,
    decay: f64,
    period: f64,
    noise: &PerlinTable,
    noise_scale: f64,
) -> f64 {
    let envelope = if decay.is_infinite() {
        0.0
    } else {
        amplitude * (-decay * t).exp()
    };
    envelope * (2.0 * PI * t / period).sin() + noise_scale * noise.at_round(t)
}

/// Precomputed signal for rounds `1..=horizon`.
pub fn regulation_trace(cfg: &SignalConfig, horizon: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    let table = cfg.table()?;
    Ok((1..=horizon)
        .map(|t| {
            regulation_signal(
                t as f64,
                cfg.amplitude,
                cfg.decay,
                cfg.period,
                &table,
                cfg.noise_scale,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_complete() {
        let t = PerlinTable::new(11, 0.1).unwrap();
        let mut p = t.permutation().to_vec();
        p.sort_unstable();
        assert_eq!(p, (0..=255).collect::<Vec<u8>>());
        assert_eq!(&t.perm[256..], t.permutation());
        assert_ne!(
            t.permutation(),
            PerlinTable::new(12, 0.1).unwrap().permutation()
        );
    }

    #[test]
    fn vanishes_on_lattice() {
        let t = PerlinTable::new(3, 1.0).unwrap();
        for k in -300..300 {
            assert_eq!(t.sample(k as f64), 0.0);
        }
    }

    #[test]
    fn bounded_and_deterministic() {
        let a = PerlinTable::new(5, 0.01).unwrap();
        let b = PerlinTable::new(5, 0.01).unwrap();
        let mut peak: f64 = 0.0;
        for k in 0..1_000_000 {
            let x = k as f64 * 0.000_731 - 200.0;
            let v = a.sample(x);
            assert_eq!(v.to_bits(), b.sample(x).to_bits());
            peak = peak.max(v.abs());
        }
        assert!(peak <= 1.0);
        assert!(peak > 0.3);
    }

    #[test]
    fn continuous_across_cells() {
        let t = PerlinTable::new(9, 1.0).unwrap();
        for k in 0..50 {
            let x = k as f64;
            assert!((t.sample(x - 1e-9) - t.sample(x + 1e-9)).abs() < 1e-7);
        }
    }

    #[test]
    fn signal_examples() {
        let table = PerlinTable::new(1, 0.02).unwrap();
        let r = regulation_signal(150.0, 40.0, 0.001, 300.0, &table, 0.0);
        assert!(r.abs() < 1e-12);
        let pure = regulation_signal(37.0, 40.0, f64::INFINITY, 300.0, &table, 2.0);
        assert_eq!(pure, 2.0 * table.at_round(37.0));
        for t in 1..3000 {
            let t = t as f64;
            let r = regulation_signal(t, 40.0, 0.002, 300.0, &table, 0.0);
            assert!(r.abs() <= 40.0 * (-0.002 * t).exp() + 1e-12);
        }
    }

    #[test]
    fn trace_is_reproducible() {
        let cfg = SignalConfig::default();
        let a = regulation_trace(&cfg, 3000).unwrap();
        let b = regulation_trace(&cfg, 3000).unwrap();
        assert_eq!(a.len(), 3000);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
