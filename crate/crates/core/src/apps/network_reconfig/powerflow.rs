//! Polar Newton–Raphson power flow on a dense bus-admittance matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::graph::reachable_from_feeders;
use super::network::Network;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PfOptions {
    /// Largest acceptable power mismatch, per-unit.
    pub tolerance: f64,
    /// Largest number of Newton updates.
    pub max_iter: usize,
}

impl Default for PfOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PfSolution {
    pub voltages: Vec<Complex64>,
    /// From-end current per line; zero on open lines.
    pub branch_currents: Vec<Complex64>,
    /// From-end complex power per line; zero on open lines.
    pub branch_flows: Vec<Complex64>,
    /// Net complex injection `v_i·conj(I_i)` per bus.
    pub injections: Vec<Complex64>,
    pub energized: Vec<bool>,
    pub converged: bool,
    /// Mismatch evaluations, so a flat start that already balances counts 1.
    pub iterations: usize,
    pub max_mismatch: f64,
}

/// Solves the power flow with every feeder at `1∠0` and loads `p + jq`
/// (per-unit) at the other buses.
pub fn newton_raphson_pf(
    net: &Network,
    energized: &[bool],
    p: &[f64],
    q: &[f64],
    opts: PfOptions,
) -> Result<PfSolution> {
    let n = net.n_buses();
    for (len, expected) in [(energized.len(), net.n_lines()), (p.len(), n), (q.len(), n)] {
        if len != expected {
            return Err(Error::Dimension {
                expected,
                found: len,
            });
        }
    }
    let reach = reachable_from_feeders(net, energized);
    if let Some(b) = reach.iter().position(|r| !r) {
        return Err(Error::Topology(format!(
            "bus {} is not supplied by any feeder",
            net.bus_id(b)
        )));
    }

    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for (l, &on) in energized.iter().enumerate() {
        if !on {
            continue;
        }
        let (a, b) = net.ends(l);
        let yl = net.admittance(l);
        y[(a, a)] += yl;
        y[(b, b)] += yl;
        y[(a, b)] -= yl;
        y[(b, a)] -= yl;
    }
    let pq: Vec<usize> = (0..n).filter(|&b| !net.is_feeder(b)).collect();
    let m = pq.len();
    let spec: Vec<Complex64> = (0..n).map(|b| -Complex64::new(p[b], q[b])).collect();

    let mut vm = vec![1.0; n];
    let mut va = vec![0.0; n];
    let mut v: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    let mut iterations = 0;
    let mut converged = false;
    let mut max_mismatch;

    loop {
        iterations += 1;
        let current = currents(&y, &v);
        let mut f = DVector::<f64>::zeros(2 * m);
        for (k, &b) in pq.iter().enumerate() {
            let ds = v[b] * current[b].conj() - spec[b];
            f[k] = ds.re;
            f[m + k] = ds.im;
        }
        max_mismatch = f.iter().fold(0.0f64, |acc, x| {
            if x.is_nan() {
                f64::NAN
            } else {
                acc.max(x.abs())
            }
        });
        if max_mismatch < opts.tolerance {
            converged = true;
            break;
        }
        if iterations > opts.max_iter || !max_mismatch.is_finite() {
            break;
        }
        let j = jacobian(&y, &v, &current, &pq);
        let Some(dx) = j.lu().solve(&f) else {
            log::warn!("power flow: singular Jacobian at iteration {iterations}");
            break;
        };
        for (k, &b) in pq.iter().enumerate() {
            va[b] -= dx[k];
            vm[b] -= dx[m + k];
            v[b] = Complex64::from_polar(vm[b], va[b]);
        }
    }

    let mut branch_currents = vec![Complex64::new(0.0, 0.0); net.n_lines()];
    let mut branch_flows = branch_currents.clone();
    for (l, &on) in energized.iter().enumerate() {
        if on {
            let (a, b) = net.ends(l);
            let i = (v[a] - v[b]) * net.admittance(l);
            branch_currents[l] = i;
            branch_flows[l] = v[a] * i.conj();
        }
    }
    let current = currents(&y, &v);
    let injections = v
        .iter()
        .zip(&current)
        .map(|(vi, ii)| vi * ii.conj())
        .collect();
    Ok(PfSolution {
        voltages: v,
        branch_currents,
        branch_flows,
        injections,
        energized: energized.to_vec(),
        converged,
        iterations,
        max_mismatch,
    })
}

fn currents(y: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).fold(Complex64::new(0.0, 0.0), |acc, k| acc + y[(i, k)] * v[k]))
        .collect()
}

/// Real Jacobian `[[∂P/∂θ, ∂P/∂|v|], [∂Q/∂θ, ∂Q/∂|v|]]` restricted to the
/// load buses.
fn jacobian(
    y: &DMatrix<Complex64>,
    v: &[Complex64],
    current: &[Complex64],
    pq: &[usize],
) -> DMatrix<f64> {
    let m = pq.len();
    let j_unit = Complex64::new(0.0, 1.0);
    let mut jac = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for (r, &i) in pq.iter().enumerate() {
        for (c, &k) in pq.iter().enumerate() {
            let vn_k = v[k] / v[k].norm();
            let yv = y[(i, k)] * v[k];
            let mut ds_da = -j_unit * v[i] * yv.conj();
            let mut ds_dm = v[i] * (y[(i, k)] * vn_k).conj();
            if i == k {
                ds_da += j_unit * v[i] * current[i].conj();
                ds_dm += current[i].conj() * vn_k;
            }
            jac[(r, c)] = ds_da.re;
            jac[(r, m + c)] = ds_dm.re;
            jac[(m + r, c)] = ds_da.im;
            jac[(m + r, m + c)] = ds_dm.im;
        }
    }
    jac
}

/// `Σ_{energized} Re(|v_i − v_j|²·conj(y_ij))`.
pub fn active_losses(sol: &PfSolution, net: &Network) -> Result<f64> {
    if !sol.converged {
        return Err(Error::Contract(
            "losses requested from a non-converged power flow".into(),
        ));
    }
    let mut total = 0.0;
    for (l, &on) in sol.energized.iter().enumerate() {
        if on {
            let (a, b) = net.ends(l);
            let dv = sol.voltages[a] - sol.voltages[b];
            total += (dv.norm_sqr() * net.admittance(l).conj()).re;
        }
    }
    Ok(total)
}

/// Feeder generation minus demand minus losses, per-unit active power.
pub fn energy_imbalance(sol: &PfSolution, net: &Network, p: &[f64]) -> Result<f64> {
    let losses = active_losses(sol, net)?;
    let generation: f64 = (0..net.n_buses())
        .filter(|&b| net.is_feeder(b))
        .map(|b| sol.injections[b].re + p[b])
        .sum();
    let demand: f64 = p.iter().sum();
    Ok(generation - demand - losses)
}
