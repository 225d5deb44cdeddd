//! Closed-form regret bounds used by the numeric audits.

/// `(α L / β) · Ṽ_T` for OSGA with a β-approximation.
pub fn greedy_bound(alpha: f64, lipschitz: f64, beta: f64, variation: f64) -> f64 {
    alpha * lipschitz / beta * variation
}

/// `(γ² L̃ᵍ L / ν) · Ṽᵍ_T` for OSGGA with a generic approximation.
pub fn generic_greedy_bound(
    gamma: f64,
    generic_lipschitz: f64,
    lipschitz: f64,
    nu: f64,
    variation: f64,
) -> f64 {
    gamma * gamma * generic_lipschitz * lipschitz / nu * variation
}

/// `α (√n δ V_T + 5n/(2δ) + 4Mδ) √T` for OSPGD with `η = δ/√T`.
pub fn ospgd_bound(
    alpha: f64,
    n: usize,
    delta: f64,
    variation: f64,
    bound_m: f64,
    horizon: usize,
) -> f64 {
    let n = n as f64;
    alpha
        * (n.sqrt() * delta * variation + 5.0 * n / (2.0 * delta) + 4.0 * bound_m * delta)
        * (horizon as f64).sqrt()
}

/// Expected dynamic regret of OSPGD with an unbiased rounding map.
pub fn ospgd_expected_bound(
    n: usize,
    delta: f64,
    variation: f64,
    bound_m: f64,
    horizon: usize,
) -> f64 {
    let (n, t) = (n as f64, horizon as f64);
    (n * t).sqrt() * delta * variation
        + (5.0 * n / (2.0 * delta) + 4.0 * bound_m * delta) * t.sqrt()
}

/// Regret level exceeded with probability at most `epsilon`.
pub fn ospgd_high_probability_bound(
    n: usize,
    delta: f64,
    variation: f64,
    bound_m: f64,
    horizon: usize,
    epsilon: f64,
) -> f64 {
    let (nf, t) = (n as f64, horizon as f64);
    (nf * t).sqrt() * delta * variation
        + (5.0 * nf / (2.0 * delta)
            + 4.0 * bound_m * delta
            + 2.0 * bound_m * delta * (1.0 / epsilon).ln())
            * t.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_bound_is_the_general_bound_at_alpha_one() {
        let a = ospgd_bound(1.0, 8, 1.0, 3.5, 2.0, 400);
        let b = ospgd_expected_bound(8, 1.0, 3.5, 2.0, 400);
        assert!((a - b).abs() < 1e-9 * a);
        // √8·3.5·20 + 20·20 + 8·20
        let by_hand = 8f64.sqrt() * 3.5 * 20.0 + 400.0 + 160.0;
        assert!((a - by_hand).abs() < 1e-9);
    }

    #[test]
    fn high_probability_bound_exceeds_expected() {
        let e = ospgd_expected_bound(8, 1.0, 2.0, 1.0, 100);
        let h = ospgd_high_probability_bound(8, 1.0, 2.0, 1.0, 100, 0.1);
        assert!((h - e - 2.0 * 10f64.ln() * 10.0).abs() < 1e-9);
    }

    #[test]
    fn greedy_bounds() {
        assert_eq!(greedy_bound(2.0, 3.0, 1.5, 4.0), 16.0);
        assert_eq!(generic_greedy_bound(2.0, 1.5, 3.0, 0.5, 2.0), 72.0);
    }
}
