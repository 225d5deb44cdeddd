/// Dynamic α-regret ledger: `Σ_t (f_t(S_t) − α f_t(S_t*))`.
///
/// When a round has no known optimum the regret becomes unavailable from
/// that round on; losses are still recorded.
#[derive(Clone, Debug)]
pub struct RegretLedger {
    alpha: f64,
    epsilon: f64,
    per_round: Vec<(f64, Option<f64>)>,
    cumulative: Option<f64>,
}

impl RegretLedger {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            epsilon: 0.1,
            per_round: Vec::new(),
            cumulative: Some(0.0),
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn push(&mut self, loss: f64, optimum: Option<f64>) {
        self.cumulative = match (self.cumulative, optimum) {
            (Some(c), Some(o)) => Some(c + (loss - self.alpha * o)),
            _ => None,
        };
        self.per_round.push((loss, optimum));
    }

    pub fn rounds(&self) -> usize {
        self.per_round.len()
    }

    pub fn per_round(&self) -> &[(f64, Option<f64>)] {
        &self.per_round
    }

    pub fn cumulative_alpha_regret(&self) -> Option<f64> {
        self.cumulative
    }

    pub fn time_averaged(&self) -> Option<f64> {
        let t = self.per_round.len();
        self.cumulative.filter(|_| t > 0).map(|c| c / t as f64)
    }

    pub fn cumulative_loss(&self) -> f64 {
        self.per_round.iter().map(|r| r.0).fold(0.0, |a, x| a + x)
    }

    /// Regret after the first `t` rounds, recomputed from the per-round rows.
    pub fn regret_at(&self, t: usize) -> Option<f64> {
        self.per_round[..t.min(self.per_round.len())]
            .iter()
            .try_fold(0.0, |acc, &(loss, opt)| {
                opt.map(|o| acc + (loss - self.alpha * o))
            })
    }

    pub fn time_averaged_at(&self, t: usize) -> Option<f64> {
        (t > 0).then_some(())?;
        self.regret_at(t).map(|r| r / t as f64)
    }
}
