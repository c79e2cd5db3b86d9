use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::loss::{token_term, token_weights};
use crate::{dapo_loss, DapoConfig, LossReport, RlError, RolloutGroup};

/// Softmax over a fixed alphabet of edits. A candidate is a sequence of
/// edits drawn independently, so each token's log-probability is
/// `logit[e] - logsumexp(logits)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyEditPolicy {
    pub logits: Vec<f64>,
}

impl ToyEditPolicy {
    pub fn uniform(num_edits: usize) -> Self {
        ToyEditPolicy { logits: vec![0.0; num_edits] }
    }

    pub fn from_logits(logits: Vec<f64>) -> Self {
        ToyEditPolicy { logits }
    }

    pub fn num_edits(&self) -> usize {
        self.logits.len()
    }

    fn log_normalizer(&self) -> f64 {
        let m = self.logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + self.logits.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
    }

    pub fn probs(&self) -> Vec<f64> {
        let z = self.log_normalizer();
        self.logits.iter().map(|l| (l - z).exp()).collect()
    }

    pub fn log_prob(&self, edit: usize) -> f64 {
        self.logits[edit] - self.log_normalizer()
    }

    pub fn log_probs(&self, edits: &[usize]) -> Vec<f64> {
        let z = self.log_normalizer();
        edits.iter().map(|&e| self.logits[e] - z).collect()
    }

    /// Index of the most likely edit (lowest index on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &l) in self.logits.iter().enumerate() {
            if l > self.logits[best] {
                best = i;
            }
        }
        best
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let probs = self.probs();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Draws `len` edits; returns them with their log-probabilities.
    pub fn sample_sequence<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> (Vec<usize>, Vec<f64>) {
        let edits: Vec<usize> = (0..len).map(|_| self.sample(rng)).collect();
        let lps = self.log_probs(&edits);
        (edits, lps)
    }
}

fn with_current_logprobs(policy: &ToyEditPolicy, groups: &[RolloutGroup]) -> Result<Vec<RolloutGroup>, RlError> {
    groups
        .iter()
        .map(|g| {
            if g.tokens.len() != g.size() {
                return Err(RlError::ShapeMismatch(format!(
                    "prompt {}: {} token sequences for {} rewards",
                    g.prompt_id,
                    g.tokens.len(),
                    g.size()
                )));
            }
            if let Some(&e) = g.tokens.iter().flatten().find(|&&e| e >= policy.num_edits()) {
                return Err(RlError::ShapeMismatch(format!(
                    "prompt {}: edit {e} outside an alphabet of {}",
                    g.prompt_id,
                    policy.num_edits()
                )));
            }
            let mut g = g.clone();
            g.token_logprobs_new = g.tokens.iter().map(|t| policy.log_probs(t)).collect();
            Ok(g)
        })
        .collect()
}

/// The loss with new log-probabilities taken from `policy`.
pub fn policy_loss(policy: &ToyEditPolicy, groups: &[RolloutGroup], cfg: &DapoConfig) -> Result<LossReport, RlError> {
    dapo_loss(&with_current_logprobs(policy, groups)?, cfg)
}

/// Exact gradient of [`policy_loss`] with respect to the logits.
pub fn policy_gradient(policy: &ToyEditPolicy, groups: &[RolloutGroup], cfg: &DapoConfig) -> Result<Vec<f64>, RlError> {
    let groups = with_current_logprobs(policy, groups)?;
    let need_ref = cfg.kl_beta > 0.0;
    for g in &groups {
        g.check_shape(need_ref)?;
    }
    let probs = policy.probs();
    let weights = token_weights(&groups, cfg.aggregation);
    let mut grad = vec![0.0; policy.num_edits()];
    for (g, gw) in groups.iter().zip(&weights) {
        for i in 0..g.size() {
            for (t, &e) in g.tokens[i].iter().enumerate() {
                let lp_ref = if need_ref {
                    g.token_logprobs_ref.as_ref().map(|r| r[i][t])
                } else {
                    None
                };
                let tt = token_term(
                    g.token_logprobs_new[i][t],
                    g.token_logprobs_old[i][t],
                    lp_ref,
                    g.advantages[i],
                    cfg,
                );
                // d loss / d logprob of this token
                let dl = gw[i][t] * (-tt.dterm + cfg.kl_beta * tt.dkl);
                if dl == 0.0 {
                    continue;
                }
                // d logprob(e) / d logit_k = [k == e] - p_k
                for (k, gk) in grad.iter_mut().enumerate() {
                    *gk -= dl * probs[k];
                }
                grad[e] += dl;
            }
        }
    }
    Ok(grad)
}

/// One gradient-descent step on the loss; returns the loss before the step.
pub fn policy_step(
    policy: &mut ToyEditPolicy,
    groups: &[RolloutGroup],
    cfg: &DapoConfig,
    learning_rate: f64,
) -> Result<LossReport, RlError> {
    let report = policy_loss(policy, groups, cfg)?;
    let grad = policy_gradient(policy, groups, cfg)?;
    for (l, g) in policy.logits.iter_mut().zip(grad) {
        *l -= learning_rate * g;
    }
    Ok(report)
}
