use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RlError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// How per-token surrogate terms are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Every token in the batch weighs the same.
    #[default]
    Token,
    /// Mean per response, then mean over responses.
    Response,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DapoConfig {
    pub eps_low: f64,
    pub eps_high: f64,
    pub adv_epsilon: f64,
    /// Weight of the KL penalty towards the reference policy.
    pub kl_beta: f64,
    pub overlong_threshold: usize,
    pub overlong_buffer: usize,
    pub overlong_max_penalty: f64,
    pub aggregation: Aggregation,
    /// Drop groups whose rewards are all equal. Off by default: with
    /// continuous rewards such groups are rare and carry no gradient anyway.
    pub dynamic_sampling: bool,
}

impl Default for DapoConfig {
    fn default() -> Self {
        DapoConfig {
            eps_low: 0.2,
            eps_high: 0.28,
            adv_epsilon: 1e-8,
            kl_beta: 0.0,
            overlong_threshold: 16,
            overlong_buffer: 8,
            overlong_max_penalty: -1.0,
            aggregation: Aggregation::Token,
            dynamic_sampling: false,
        }
    }
}

impl DapoConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.eps_low > 0.0 && self.eps_low <= self.eps_high) {
            return Err(format!(
                "need 0 < eps_low <= eps_high, got {} and {}",
                self.eps_low, self.eps_high
            ));
        }
        if !(self.adv_epsilon > 0.0) {
            return Err("adv_epsilon must be positive".into());
        }
        if !(self.kl_beta >= 0.0) {
            return Err("kl_beta must be non-negative".into());
        }
        if self.overlong_max_penalty > 0.0 {
            return Err("overlong_max_penalty must be non-positive".into());
        }
        Ok(())
    }
}

/// G sampled candidates for one prompt.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub prompt_id: usize,
    pub rewards: Vec<f64>,
    /// Token ids per candidate (edit indices for the toy policy).
    pub tokens: Vec<Vec<usize>>,
    pub token_logprobs_new: Vec<Vec<f64>>,
    pub token_logprobs_old: Vec<Vec<f64>>,
    /// Reference-policy log-probabilities; only read when `kl_beta > 0`.
    pub token_logprobs_ref: Option<Vec<Vec<f64>>>,
    pub advantages: Vec<f64>,
}

impl RolloutGroup {
    pub fn lengths(&self) -> Vec<usize> {
        self.token_logprobs_old.iter().map(Vec::len).collect()
    }

    pub fn size(&self) -> usize {
        self.rewards.len()
    }

    /// Fills `advantages` from `rewards`.
    pub fn compute_advantages(&mut self, adv_epsilon: f64) {
        self.advantages = crate::group_advantages(&self.rewards, adv_epsilon);
    }

    pub fn check_shape(&self, need_ref: bool) -> Result<(), RlError> {
        let g = self.rewards.len();
        let mismatch = |what: &str, n: usize| {
            Err(RlError::ShapeMismatch(format!(
                "prompt {}: {what} has {n} entries, expected {g}",
                self.prompt_id
            )))
        };
        if self.advantages.len() != g {
            return mismatch("advantages", self.advantages.len());
        }
        if self.token_logprobs_new.len() != g {
            return mismatch("new log-probs", self.token_logprobs_new.len());
        }
        if self.token_logprobs_old.len() != g {
            return mismatch("old log-probs", self.token_logprobs_old.len());
        }
        if !self.tokens.is_empty() && self.tokens.len() != g {
            return mismatch("tokens", self.tokens.len());
        }
        for i in 0..g {
            let n = self.token_logprobs_old[i].len();
            if self.token_logprobs_new[i].len() != n
                || (!self.tokens.is_empty() && self.tokens[i].len() != n)
            {
                return Err(RlError::ShapeMismatch(format!(
                    "prompt {} candidate {i}: token sequences differ in length",
                    self.prompt_id
                )));
            }
        }
        if need_ref {
            let Some(r) = &self.token_logprobs_ref else {
                return Err(RlError::ShapeMismatch(format!(
                    "prompt {}: kl_beta > 0 but no reference log-probs",
                    self.prompt_id
                )));
            };
            if r.len() != g || r.iter().zip(&self.token_logprobs_old).any(|(a, b)| a.len() != b.len()) {
                return Err(RlError::ShapeMismatch(format!(
                    "prompt {}: reference log-probs do not match the tokens",
                    self.prompt_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossReport {
    pub loss: f64,
    /// Aggregated clipped surrogate (the quantity being maximized).
    pub surrogate: f64,
    /// Aggregated KL estimate (0 when `kl_beta` is 0).
    pub kl: f64,
    pub tokens: usize,
    /// Share of tokens whose term was cut by the lower / upper clip bound.
    pub clipped_low_fraction: f64,
    pub clipped_high_fraction: f64,
}

/// Per-token quantities shared by the loss and its gradient.
pub(crate) struct TokenTerm {
    pub term: f64,
    /// d term / d logprob_new: `ratio * A` while the unclipped branch is
    /// active, 0 once clipping takes over.
    pub dterm: f64,
    pub kl: f64,
    /// d kl / d logprob_new.
    pub dkl: f64,
    pub clipped_low: bool,
    pub clipped_high: bool,
}

pub(crate) fn token_term(lp_new: f64, lp_old: f64, lp_ref: Option<f64>, adv: f64, cfg: &DapoConfig) -> TokenTerm {
    let ratio = (lp_new - lp_old).exp();
    let clipped = ratio.clamp(1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
    let unclipped_term = ratio * adv;
    let clipped_term = clipped * adv;
    let (term, dterm) = if unclipped_term <= clipped_term {
        (unclipped_term, ratio * adv)
    } else {
        (clipped_term, 0.0)
    };
    let (kl, dkl) = match lp_ref {
        Some(lr) => {
            let d = lr - lp_new;
            (d.exp() - d - 1.0, 1.0 - d.exp())
        }
        None => (0.0, 0.0),
    };
    TokenTerm {
        term,
        dterm,
        kl,
        dkl,
        clipped_low: adv < 0.0 && ratio < 1.0 - cfg.eps_low,
        clipped_high: adv > 0.0 && ratio > 1.0 + cfg.eps_high,
    }
}

/// Weight of each token of each candidate of each group in the aggregate.
pub(crate) fn token_weights(groups: &[RolloutGroup], agg: Aggregation) -> Vec<Vec<Vec<f64>>> {
    let total_tokens: usize = groups.iter().flat_map(|g| g.lengths()).sum();
    let responses: usize = groups
        .iter()
        .flat_map(|g| g.lengths())
        .filter(|&n| n > 0)
        .count();
    groups
        .iter()
        .map(|g| {
            g.lengths()
                .into_iter()
                .map(|n| {
                    let w = match agg {
                        Aggregation::Token => 1.0 / total_tokens as f64,
                        Aggregation::Response => 1.0 / (n as f64 * responses as f64),
                    };
                    vec![w; n]
                })
                .collect()
        })
        .collect()
}

/// Clipped surrogate loss over a batch of groups (advantages must be set):
/// `-(aggregated min(ratio * A, clip(ratio) * A)) + kl_beta * KL`.
pub fn dapo_loss(groups: &[RolloutGroup], cfg: &DapoConfig) -> Result<LossReport, RlError> {
    let need_ref = cfg.kl_beta > 0.0;
    for g in groups {
        g.check_shape(need_ref)?;
    }
    let weights = token_weights(groups, cfg.aggregation);
    let mut report = LossReport::default();
    let (mut low, mut high) = (0usize, 0usize);
    for (g, gw) in groups.iter().zip(&weights) {
        for i in 0..g.size() {
            for t in 0..g.token_logprobs_old[i].len() {
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
                let w = gw[i][t];
                report.surrogate += w * tt.term;
                report.kl += w * tt.kl;
                report.tokens += 1;
                low += usize::from(tt.clipped_low);
                high += usize::from(tt.clipped_high);
            }
        }
    }
    report.loss = -report.surrogate + cfg.kl_beta * report.kl;
    if report.tokens > 0 {
        report.clipped_low_fraction = low as f64 / report.tokens as f64;
        report.clipped_high_fraction = high as f64 / report.tokens as f64;
    }
    Ok(report)
}

/// Length penalty: 0 up to the threshold, a linear ramp over the buffer,
/// then the full penalty.
pub fn soft_overlong_penalty(length: usize, cfg: &DapoConfig) -> f64 {
    let lt = cfg.overlong_threshold;
    if length <= lt {
        return 0.0;
    }
    let over = length - lt;
    if cfg.overlong_buffer == 0 || over >= cfg.overlong_buffer {
        return cfg.overlong_max_penalty;
    }
    cfg.overlong_max_penalty * over as f64 / cfg.overlong_buffer as f64
}

/// Keeps groups whose rewards are not all equal when dynamic sampling is
/// on; otherwise returns every group.
pub fn dynamic_sampling_filter<'g>(groups: &'g [RolloutGroup], cfg: &DapoConfig) -> Vec<&'g RolloutGroup> {
    groups
        .iter()
        .filter(|g| {
            !cfg.dynamic_sampling || g.rewards.iter().any(|&r| r != g.rewards[0])
        })
        .collect()
}
