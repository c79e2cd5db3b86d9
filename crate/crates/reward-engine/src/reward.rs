use serde::{Deserialize, Serialize};

pub const REWARD_NOT_COMPILABLE: f64 = -1.0;
pub const REWARD_NOT_EXECUTABLE: f64 = -0.8;
pub const REWARD_PLAGIARIZED: f64 = -0.9;
pub const REWARD_SCORED_FLOOR: f64 = -0.7;

/// Outcome class of a candidate operator, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    NotCompilable,
    NotExecutable,
    Plagiarized,
    Scored,
}

impl Tier {
    pub const ALL: [Tier; 4] = [
        Tier::NotCompilable,
        Tier::NotExecutable,
        Tier::Plagiarized,
        Tier::Scored,
    ];
}

/// Reward shaping applied to scored candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Relative improvement over the expert, floored at -0.7.
    #[default]
    Tiered,
    /// 1 when strictly better than the expert, else 0.
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub tier: Tier,
    pub reward: f64,
    pub phi: Option<f64>,
    pub per_instance_costs: Option<Vec<f64>>,
    /// No compile or evaluation work was done for this candidate.
    pub cache_hit: bool,
    pub fingerprint: Option<String>,
    /// Compile or runtime diagnostic for the failing tiers.
    pub error: Option<String>,
}

impl RewardRecord {
    /// Equality ignoring `cache_hit`.
    pub fn same_outcome(&self, other: &RewardRecord) -> bool {
        RewardRecord {
            cache_hit: other.cache_hit,
            ..self.clone()
        } == *other
    }
}

pub fn scored_reward(phi: f64, expert_phi: f64, mode: RewardMode) -> f64 {
    match mode {
        RewardMode::Tiered => ((expert_phi - phi) / expert_phi).max(REWARD_SCORED_FLOOR),
        RewardMode::Discrete => {
            if phi < expert_phi {
                1.0
            } else {
                0.0
            }
        }
    }
}

pub fn tier_reward(tier: Tier) -> Option<f64> {
    match tier {
        Tier::NotCompilable => Some(REWARD_NOT_COMPILABLE),
        Tier::NotExecutable => Some(REWARD_NOT_EXECUTABLE),
        Tier::Plagiarized => Some(REWARD_PLAGIARIZED),
        Tier::Scored => None,
    }
}
