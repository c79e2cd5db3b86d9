//! Candidate operator evaluation.
//!
//! A candidate is compiled, run inside the solver on every instance of a
//! fixed [`EvalSuite`], checked against prompt examples for plagiarism, and
//! given a tiered reward: -1 if it does not compile, -0.8 if it faults or
//! times out on any instance, -0.9 if it copies a prompt example, and
//! otherwise its relative improvement over the expert, floored at -0.7.
//! Results are memoized by structural fingerprint so logically unchanged
//! operators are never recompiled or re-evaluated.

mod cache;
mod reward;
mod suite;

pub use cache::{CacheConfig, CacheStats, OperatorCache, PlagiarismScope};
pub use reward::{
    scored_reward, tier_reward, RewardMode, RewardRecord, Tier, REWARD_NOT_COMPILABLE,
    REWARD_NOT_EXECUTABLE, REWARD_PLAGIARIZED, REWARD_SCORED_FLOOR,
};
pub use suite::{phi, reference_bks, EvalSuite, PhiError, PhiResult, SuiteError};

/// Scores one candidate with the tiered reward.
pub fn tiered_reward(source: &str, suite: &EvalSuite, cache: &mut OperatorCache) -> RewardRecord {
    cache
        .batch_evaluate(&[source], suite, 1, RewardMode::Tiered)
        .pop()
        .expect("one record per source")
}

/// Scores one candidate with the discrete (beat-the-expert) reward.
pub fn discrete_reward(source: &str, suite: &EvalSuite, cache: &mut OperatorCache) -> RewardRecord {
    cache
        .batch_evaluate(&[source], suite, 1, RewardMode::Discrete)
        .pop()
        .expect("one record per source")
}

/// Scores a batch with the tiered reward on `workers` threads.
pub fn batch_evaluate<S: AsRef<str> + Sync>(
    sources: &[S],
    suite: &EvalSuite,
    cache: &mut OperatorCache,
    workers: usize,
) -> Vec<RewardRecord> {
    cache.batch_evaluate(sources, suite, workers, RewardMode::Tiered)
}
