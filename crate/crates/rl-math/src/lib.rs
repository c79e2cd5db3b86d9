//! Policy-gradient arithmetic for group-relative fine-tuning.
//!
//! Rewards within a group of samples for one prompt are normalized into
//! advantages, and the clipped surrogate is aggregated over every token in
//! the batch with separate lower and upper clip ranges. [`ToyEditPolicy`]
//! is a softmax over a small edit alphabet whose exact gradient lets the
//! whole update be checked against finite differences.

mod advantage;
mod loss;
mod policy;

pub use advantage::group_advantages;
pub use loss::{
    dapo_loss, dynamic_sampling_filter, soft_overlong_penalty, Aggregation, DapoConfig,
    LossReport, RlError, RolloutGroup,
};
pub use policy::{policy_gradient, policy_loss, policy_step, ToyEditPolicy};
