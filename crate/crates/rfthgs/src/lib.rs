//! Reinforcement fine-tuning of HGS crossover operators at desk scale.
//!
//! Each training step builds prompts from a buffer of example operators,
//! lets a mock edit policy propose a group of candidate programs per
//! prompt, scores them with the tiered reward, normalizes rewards within
//! each group and takes one clipped policy-gradient step. Benchmark mode
//! compares operators on instance files against best-known costs.

pub mod benchmark;
pub mod buffer;
pub mod config;
mod error;
pub mod mock;
pub mod plots;
pub mod steplog;
pub mod template;
pub mod train;

pub use buffer::{BufferEntry, ExampleBuffer, PromptState};
pub use config::RunConfig;
pub use error::RunError;
pub use mock::{Candidate, CandidateSource, Edit, MockSource, PinnedSource, ALPHABET, RIGGED_LOGITS};
pub use steplog::{StepLog, TierCounts};
pub use train::{train, train_with, BestOperator, TrainOutcome};
