use std::path::{Path, PathBuf};

use hgs_solver::HgsConfig;
use reward_engine::CacheConfig;
use rl_math::DapoConfig;
use serde::{Deserialize, Serialize};

use crate::mock::NUM_EDITS;
use crate::RunError;

/// Everything one training run depends on. Read from a TOML file; every
/// key is optional except `suite` when training from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Evaluation suite manifest, relative to the config file.
    pub suite: Option<PathBuf>,
    pub steps: usize,
    pub batch_size: usize,
    pub group_size: usize,
    /// Seeds prompt sampling, the mock policy and the mock edits.
    pub seed: u64,
    /// Threads used to compile and score candidates.
    pub workers: usize,
    pub learning_rate: f64,
    pub examples_per_prompt: usize,
    /// Buffer size including the expert operator.
    pub buffer_capacity: usize,
    /// Scored candidates admitted to the buffer per step, best first.
    pub admit_per_step: usize,
    pub min_edits: usize,
    pub max_edits: usize,
    /// Starting edit logits; uniform when absent.
    pub initial_logits: Option<Vec<f64>>,
    pub num_instructions: usize,
    pub log_path: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    /// Final policy weights as JSON.
    pub weights_path: Option<PathBuf>,
    pub dapo: DapoConfig,
    pub cache: CacheConfig,
    /// Replaces the solver settings of the suite manifest when present.
    pub hgs: Option<HgsConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: None,
            steps: 50,
            batch_size: 16,
            group_size: 16,
            seed: 0,
            workers: 1,
            learning_rate: 1.0,
            examples_per_prompt: 2,
            buffer_capacity: 16,
            admit_per_step: 1,
            min_edits: 1,
            max_edits: 3,
            initial_logits: None,
            num_instructions: 4,
            log_path: None,
            cache_dir: None,
            weights_path: None,
            dapo: DapoConfig::default(),
            cache: CacheConfig::default(),
            hgs: None,
        }
    }
}

impl RunConfig {
    /// Parses a config file and resolves its paths against its directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(RunError::io(path))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| RunError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.suite, &mut cfg.log_path, &mut cfg.cache_dir, &mut cfg.weights_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::ConfigInvalid(m));
        if self.batch_size == 0 || self.group_size == 0 {
            return bad("batch_size and group_size must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad("learning_rate must be finite and non-negative".into());
        }
        if self.examples_per_prompt == 0 {
            return bad("examples_per_prompt must be at least 1".into());
        }
        if self.buffer_capacity == 0 {
            return bad("buffer_capacity must be at least 1 (the expert)".into());
        }
        if self.min_edits == 0 || self.min_edits > self.max_edits {
            return bad(format!(
                "need 1 <= min_edits <= max_edits, got {} and {}",
                self.min_edits, self.max_edits
            ));
        }
        if self.num_instructions == 0 {
            return bad("num_instructions must be at least 1".into());
        }
        if let Some(l) = &self.initial_logits {
            if l.len() != NUM_EDITS || l.iter().any(|x| !x.is_finite()) {
                return bad(format!("initial_logits needs {NUM_EDITS} finite values"));
            }
        }
        self.dapo.validate().map_err(RunError::ConfigInvalid)?;
        if !(self.cache.tau > 0.0 && self.cache.tau <= 1.0) {
            return bad("cache.tau must lie in (0, 1]".into());
        }
        if let Some(h) = &self.hgs {
            h.validate().map_err(RunError::ConfigInvalid)?;
        }
        Ok(())
    }
}
