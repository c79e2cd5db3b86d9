use std::path::Path;

use oplang::SREX_SOURCE;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reward_engine::{EvalSuite, OperatorCache, RewardMode, RewardRecord, Tier};
use rl_math::{
    dynamic_sampling_filter, policy_step, soft_overlong_penalty, RolloutGroup, ToyEditPolicy,
};

use crate::buffer::{BufferEntry, ExampleBuffer, PromptState};
use crate::mock::{CandidateSource, MockSource, NUM_EDITS};
use crate::steplog::{write_log, StepLog};
use crate::{RunConfig, RunError};

/// Best operator seen so far: lowest phi among scored candidates, starting
/// from the expert.
#[derive(Debug, Clone, PartialEq)]
pub struct BestOperator {
    pub source: String,
    pub fingerprint: String,
    pub phi: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub best: BestOperator,
    pub logs: Vec<StepLog>,
    pub policy: ToyEditPolicy,
    pub buffer: ExampleBuffer,
}

/// Loads the suite named in the config and trains with the mock policy.
/// Writes the log, cache and weights when the config asks for them.
pub fn train(cfg: &RunConfig) -> Result<TrainOutcome, RunError> {
    cfg.validate()?;
    let path = cfg
        .suite
        .as_deref()
        .ok_or_else(|| RunError::ConfigInvalid("no `suite` manifest given".into()))?;
    let mut suite = EvalSuite::load(path)?;
    if let Some(hgs) = &cfg.hgs {
        suite = EvalSuite::new(
            suite.instances,
            suite.bks,
            suite.seeds,
            suite.probe_iterations,
            hgs.clone(),
            suite.budget,
        )?;
    }
    let mut cache = OperatorCache::new(cfg.cache);
    if let Some(dir) = &cfg.cache_dir {
        if dir.exists() {
            cache.load(dir, &suite).map_err(RunError::io(dir))?;
            // earlier runs' prompt examples must not count as copies here
            cache.clear_flags();
        }
    }
    let mut source = MockSource::new(cfg.min_edits, cfg.max_edits);
    let outcome = train_with(cfg, &suite, &mut cache, &mut source)?;
    if let Some(dir) = &cfg.cache_dir {
        cache.save(dir, &suite).map_err(RunError::io(dir))?;
    }
    if let Some(p) = &cfg.log_path {
        write_log(p, &outcome.logs)?;
    }
    if let Some(p) = &cfg.weights_path {
        write_weights(p, &outcome.policy)?;
    }
    Ok(outcome)
}

pub fn write_weights(path: &Path, policy: &ToyEditPolicy) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(policy).expect("weights serialize");
    std::fs::write(path, text).map_err(RunError::io(path))
}

/// The training loop proper, on an already built suite and cache.
pub fn train_with(
    cfg: &RunConfig,
    suite: &EvalSuite,
    cache: &mut OperatorCache,
    source: &mut dyn CandidateSource,
) -> Result<TrainOutcome, RunError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let expert_fp = oplang::compile(SREX_SOURCE).expect("expert compiles").fingerprint();
    let mut buffer = ExampleBuffer::new(
        BufferEntry {
            source: SREX_SOURCE.to_owned(),
            fingerprint: expert_fp,
            reward: 0.0,
            phi: suite.expert_phi(),
            step: None,
        },
        cfg.buffer_capacity,
    );
    let mut policy = match &cfg.initial_logits {
        Some(l) => ToyEditPolicy::from_logits(l.clone()),
        None => ToyEditPolicy::uniform(NUM_EDITS),
    };
    let reference = policy.clone();
    let mut best = BestOperator {
        source: SREX_SOURCE.to_owned(),
        fingerprint: expert_fp.to_string(),
        phi: suite.expert_phi(),
    };
    let mut logs = Vec::with_capacity(cfg.steps);

    for step in 0..cfg.steps {
        // sample prompts and their few-shot examples
        let mut prompts = Vec::with_capacity(cfg.batch_size);
        let mut prompt_examples: Vec<Vec<String>> = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.batch_size {
            let instruction_id = rng.gen_range(0..cfg.num_instructions);
            let picked = buffer.sample(&mut rng, cfg.examples_per_prompt);
            prompts.push(PromptState {
                instruction_id,
                example_fingerprints: picked.iter().map(|e| e.fingerprint).collect(),
            });
            prompt_examples.push(picked.iter().map(|e| e.source.clone()).collect());
        }
        for ex in prompt_examples.iter().flatten() {
            cache
                .flag_prompt_example(ex)
                .map_err(|e| RunError::Data(format!("buffer example does not compile: {e}")))?;
        }

        // G candidates per prompt from the current policy
        let mut candidates = Vec::with_capacity(cfg.batch_size * cfg.group_size);
        for (prompt, examples) in prompts.iter().zip(&prompt_examples) {
            let refs: Vec<&str> = examples.iter().map(String::as_str).collect();
            let group = source.generate(prompt, &refs, &policy, &mut rng, cfg.group_size);
            assert_eq!(group.len(), cfg.group_size, "candidate source returned a short group");
            candidates.extend(group);
        }
        let sources: Vec<&str> = candidates.iter().map(|c| c.source.as_str()).collect();
        let records = cache.batch_evaluate(&sources, suite, cfg.workers, RewardMode::Tiered);

        // group-normalized advantages and one policy update
        let groups: Vec<RolloutGroup> = (0..cfg.batch_size)
            .map(|p| {
                let span = p * cfg.group_size..(p + 1) * cfg.group_size;
                let cands = &candidates[span.clone()];
                let mut g = RolloutGroup {
                    prompt_id: p,
                    rewards: records[span]
                        .iter()
                        .zip(cands)
                        .map(|(r, c)| r.reward + soft_overlong_penalty(c.edits.len(), &cfg.dapo))
                        .collect(),
                    tokens: cands.iter().map(|c| c.edits.clone()).collect(),
                    token_logprobs_new: cands.iter().map(|c| c.logprobs.clone()).collect(),
                    token_logprobs_old: cands.iter().map(|c| c.logprobs.clone()).collect(),
                    token_logprobs_ref: (cfg.dapo.kl_beta > 0.0)
                        .then(|| cands.iter().map(|c| reference.log_probs(&c.edits)).collect()),
                    advantages: Vec::new(),
                };
                g.compute_advantages(cfg.dapo.adv_epsilon);
                g
            })
            .collect();
        let kept: Vec<RolloutGroup> = dynamic_sampling_filter(&groups, &cfg.dapo)
            .into_iter()
            .cloned()
            .collect();
        let edit_probs = policy.probs();
        let report = policy_step(&mut policy, &kept, &cfg.dapo, cfg.learning_rate)
            .map_err(|e| RunError::Data(e.to_string()))?;

        // buffer admission and best-so-far
        admit_best(&mut buffer, &candidates, &records, step, cfg.admit_per_step);
        for (c, r) in candidates.iter().zip(&records) {
            if r.tier == Tier::Scored {
                let phi = r.phi.expect("scored records carry phi");
                if phi < best.phi {
                    best = BestOperator {
                        source: c.source.clone(),
                        fingerprint: r.fingerprint.clone().expect("scored records carry a fingerprint"),
                        phi,
                    };
                }
            }
        }

        let mut log = StepLog::from_records(step, &records);
        log.best_fingerprint = best.fingerprint.clone();
        log.best_phi = best.phi;
        log.loss = report.loss;
        log.clipped_low_fraction = report.clipped_low_fraction;
        log.clipped_high_fraction = report.clipped_high_fraction;
        log.edit_probs = edit_probs;
        log.buffer_size = buffer.len();
        logs.push(log);
    }

    Ok(TrainOutcome {
        best,
        logs,
        policy,
        buffer,
    })
}

/// Admits the top `k` scored candidates of the step, by reward and then
/// batch order.
fn admit_best(
    buffer: &mut ExampleBuffer,
    candidates: &[crate::mock::Candidate],
    records: &[RewardRecord],
    step: usize,
    k: usize,
) {
    let mut scored: Vec<usize> = (0..records.len()).filter(|&i| records[i].tier == Tier::Scored).collect();
    scored.sort_by(|&a, &b| records[b].reward.total_cmp(&records[a].reward).then(a.cmp(&b)));
    let mut admitted = 0;
    for i in scored {
        if admitted == k {
            break;
        }
        let r = &records[i];
        let fingerprint = r
            .fingerprint
            .as_deref()
            .and_then(|f| f.parse().ok())
            .expect("scored records carry a fingerprint");
        if buffer.admit(BufferEntry {
            source: candidates[i].source.clone(),
            fingerprint,
            reward: r.reward,
            phi: r.phi.expect("scored records carry phi"),
            step: Some(step),
        }) {
            admitted += 1;
        }
    }
}
