use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rl_math::*;

/// Random batch sampled from `old`, with the reference at `reference`.
fn random_batch(rng: &mut ChaCha8Rng, old: &ToyEditPolicy, reference: &ToyEditPolicy, groups: usize) -> Vec<RolloutGroup> {
    (0..groups)
        .map(|p| {
            let g = rng.gen_range(2..6);
            let mut grp = RolloutGroup { prompt_id: p, ..Default::default() };
            for _ in 0..g {
                let len = rng.gen_range(1..7);
                let (edits, lps) = old.sample_sequence(rng, len);
                grp.token_logprobs_ref = Some({
                    let mut r = grp.token_logprobs_ref.take().unwrap_or_default();
                    r.push(reference.log_probs(&edits));
                    r
                });
                grp.token_logprobs_old.push(lps.clone());
                grp.token_logprobs_new.push(lps);
                grp.tokens.push(edits);
                grp.rewards.push([-1.0, -0.8, -0.5, 0.0, 1.0][rng.gen_range(0..5)] + rng.gen::<f64>() * 0.1);
            }
            grp.compute_advantages(1e-8);
            grp
        })
        .collect()
}

fn random_logits(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    (0..k).map(|_| (rng.gen::<f64>() - 0.5) * scale).collect()
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let k = rng.gen_range(2..8);
        let old = ToyEditPolicy::from_logits(random_logits(&mut rng, k, 2.0));
        let reference = ToyEditPolicy::from_logits(random_logits(&mut rng, k, 2.0));
        // current policy away from the old one so both clip bounds engage
        let current = ToyEditPolicy::from_logits(
            old.logits.iter().map(|l| l + (rng.gen::<f64>() - 0.5) * 1.2).collect(),
        );
        let n_groups = rng.gen_range(1..4);
        let groups = random_batch(&mut rng, &old, &reference, n_groups);
        let cfg = DapoConfig {
            kl_beta: if case % 2 == 0 { 0.0 } else { 0.05 },
            aggregation: if case % 3 == 0 { Aggregation::Response } else { Aggregation::Token },
            ..DapoConfig::default()
        };
        let analytic = policy_gradient(&current, &groups, &cfg).unwrap();
        let mut numeric = vec![0.0; k];
        for j in 0..k {
            let mut plus = current.clone();
            plus.logits[j] += h;
            let mut minus = current.clone();
            minus.logits[j] -= h;
            numeric[j] = (policy_loss(&plus, &groups, &cfg).unwrap().loss
                - policy_loss(&minus, &groups, &cfg).unwrap().loss)
                / (2.0 * h);
        }
        let scale = numeric.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-6);
        let err = analytic
            .iter()
            .zip(&numeric)
            .fold(0.0f64, |m, (a, n)| m.max((a - n).abs()))
            / scale;
        worst = worst.max(err);
    }
    assert!(worst <= 1e-5, "worst relative gradient error {worst}");
}

/// Straight PPO-clip/GRPO objective: per-response token mean, then mean
/// over responses, then over groups, KL weighted by beta.
fn grpo_reference(groups: &[RolloutGroup], eps: f64, beta: f64) -> f64 {
    let mut total = 0.0;
    let mut responses = 0.0;
    for g in groups {
        let mean = g.rewards.iter().sum::<f64>() / g.rewards.len() as f64;
        let var = g.rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / g.rewards.len() as f64;
        for i in 0..g.rewards.len() {
            let a = (g.rewards[i] - mean) / (var + 1e-8).sqrt();
            let n = g.token_logprobs_new[i].len() as f64;
            let mut s = 0.0;
            for t in 0..g.token_logprobs_new[i].len() {
                let ratio = (g.token_logprobs_new[i][t] - g.token_logprobs_old[i][t]).exp();
                let clipped = ratio.max(1.0 - eps).min(1.0 + eps);
                let obj = (ratio * a).min(clipped * a);
                let lr = g.token_logprobs_ref.as_ref().unwrap()[i][t] - g.token_logprobs_new[i][t];
                let kl = lr.exp() - lr - 1.0;
                s += obj - beta * kl;
            }
            total += s / n;
            responses += 1.0;
        }
    }
    -(total / responses)
}

#[test]
fn symmetric_clip_with_response_mean_is_grpo() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let k = 5;
        let old = ToyEditPolicy::from_logits(random_logits(&mut rng, k, 2.0));
        let reference = ToyEditPolicy::from_logits(random_logits(&mut rng, k, 2.0));
        let current = ToyEditPolicy::from_logits(random_logits(&mut rng, k, 2.0));
        let groups = random_batch(&mut rng, &old, &reference, 3);
        let cfg = DapoConfig {
            eps_low: 0.2,
            eps_high: 0.2,
            kl_beta: 0.04,
            aggregation: Aggregation::Response,
            ..DapoConfig::default()
        };
        let ours = policy_loss(&current, &groups, &cfg).unwrap().loss;
        let mut with_new = groups.clone();
        for g in &mut with_new {
            g.token_logprobs_new = g.tokens.iter().map(|t| current.log_probs(t)).collect();
        }
        let theirs = grpo_reference(&with_new, 0.2, 0.04);
        assert!((ours - theirs).abs() <= 1e-12 * theirs.abs().max(1.0), "{ours} vs {theirs}");
    }
}

#[test]
fn token_mean_weighs_long_responses_more() {
    // one long positive response, one short negative response
    let g = RolloutGroup {
        rewards: vec![1.0, -1.0],
        tokens: vec![vec![0; 4], vec![0]],
        token_logprobs_new: vec![vec![0.0; 4], vec![0.0]],
        token_logprobs_old: vec![vec![0.0; 4], vec![0.0]],
        advantages: vec![1.0, -1.0],
        ..Default::default()
    };
    let tok = dapo_loss(std::slice::from_ref(&g), &DapoConfig::default()).unwrap();
    let resp = dapo_loss(
        std::slice::from_ref(&g),
        &DapoConfig { aggregation: Aggregation::Response, ..DapoConfig::default() },
    )
    .unwrap();
    assert!((tok.surrogate - 0.6).abs() <= 1e-12);
    assert!(resp.surrogate.abs() <= 1e-12);
}

#[test]
fn clip_bounds_are_asymmetric() {
    let cfg = DapoConfig::default();
    let term = |adv: f64, ratio: f64| {
        let g = RolloutGroup {
            rewards: vec![0.0],
            tokens: vec![vec![0]],
            token_logprobs_new: vec![vec![ratio.ln()]],
            token_logprobs_old: vec![vec![0.0]],
            advantages: vec![adv],
            ..Default::default()
        };
        dapo_loss(&[g], &cfg).unwrap().surrogate
    };
    assert!((term(1.0, 1.25) - 1.25).abs() <= 1e-12);
    assert!((term(1.0, 1.5) - 1.28).abs() <= 1e-12);
    assert!((term(-1.0, 0.85) + 0.85).abs() <= 1e-12);
    assert!((term(-1.0, 0.5) + 0.8).abs() <= 1e-12);
    // pessimistic side never clipped
    assert!((term(1.0, 0.3) - 0.3).abs() <= 1e-12);
    assert!((term(-1.0, 2.0) + 2.0).abs() <= 1e-12);
}

#[test]
fn kl_needs_reference() {
    let g = RolloutGroup {
        rewards: vec![0.0],
        tokens: vec![vec![0]],
        token_logprobs_new: vec![vec![0.0]],
        token_logprobs_old: vec![vec![0.0]],
        advantages: vec![0.0],
        ..Default::default()
    };
    let cfg = DapoConfig { kl_beta: 0.1, ..DapoConfig::default() };
    assert!(matches!(dapo_loss(&[g], &cfg), Err(RlError::ShapeMismatch(_))));
}

#[test]
fn steps_shift_mass_to_rewarded_edit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut policy = ToyEditPolicy::uniform(4);
    let cfg = DapoConfig::default();
    for step in 0..50 {
        let mut group = RolloutGroup { prompt_id: step, ..Default::default() };
        for _ in 0..8 {
            let (edits, lps) = policy.sample_sequence(&mut rng, 1);
            group.rewards.push(if edits[0] == 2 { 1.0 } else { -1.0 });
            group.token_logprobs_new.push(lps.clone());
            group.token_logprobs_old.push(lps);
            group.tokens.push(edits);
        }
        group.compute_advantages(cfg.adv_epsilon);
        policy_step(&mut policy, &[group], &cfg, 1.0).unwrap();
    }
    assert_eq!(policy.argmax(), 2);
    assert!(policy.probs()[2] > 0.9);
}

#[test]
fn dynamic_sampling_is_off_by_default() {
    let flat = RolloutGroup { rewards: vec![0.5, 0.5], ..Default::default() };
    let varied = RolloutGroup { rewards: vec![0.5, 0.0], ..Default::default() };
    let groups = vec![flat, varied];
    assert_eq!(dynamic_sampling_filter(&groups, &DapoConfig::default()).len(), 2);
    let on = DapoConfig { dynamic_sampling: true, ..DapoConfig::default() };
    assert_eq!(dynamic_sampling_filter(&groups, &on).len(), 1);
}

fn flat_group(rewards: &[f64], lens: &[usize]) -> RolloutGroup {
    let mut g = RolloutGroup {
        rewards: rewards.to_vec(),
        tokens: lens.iter().map(|&n| vec![0; n]).collect(),
        token_logprobs_new: lens.iter().map(|&n| vec![-0.5; n]).collect(),
        token_logprobs_old: lens.iter().map(|&n| vec![-0.5; n]).collect(),
        ..Default::default()
    };
    g.compute_advantages(1e-8);
    g
}

#[test]
fn unit_ratios_give_minus_token_mean_advantage() {
    let g = flat_group(&[-1.0, -0.8, -0.7, 0.2], &[1, 2, 3, 4]);
    let expected = -(g.advantages.iter().zip([1.0, 2.0, 3.0, 4.0]).map(|(a, n)| a * n).sum::<f64>() / 10.0);
    let r = dapo_loss(&[g], &DapoConfig::default()).unwrap();
    assert!((r.loss - expected).abs() <= 1e-12);
    assert_eq!(r.tokens, 10);
    assert_eq!(r.clipped_low_fraction + r.clipped_high_fraction, 0.0);
}

#[test]
fn advantages_match_a_direct_computation() {
    let r = [-1.0, -0.8, -0.7, 0.2];
    let mean = (-1.0 - 0.8 - 0.7 + 0.2) / 4.0;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0;
    let got = group_advantages(&r, 1e-8);
    for (x, a) in r.iter().zip(&got) {
        assert!((a - (x - mean) / (var + 1e-8f64).sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn loss_ignores_reward_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let old = ToyEditPolicy::from_logits(random_logits(&mut rng, 4, 2.0));
        let current = ToyEditPolicy::from_logits(random_logits(&mut rng, 4, 2.0));
        let groups = random_batch(&mut rng, &old, &old, 3);
        let shift = rng.gen_range(-3.0..3.0);
        let shifted: Vec<RolloutGroup> = groups
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.rewards.iter_mut().for_each(|r| *r += shift);
                g.compute_advantages(1e-8);
                g
            })
            .collect();
        let cfg = DapoConfig::default();
        let a = policy_loss(&current, &groups, &cfg).unwrap().loss;
        let b = policy_loss(&current, &shifted, &cfg).unwrap().loss;
        assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }
}

#[test]
fn wider_upper_clip_never_lowers_positive_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..1000 {
        let ratio: f64 = rng.gen_range(0.1..3.0);
        let adv: f64 = rng.gen_range(0.01..3.0);
        let e1: f64 = rng.gen_range(0.01..1.0);
        let e2 = e1 + rng.gen_range(0.0..1.0);
        let term = |eps_high: f64| {
            let g = RolloutGroup {
                rewards: vec![0.0],
                tokens: vec![vec![0]],
                token_logprobs_new: vec![vec![ratio.ln()]],
                token_logprobs_old: vec![vec![0.0]],
                advantages: vec![adv],
                ..Default::default()
            };
            let cfg = DapoConfig { eps_low: 0.01, eps_high, ..DapoConfig::default() };
            dapo_loss(&[g], &cfg).unwrap().surrogate
        };
        assert!(term(e2) >= term(e1));
    }
}

#[test]
fn unique_winner_gains_weight_and_zero_advantage_is_a_no_op() {
    let policy = ToyEditPolicy::uniform(5);
    let (winner, loser) = (vec![1usize, 1], vec![3usize, 4]);
    let lp = |s: &[usize]| policy.log_probs(s);
    let mut g = RolloutGroup {
        rewards: vec![1.0, -1.0, -1.0],
        tokens: vec![winner.clone(), loser.clone(), loser.clone()],
        token_logprobs_new: vec![lp(&winner), lp(&loser), lp(&loser)],
        token_logprobs_old: vec![lp(&winner), lp(&loser), lp(&loser)],
        ..Default::default()
    };
    g.compute_advantages(1e-8);
    let mut p = policy.clone();
    policy_step(&mut p, std::slice::from_ref(&g), &DapoConfig::default(), 0.5).unwrap();
    assert!(p.logits[1] > policy.logits[1]);
    assert!(p.logits[3] < policy.logits[3] && p.logits[4] < policy.logits[4]);

    g.rewards = vec![0.3; 3];
    g.compute_advantages(1e-8);
    let mut q = policy.clone();
    policy_step(&mut q, &[g], &DapoConfig::default(), 0.5).unwrap();
    assert_eq!(q, policy);
}
