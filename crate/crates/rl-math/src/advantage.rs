/// Group-normalized advantages: `(r_i - mean) / sqrt(var + eps)` with the
/// population variance.
pub fn group_advantages(rewards: &[f64], eps: f64) -> Vec<f64> {
    if rewards.is_empty() {
        return Vec::new();
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let scale = (var + eps).sqrt();
    rewards.iter().map(|r| (r - mean) / scale).collect()
}
