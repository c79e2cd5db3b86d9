use std::io::{BufRead, Write};
use std::path::Path;

use reward_engine::{RewardRecord, Tier};
use serde::{Deserialize, Serialize};

use crate::RunError;

/// Histogram bins are 0.1 wide and centred on -1.0, -0.9, ..., 1.0, so
/// each fixed tier reward sits in the middle of its own bin.
pub const NUM_BINS: usize = 21;

pub fn bin_center(bin: usize) -> f64 {
    -1.0 + 0.1 * bin as f64
}

pub fn bin_of(reward: f64) -> usize {
    ((reward + 1.0) * 10.0).round().clamp(0.0, (NUM_BINS - 1) as f64) as usize
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierCounts {
    pub not_compilable: usize,
    pub not_executable: usize,
    pub plagiarized: usize,
    pub scored: usize,
}

impl TierCounts {
    pub fn add(&mut self, tier: Tier) {
        match tier {
            Tier::NotCompilable => self.not_compilable += 1,
            Tier::NotExecutable => self.not_executable += 1,
            Tier::Plagiarized => self.plagiarized += 1,
            Tier::Scored => self.scored += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.not_compilable + self.not_executable + self.plagiarized + self.scored
    }
}

/// Summary of one training step, written as one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: usize,
    pub mean_reward: f64,
    /// Share of candidates with reward >= -0.7 (the scored tier).
    pub scored_fraction: f64,
    pub histogram: Vec<usize>,
    pub tier_counts: TierCounts,
    pub cache_hit_rate: f64,
    pub best_fingerprint: String,
    pub best_phi: f64,
    pub loss: f64,
    pub clipped_low_fraction: f64,
    pub clipped_high_fraction: f64,
    /// Edit probabilities before this step's update.
    pub edit_probs: Vec<f64>,
    pub buffer_size: usize,
}

impl StepLog {
    /// Fills the reward statistics from the step's records.
    pub fn from_records(step: usize, records: &[RewardRecord]) -> Self {
        let mut histogram = vec![0; NUM_BINS];
        let mut tier_counts = TierCounts::default();
        for r in records {
            histogram[bin_of(r.reward)] += 1;
            tier_counts.add(r.tier);
        }
        let n = records.len().max(1) as f64;
        StepLog {
            step,
            mean_reward: records.iter().map(|r| r.reward).sum::<f64>() / n,
            scored_fraction: records.iter().filter(|r| r.reward >= -0.7).count() as f64 / n,
            histogram,
            tier_counts,
            cache_hit_rate: records.iter().filter(|r| r.cache_hit).count() as f64 / n,
            best_fingerprint: String::new(),
            best_phi: f64::NAN,
            loss: 0.0,
            clipped_low_fraction: 0.0,
            clipped_high_fraction: 0.0,
            edit_probs: Vec::new(),
            buffer_size: 0,
        }
    }

    /// Index of the fullest histogram bin (lowest on ties).
    pub fn argmax_bin(&self) -> usize {
        argmax(&self.histogram)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("step logs serialize")
    }
}

pub(crate) fn argmax(v: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in v.iter().enumerate() {
        if c > v[best] {
            best = i;
        }
    }
    best
}

pub fn write_log(path: &Path, logs: &[StepLog]) -> Result<(), RunError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(RunError::io(path))?);
    for l in logs {
        writeln!(out, "{}", l.to_json_line()).map_err(RunError::io(path))?;
    }
    out.flush().map_err(RunError::io(path))
}

pub fn read_log(path: &Path) -> Result<Vec<StepLog>, RunError> {
    let file = std::fs::File::open(path).map_err(RunError::io(path))?;
    let mut logs = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(RunError::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let log: StepLog = serde_json::from_str(&line).map_err(|e| RunError::LogParse {
            path: path.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if log.histogram.len() != NUM_BINS {
            return Err(RunError::LogParse {
                path: path.to_owned(),
                line: i + 1,
                message: format!("histogram has {} bins, expected {NUM_BINS}", log.histogram.len()),
            });
        }
        logs.push(log);
    }
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tier_rewards_sit_in_their_own_bins() {
        assert_eq!(bin_of(-1.0), 0);
        assert_eq!(bin_of(-0.9), 1);
        assert_eq!(bin_of(-0.8), 2);
        assert_eq!(bin_of(-0.7), 3);
        assert_eq!(bin_of(-0.0075), 10);
        assert_eq!(bin_of(0.04), 10);
        assert_eq!(bin_of(1.0), 20);
    }
}
