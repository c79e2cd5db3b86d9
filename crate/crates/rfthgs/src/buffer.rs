use std::collections::VecDeque;

use oplang::Fingerprint;
use rand::Rng;

/// A program shown to the policy as a few-shot example.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferEntry {
    pub source: String,
    pub fingerprint: Fingerprint,
    pub reward: f64,
    pub phi: f64,
    /// Step that admitted it; `None` for the expert.
    pub step: Option<usize>,
}

/// Few-shot example pool: the expert operator plus the most recent
/// discovered operators, evicted first-in first-out.
#[derive(Debug, Clone)]
pub struct ExampleBuffer {
    expert: BufferEntry,
    discovered: VecDeque<BufferEntry>,
    capacity: usize,
}

impl ExampleBuffer {
    /// `capacity` counts the expert, which is never evicted.
    pub fn new(expert: BufferEntry, capacity: usize) -> Self {
        ExampleBuffer {
            expert,
            discovered: VecDeque::new(),
            capacity: capacity.max(1),
        }
    }

    pub fn expert(&self) -> &BufferEntry {
        &self.expert
    }

    pub fn len(&self) -> usize {
        1 + self.discovered.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, fp: &Fingerprint) -> bool {
        self.iter().any(|e| e.fingerprint == *fp)
    }

    /// Expert first, then discovered entries oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &BufferEntry> {
        std::iter::once(&self.expert).chain(self.discovered.iter())
    }

    /// Adds an entry unless its fingerprint is already present. Returns
    /// whether it was added.
    pub fn admit(&mut self, entry: BufferEntry) -> bool {
        if self.contains(&entry.fingerprint) || self.capacity == 1 {
            return false;
        }
        if self.len() == self.capacity {
            self.discovered.pop_front();
        }
        self.discovered.push_back(entry);
        true
    }

    /// Sampling weights aligned with [`iter`](Self::iter): `1 / (1 + rank)`
    /// where rank 0 is the highest reward (earlier entries win ties).
    pub fn weights(&self) -> Vec<f64> {
        let entries: Vec<&BufferEntry> = self.iter().collect();
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| entries[b].reward.total_cmp(&entries[a].reward).then(a.cmp(&b)));
        let mut w = vec![0.0; entries.len()];
        for (rank, &i) in order.iter().enumerate() {
            w[i] = 1.0 / (1.0 + rank as f64);
        }
        w
    }

    /// Draws up to `k` distinct entries by weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> Vec<&BufferEntry> {
        let entries: Vec<&BufferEntry> = self.iter().collect();
        let mut weights = self.weights();
        let mut picked = Vec::new();
        for _ in 0..k.min(entries.len()) {
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut choice = weights.iter().rposition(|&w| w > 0.0).expect("entries left");
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 && u < w {
                    choice = i;
                    break;
                }
                u -= w;
            }
            weights[choice] = 0.0;
            picked.push(entries[choice]);
        }
        picked
    }
}

/// What the policy is conditioned on for one prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptState {
    pub instruction_id: usize,
    pub example_fingerprints: Vec<Fingerprint>,
}

const INSTRUCTIONS: [&str; 4] = [
    "Write a crossover operator that improves on the examples below.",
    "Combine the ideas of the example operators into a better one.",
    "Modify the example operators so the solver reaches lower costs.",
    "Design a new crossover operator that differs from the examples.",
];

impl PromptState {
    /// Text form of the prompt, as a language model would receive it.
    pub fn render(&self, buffer: &ExampleBuffer) -> String {
        let mut s = String::from(INSTRUCTIONS[self.instruction_id % INSTRUCTIONS.len()]);
        for (k, fp) in self.example_fingerprints.iter().enumerate() {
            if let Some(e) = buffer.iter().find(|e| e.fingerprint == *fp) {
                s.push_str(&format!("\n\n// example {}\n{}", k + 1, e.source));
            }
        }
        s
    }
}
