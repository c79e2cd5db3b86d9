//! Stand-in for the language model: a softmax policy over program edits.
//!
//! A candidate is a short sequence of edits applied to one of the prompt's
//! example programs. The alphabet is chosen so that every reward tier is
//! reachable: copying an example verbatim is plagiarism, a syntax error
//! fails compilation, an infinite loop exhausts the step budget, and a
//! structural tweak yields a fresh, scoreable operator.

use rand::Rng;
use rl_math::ToyEditPolicy;

use crate::buffer::PromptState;
use crate::template::Genome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    CopyExample = 0,
    SyntaxError = 1,
    InfiniteLoop = 2,
    Tweak = 3,
}

pub const NUM_EDITS: usize = 4;
pub const ALPHABET: [Edit; NUM_EDITS] = [Edit::CopyExample, Edit::SyntaxError, Edit::InfiniteLoop, Edit::Tweak];

impl Edit {
    pub fn name(self) -> &'static str {
        match self {
            Edit::CopyExample => "copy_example",
            Edit::SyntaxError => "syntax_error",
            Edit::InfiniteLoop => "infinite_loop",
            Edit::Tweak => "tweak",
        }
    }
}

/// Starting logits that make syntax errors dominant, so the run has to
/// learn its way up through every reward tier.
pub const RIGGED_LOGITS: [f64; NUM_EDITS] = [0.0, 2.5, 0.5, 0.0];

/// One sampled program with the edit tokens that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub source: String,
    pub edits: Vec<usize>,
    /// Log-probability of each edit under the sampling policy.
    pub logprobs: Vec<f64>,
}

/// Produces the G candidates of one prompt.
pub trait CandidateSource {
    fn generate(
        &mut self,
        prompt: &PromptState,
        examples: &[&str],
        policy: &ToyEditPolicy,
        rng: &mut dyn rand::RngCore,
        group_size: usize,
    ) -> Vec<Candidate>;
}

/// Samples edit sequences from the policy and applies them to examples.
#[derive(Debug, Clone)]
pub struct MockSource {
    pub min_edits: usize,
    pub max_edits: usize,
}

impl MockSource {
    pub fn new(min_edits: usize, max_edits: usize) -> Self {
        MockSource { min_edits, max_edits }
    }
}

impl CandidateSource for MockSource {
    fn generate(
        &mut self,
        _prompt: &PromptState,
        examples: &[&str],
        policy: &ToyEditPolicy,
        rng: &mut dyn rand::RngCore,
        group_size: usize,
    ) -> Vec<Candidate> {
        (0..group_size)
            .map(|_| {
                let base = examples[rng.gen_range(0..examples.len())];
                let len = rng.gen_range(self.min_edits..=self.max_edits);
                let (edits, logprobs) = policy.sample_sequence(rng, len);
                let source = apply_edits(base, &edits, rng);
                Candidate { source, edits, logprobs }
            })
            .collect()
    }
}

/// Applies edit indices (into [`ALPHABET`]) to `base`.
pub fn apply_edits<R: Rng + ?Sized>(base: &str, edits: &[usize], rng: &mut R) -> String {
    let mut genome: Option<Genome> = None;
    let (mut broken, mut looping) = (false, false);
    for &e in edits {
        match ALPHABET[e] {
            Edit::CopyExample => {}
            Edit::SyntaxError => broken = true,
            Edit::InfiniteLoop => looping = true,
            Edit::Tweak => {
                genome = Some(match genome.or_else(|| Genome::from_source(base)) {
                    Some(g) => g.mutate(rng),
                    None => Genome::random(rng),
                });
            }
        }
    }
    let mut text = genome.map_or_else(|| base.to_owned(), |g| g.render());
    if looping {
        text = format!("while true {{\n}}\n{text}");
    }
    if broken {
        text.push_str("emit_route([\n");
    }
    text
}

/// Returns the same fixed sources for every prompt, cycling through them.
/// Candidates carry no edit tokens, so they do not move the policy.
#[derive(Debug, Clone)]
pub struct PinnedSource {
    pub sources: Vec<String>,
}

impl CandidateSource for PinnedSource {
    fn generate(
        &mut self,
        _prompt: &PromptState,
        _examples: &[&str],
        _policy: &ToyEditPolicy,
        _rng: &mut dyn rand::RngCore,
        group_size: usize,
    ) -> Vec<Candidate> {
        (0..group_size)
            .map(|i| Candidate {
                source: self.sources[i % self.sources.len()].clone(),
                edits: Vec::new(),
                logprobs: Vec::new(),
            })
            .collect()
    }
}
