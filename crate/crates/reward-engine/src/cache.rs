use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use oplang::{similarity, CompileError, Fingerprint, OperatorProgram};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::reward::{scored_reward, tier_reward, RewardMode, RewardRecord, Tier};
use crate::suite::{phi, EvalSuite, PhiError, PhiResult};

/// Which cached programs a candidate is checked against for plagiarism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlagiarismScope {
    /// Only programs flagged as prompt examples.
    #[default]
    PromptExamples,
    /// Prompt examples plus every other cached program.
    AllCached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CacheConfig {
    /// When off, every candidate is compiled and evaluated afresh.
    pub enabled: bool,
    /// Similarity at or above which a candidate counts as a copy.
    pub tau: f64,
    pub scope: PlagiarismScope,
}

impl Default for CacheConfig {
    fn default() -> Self {
        CacheConfig {
            enabled: true,
            tau: 0.95,
            scope: PlagiarismScope::PromptExamples,
        }
    }
}

/// Work counters, cumulative over the cache's lifetime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub compiles: u64,
    pub evaluations: u64,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Faulted(PhiError),
    Executed(PhiResult),
}

#[derive(Debug, Clone)]
struct Entry {
    program: Arc<OperatorProgram>,
    outcome: Option<Outcome>,
    last: Option<RewardRecord>,
}

/// Fingerprint-keyed store of compiled operators and their evaluation
/// outcomes, plus the set of prompt examples used for plagiarism checks.
#[derive(Debug, Clone, Default)]
pub struct OperatorCache {
    pub config: CacheConfig,
    sources: HashMap<[u8; 32], Result<Fingerprint, CompileError>>,
    entries: BTreeMap<Fingerprint, Entry>,
    flagged: BTreeSet<Fingerprint>,
    stats: CacheStats,
}

fn source_key(source: &str) -> [u8; 32] {
    Sha256::digest(source.as_bytes()).into()
}

impl OperatorCache {
    pub fn new(config: CacheConfig) -> Self {
        OperatorCache {
            config,
            ..Default::default()
        }
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, fp: &Fingerprint) -> bool {
        self.entries.contains_key(fp)
    }

    pub fn is_flagged(&self, fp: &Fingerprint) -> bool {
        self.flagged.contains(fp)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &Fingerprint> {
        self.flagged.iter()
    }

    pub fn program(&self, fp: &Fingerprint) -> Option<&Arc<OperatorProgram>> {
        self.entries.get(fp).map(|e| &e.program)
    }

    /// Most recent record produced for `fp`.
    pub fn last_record(&self, fp: &Fingerprint) -> Option<&RewardRecord> {
        self.entries.get(fp).and_then(|e| e.last.as_ref())
    }

    /// Compiles `source` if needed and marks it as a prompt example.
    pub fn flag_prompt_example(&mut self, source: &str) -> Result<Fingerprint, CompileError> {
        let key = source_key(source);
        if let Some(Ok(fp)) = self.sources.get(&key) {
            let fp = *fp;
            self.flagged.insert(fp);
            return Ok(fp);
        }
        let prog = OperatorProgram::compile(source)?;
        self.stats.compiles += 1;
        let fp = prog.fingerprint();
        self.sources.insert(key, Ok(fp));
        self.entries.entry(fp).or_insert_with(|| Entry {
            program: Arc::new(prog),
            outcome: None,
            last: None,
        });
        self.flagged.insert(fp);
        Ok(fp)
    }

    fn plagiarism_set(&self) -> Vec<(Fingerprint, bool, Arc<OperatorProgram>)> {
        self.entries
            .iter()
            .filter_map(|(fp, e)| {
                let flagged = self.flagged.contains(fp);
                let include = flagged || self.config.scope == PlagiarismScope::AllCached;
                include.then(|| (*fp, flagged, Arc::clone(&e.program)))
            })
            .collect()
    }

    /// Scores every source. Records are order-aligned with `sources` and do
    /// not depend on `workers`.
    pub fn batch_evaluate<S: AsRef<str> + Sync>(
        &mut self,
        sources: &[S],
        suite: &EvalSuite,
        workers: usize,
        mode: RewardMode,
    ) -> Vec<RewardRecord> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .expect("thread pool");
        let enabled = self.config.enabled;
        let snapshot = self.plagiarism_set();

        // compile every source text not seen before (each one when disabled)
        let keys: Vec<[u8; 32]> = sources.iter().map(|s| source_key(s.as_ref())).collect();
        let mut to_compile: Vec<usize> = Vec::new();
        let mut first_of_key: HashMap<[u8; 32], usize> = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if !enabled || (!self.sources.contains_key(k) && !first_of_key.contains_key(k)) {
                first_of_key.entry(*k).or_insert(i);
                to_compile.push(i);
            }
        }
        let compiled: Vec<Result<OperatorProgram, CompileError>> = pool.install(|| {
            to_compile
                .par_iter()
                .map(|&i| OperatorProgram::compile(sources[i].as_ref()))
                .collect()
        });
        self.stats.compiles += to_compile.len() as u64;

        // per-candidate program handle or compile error
        let mut fresh: HashMap<usize, Result<Arc<OperatorProgram>, CompileError>> = HashMap::new();
        for (&i, result) in to_compile.iter().zip(compiled) {
            let result = result.map(Arc::new);
            if enabled {
                self.sources
                    .insert(keys[i], result.as_ref().map(|p| p.fingerprint()).map_err(Clone::clone));
                if let Ok(p) = &result {
                    self.entries.entry(p.fingerprint()).or_insert_with(|| Entry {
                        program: Arc::clone(p),
                        outcome: None,
                        last: None,
                    });
                }
            }
            fresh.insert(i, result);
        }
        let programs: Vec<Result<Arc<OperatorProgram>, CompileError>> = (0..sources.len())
            .map(|i| {
                if let Some(r) = fresh.get(&i) {
                    return r.clone();
                }
                match &self.sources[&keys[i]] {
                    Ok(fp) => Ok(Arc::clone(&self.entries[fp].program)),
                    Err(e) => Err(e.clone()),
                }
            })
            .collect();

        // evaluate every fingerprint without a known outcome
        let mut to_eval: Vec<usize> = Vec::new();
        let mut scheduled: BTreeSet<Fingerprint> = BTreeSet::new();
        for (i, p) in programs.iter().enumerate() {
            let Ok(p) = p else { continue };
            let fp = p.fingerprint();
            let known = enabled && self.entries.get(&fp).is_some_and(|e| e.outcome.is_some());
            if !enabled || (!known && scheduled.insert(fp)) {
                to_eval.push(i);
            }
        }
        let outcomes: Vec<Outcome> = pool.install(|| {
            to_eval
                .par_iter()
                .map(|&i| {
                    let p = programs[i].as_ref().expect("compiled");
                    match phi(&p.with_budget(suite.budget), suite) {
                        Ok(r) => Outcome::Executed(r),
                        Err(e) => Outcome::Faulted(e),
                    }
                })
                .collect()
        });
        self.stats.evaluations += to_eval.len() as u64;
        let mut evaluated_here: HashMap<usize, Outcome> = to_eval.iter().copied().zip(outcomes).collect();
        if enabled {
            for (&i, o) in &evaluated_here {
                let fp = programs[i].as_ref().expect("compiled").fingerprint();
                if let Some(e) = self.entries.get_mut(&fp) {
                    e.outcome = Some(o.clone());
                }
            }
        }

        let mut plagiarism_memo: HashMap<Fingerprint, bool> = HashMap::new();
        let tau = self.config.tau;
        let mut records = Vec::with_capacity(sources.len());
        for (i, p) in programs.iter().enumerate() {
            let did_compile = fresh.contains_key(&i);
            let record = match p {
                Err(e) => RewardRecord {
                    tier: Tier::NotCompilable,
                    reward: tier_reward(Tier::NotCompilable).expect("fixed"),
                    phi: None,
                    per_instance_costs: None,
                    cache_hit: !did_compile,
                    fingerprint: None,
                    error: Some(e.to_string()),
                },
                Ok(p) => {
                    let fp = p.fingerprint();
                    let did_eval = evaluated_here.contains_key(&i);
                    let outcome = match evaluated_here.remove(&i) {
                        Some(o) => o,
                        None => self.entries[&fp].outcome.clone().expect("evaluated"),
                    };
                    let plagiarized = *plagiarism_memo.entry(fp).or_insert_with(|| {
                        snapshot.iter().any(|(other, flagged, prog)| {
                            if *other == fp {
                                *flagged
                            } else {
                                similarity(p, prog) >= tau
                            }
                        })
                    });
                    let cache_hit = !did_compile && !did_eval;
                    record_for(outcome, plagiarized, fp, cache_hit, suite.expert_phi(), mode)
                }
            };
            if let Some(fp) = p.as_ref().ok().map(|p| p.fingerprint()) {
                if let Some(e) = self.entries.get_mut(&fp) {
                    e.last = Some(record.clone());
                }
            }
            self.stats.hits += u64::from(record.cache_hit);
            records.push(record);
        }
        records
    }

    /// Forgets every prompt-example flag; programs and outcomes stay.
    pub fn clear_flags(&mut self) {
        self.flagged.clear();
    }

    /// Writes one `<fingerprint>.json` document per cached program.
    pub fn save(&self, dir: &Path, suite: &EvalSuite) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (fp, e) in &self.entries {
            let (phi, per_instance_costs, error) = match &e.outcome {
                Some(Outcome::Executed(r)) => (Some(r.phi), Some(r.per_instance_costs.clone()), None),
                Some(Outcome::Faulted(err)) => (None, None, Some(err.clone())),
                None => (None, None, None),
            };
            let doc = StoredRecord {
                fingerprint: fp.to_string(),
                suite: suite.digest().to_owned(),
                source: e.program.source().to_owned(),
                prompt_example: self.flagged.contains(fp),
                evaluated: e.outcome.is_some(),
                tier: e.last.as_ref().map(|r| r.tier),
                reward: e.last.as_ref().map(|r| r.reward),
                phi,
                per_instance_costs,
                fault_instance: error.as_ref().map(|e| e.instance),
                fault_message: error.map(|e| e.message),
            };
            let text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
            std::fs::write(dir.join(format!("{fp}.json")), text)?;
        }
        Ok(())
    }

    /// Restores records written by [`save`](Self::save). Outcomes recorded
    /// against a different suite are dropped; their programs and prompt
    /// flags are kept. Returns the number of programs loaded.
    pub fn load(&mut self, dir: &Path, suite: &EvalSuite) -> std::io::Result<usize> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut loaded = 0;
        for path in paths {
            let text = std::fs::read_to_string(&path)?;
            let doc: StoredRecord = serde_json::from_str(&text)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            let Ok(prog) = OperatorProgram::compile(&doc.source) else {
                continue;
            };
            let fp = prog.fingerprint();
            if fp.to_string() != doc.fingerprint {
                continue;
            }
            let outcome = if doc.evaluated && doc.suite == suite.digest() {
                match (doc.phi, doc.per_instance_costs, doc.fault_instance, doc.fault_message) {
                    (Some(phi), Some(per_instance_costs), _, _) => Some(Outcome::Executed(PhiResult {
                        phi,
                        per_instance_costs,
                    })),
                    (_, _, Some(instance), Some(message)) => Some(Outcome::Faulted(PhiError { instance, message })),
                    _ => None,
                }
            } else {
                None
            };
            self.sources.insert(source_key(&doc.source), Ok(fp));
            let entry = self.entries.entry(fp).or_insert_with(|| Entry {
                program: Arc::new(prog),
                outcome: None,
                last: None,
            });
            if entry.outcome.is_none() {
                entry.outcome = outcome;
            }
            if doc.prompt_example {
                self.flagged.insert(fp);
            }
            loaded += 1;
        }
        Ok(loaded)
    }
}

fn record_for(
    outcome: Outcome,
    plagiarized: bool,
    fp: Fingerprint,
    cache_hit: bool,
    expert_phi: f64,
    mode: RewardMode,
) -> RewardRecord {
    let fingerprint = Some(fp.to_string());
    match outcome {
        Outcome::Faulted(e) => RewardRecord {
            tier: Tier::NotExecutable,
            reward: tier_reward(Tier::NotExecutable).expect("fixed"),
            phi: None,
            per_instance_costs: None,
            cache_hit,
            fingerprint,
            error: Some(e.to_string()),
        },
        Outcome::Executed(r) => {
            let (tier, reward) = if plagiarized {
                (Tier::Plagiarized, tier_reward(Tier::Plagiarized).expect("fixed"))
            } else {
                (Tier::Scored, scored_reward(r.phi, expert_phi, mode))
            };
            RewardRecord {
                tier,
                reward,
                phi: Some(r.phi),
                per_instance_costs: Some(r.per_instance_costs),
                cache_hit,
                fingerprint,
                error: None,
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredRecord {
    fingerprint: String,
    suite: String,
    source: String,
    prompt_example: bool,
    evaluated: bool,
    tier: Option<Tier>,
    reward: Option<f64>,
    phi: Option<f64>,
    per_instance_costs: Option<Vec<f64>>,
    fault_instance: Option<usize>,
    fault_message: Option<String>,
}
