use std::path::{Path, PathBuf};

use cvrp_core::{BksRegistry, Instance};
use hgs_solver::{reference_evaluator, solve, Crossover, HgsConfig, HgsError, SrexCrossover};
use oplang::ExecBudget;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("bad instance {path}: {source}")]
    Instance {
        path: PathBuf,
        source: cvrp_core::CvrpError,
    },
    #[error("no best-known cost for instance `{0}`")]
    MissingBks(String),
    #[error("invalid suite: {0}")]
    Invalid(String),
    #[error("expert operator failed on the suite: {0}")]
    Expert(PhiError),
}

/// A crossover fault on one suite instance.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("instance {instance}: {message}")]
pub struct PhiError {
    pub instance: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub phi: f64,
    /// Best reference penalized cost per instance.
    pub per_instance_costs: Vec<f64>,
}

/// The fixed instance set an operator is scored on.
#[derive(Debug, Clone)]
pub struct EvalSuite {
    pub instances: Vec<Instance>,
    pub bks: Vec<f64>,
    pub seeds: Vec<u64>,
    pub probe_iterations: usize,
    /// Solver settings apart from iterations and seed.
    pub hgs: HgsConfig,
    pub budget: ExecBudget,
    expert_phi: f64,
    digest: String,
}

impl EvalSuite {
    /// Builds the suite and scores the native expert operator on it.
    pub fn new(
        instances: Vec<Instance>,
        bks: Vec<f64>,
        seeds: Vec<u64>,
        probe_iterations: usize,
        hgs: HgsConfig,
        budget: ExecBudget,
    ) -> Result<Self, SuiteError> {
        if instances.is_empty() {
            return Err(SuiteError::Invalid("no instances".into()));
        }
        if bks.len() != instances.len() || seeds.len() != instances.len() {
            return Err(SuiteError::Invalid(format!(
                "{} instances but {} bks values and {} seeds",
                instances.len(),
                bks.len(),
                seeds.len()
            )));
        }
        if let Some(b) = bks.iter().find(|&&b| !(b > 0.0)) {
            return Err(SuiteError::Invalid(format!("non-positive bks {b}")));
        }
        if probe_iterations == 0 {
            return Err(SuiteError::Invalid("probe_iterations must be positive".into()));
        }
        hgs.clone()
            .with_iterations(probe_iterations)
            .validate()
            .map_err(SuiteError::Invalid)?;

        let mut h = Sha256::new();
        for ((inst, b), s) in instances.iter().zip(&bks).zip(&seeds) {
            h.update(inst.to_vrp_string().as_bytes());
            h.update(b.to_le_bytes());
            h.update(s.to_le_bytes());
        }
        h.update((probe_iterations as u64).to_le_bytes());
        h.update(format!("{hgs:?}{budget:?}").as_bytes());
        let digest = hex::encode(&h.finalize()[..16]);

        let mut suite = EvalSuite {
            instances,
            bks,
            seeds,
            probe_iterations,
            hgs,
            budget,
            expert_phi: 0.0,
            digest,
        };
        suite.expert_phi = phi(&SrexCrossover::default(), &suite)
            .map_err(SuiteError::Expert)?
            .phi;
        Ok(suite)
    }

    /// Loads a TOML manifest; relative paths resolve against its directory.
    pub fn load(manifest: &Path) -> Result<Self, SuiteError> {
        let text = read(manifest)?;
        let m: Manifest = toml::from_str(&text).map_err(|e| SuiteError::Manifest(e.to_string()))?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let registry = match &m.bks_file {
            Some(p) => Some(
                BksRegistry::parse(&read(&base.join(p))?)
                    .map_err(|e| SuiteError::Manifest(e.to_string()))?,
            ),
            None => None,
        };
        let mut instances = Vec::new();
        let mut bks = Vec::new();
        let mut seeds = Vec::new();
        for (k, entry) in m.instance.iter().enumerate() {
            let path = base.join(&entry.path);
            let inst = Instance::parse(&read(&path)?)
                .map_err(|source| SuiteError::Instance { path: path.clone(), source })?;
            let b = entry
                .bks
                .or_else(|| registry.as_ref().and_then(|r| r.get(inst.name())).map(|b| b as f64))
                .ok_or_else(|| SuiteError::MissingBks(inst.name().to_owned()))?;
            bks.push(b);
            seeds.push(entry.seed.unwrap_or(k as u64));
            instances.push(inst);
        }
        let hgs = m.hgs.unwrap_or_default();
        let budget = ExecBudget {
            max_steps: m.max_steps.unwrap_or(ExecBudget::default().max_steps),
            ..ExecBudget::default()
        };
        Self::new(instances, bks, seeds, m.probe_iterations, hgs, budget)
    }

    pub fn expert_phi(&self) -> f64 {
        self.expert_phi
    }

    /// Replaces the expert baseline. Meant for fixtures that need an exact
    /// reference value.
    pub fn with_expert_phi(mut self, expert_phi: f64) -> Self {
        assert!(expert_phi > 0.0);
        self.expert_phi = expert_phi;
        self
    }

    /// Identifies the suite contents; persisted cache records carry it.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    fn config_for(&self, i: usize) -> HgsConfig {
        self.hgs
            .clone()
            .with_iterations(self.probe_iterations)
            .with_seed(self.seeds[i])
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    probe_iterations: usize,
    bks_file: Option<PathBuf>,
    max_steps: Option<u64>,
    hgs: Option<HgsConfig>,
    #[serde(default)]
    instance: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    path: PathBuf,
    bks: Option<f64>,
    seed: Option<u64>,
}

fn read(path: &Path) -> Result<String, SuiteError> {
    std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Mean over the suite of best reference penalized cost divided by BKS.
pub fn phi(op: &dyn Crossover, suite: &EvalSuite) -> Result<PhiResult, PhiError> {
    let mut costs = Vec::with_capacity(suite.len());
    let mut total = 0.0;
    for (i, inst) in suite.instances.iter().enumerate() {
        let (sol, _) = solve(inst, &suite.config_for(i), op).map_err(|e| PhiError {
            instance: i,
            message: match e {
                HgsError::OperatorRuntimeFailure { message, .. } => message,
                other => other.to_string(),
            },
        })?;
        let cost = reference_evaluator(inst).penalized_cost(&sol, inst);
        total += cost / suite.bks[i];
        costs.push(cost);
    }
    Ok(PhiResult {
        phi: total / suite.len() as f64,
        per_instance_costs: costs,
    })
}

/// Best cost the expert finds with a generous budget; a stand-in BKS for
/// generated instances that have no published one.
pub fn reference_bks(inst: &Instance, iterations: usize, seed: u64) -> f64 {
    let cfg = HgsConfig::default().with_iterations(iterations).with_seed(seed);
    let (sol, _) = solve(inst, &cfg, &SrexCrossover::default()).expect("expert never faults");
    reference_evaluator(inst).penalized_cost(&sol, inst)
}
