//! Gap-to-BKS comparison of operators across budgets and size bins.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use cvrp_core::{gap_percent, BksRegistry, Instance};
use hgs_solver::{reference_evaluator, solve, Crossover, HgsConfig, SrexCrossover};
use oplang::{ExecBudget, OperatorProgram};
use rayon::prelude::*;

use crate::RunError;

/// Client-count bins of the report; the last one is open above.
pub const SIZE_BINS: [(usize, usize); 6] = [(0, 100), (100, 200), (200, 400), (400, 600), (600, 800), (800, usize::MAX)];

pub fn bin_label(bin: usize) -> String {
    match SIZE_BINS[bin] {
        (lo, usize::MAX) => format!("[{lo},inf)"),
        (lo, hi) => format!("[{lo},{hi})"),
    }
}

pub fn size_bin(num_clients: usize) -> usize {
    SIZE_BINS
        .iter()
        .position(|&(lo, hi)| num_clients >= lo && num_clients < hi)
        .expect("bins cover every size")
}

/// An operator to benchmark.
#[derive(Debug, Clone)]
pub enum OperatorHandle {
    /// The built-in selective route exchange.
    Expert,
    Program { name: String, program: OperatorProgram },
}

impl OperatorHandle {
    pub fn name(&self) -> &str {
        match self {
            OperatorHandle::Expert => "srex",
            OperatorHandle::Program { name, .. } => name,
        }
    }

    /// `srex` names the built-in operator, `srex-dsl` and `identity` the
    /// bundled programs, anything else is read as an OpLang file.
    pub fn resolve(spec: &str) -> Result<Self, RunError> {
        let (name, source) = match spec {
            "srex" => return Ok(OperatorHandle::Expert),
            "srex-dsl" => (spec.to_owned(), oplang::SREX_SOURCE.to_owned()),
            "identity" => (spec.to_owned(), oplang::IDENTITY_SOURCE.to_owned()),
            path => {
                let p = Path::new(path);
                let text = std::fs::read_to_string(p).map_err(RunError::io(p))?;
                let name = p.file_stem().map_or(path.to_owned(), |s| s.to_string_lossy().into_owned());
                (name, text)
            }
        };
        let program = OperatorProgram::compile(&source)
            .map_err(|e| RunError::Data(format!("operator `{name}` does not compile: {e}")))?;
        Ok(OperatorHandle::Program { name, program })
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub instances: Vec<Instance>,
    pub bks: BksRegistry,
    pub operators: Vec<OperatorHandle>,
    pub budgets: Vec<usize>,
    pub seeds: Vec<u64>,
    pub hgs: HgsConfig,
    pub exec_budget: ExecBudget,
    pub workers: usize,
}

/// Result of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub operator: String,
    pub budget: usize,
    pub instance: String,
    pub num_clients: usize,
    pub seed: u64,
    pub cost: f64,
    pub gap: f64,
    pub seconds: f64,
}

/// Mean over the runs of one (operator, budget, size bin).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub operator: String,
    pub budget: usize,
    pub bin: usize,
    pub instances: usize,
    pub runs: usize,
    pub mean_gap: f64,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub runs: Vec<RunResult>,
    pub rows: Vec<ReportRow>,
    /// Size bins without instances, omitted from `rows`.
    pub empty_bins: Vec<usize>,
}

pub fn benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport, RunError> {
    if spec.operators.is_empty() || spec.budgets.is_empty() || spec.seeds.is_empty() {
        return Err(RunError::ConfigInvalid("need at least one operator, budget and seed".into()));
    }
    if spec.budgets.contains(&0) {
        return Err(RunError::ConfigInvalid("budgets must be positive".into()));
    }
    let mut bks = Vec::with_capacity(spec.instances.len());
    for inst in &spec.instances {
        let b = spec
            .bks
            .get(inst.name())
            .ok_or_else(|| RunError::MissingBks(inst.name().to_owned()))?;
        bks.push(b as f64);
    }

    let mut jobs = Vec::new();
    for (o, _) in spec.operators.iter().enumerate() {
        for &budget in &spec.budgets {
            for i in 0..spec.instances.len() {
                for &seed in &spec.seeds {
                    jobs.push((o, budget, i, seed));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .expect("thread pool");
    let runs: Result<Vec<RunResult>, RunError> = pool.install(|| {
        jobs.par_iter()
            .map(|&(o, budget, i, seed)| {
                let op = &spec.operators[o];
                let inst = &spec.instances[i];
                let cfg = spec.hgs.clone().with_iterations(budget).with_seed(seed);
                let native = SrexCrossover::default();
                let program;
                let crossover: &dyn Crossover = match op {
                    OperatorHandle::Expert => &native,
                    OperatorHandle::Program { program: p, .. } => {
                        program = p.with_budget(spec.exec_budget);
                        &program
                    }
                };
                let start = Instant::now();
                let (sol, _) = solve(inst, &cfg, crossover)
                    .map_err(|e| RunError::Data(format!("{} on {}: {e}", op.name(), inst.name())))?;
                let seconds = start.elapsed().as_secs_f64();
                let cost = reference_evaluator(inst).penalized_cost(&sol, inst);
                let gap = gap_percent(cost, bks[i]).map_err(|e| RunError::Data(e.to_string()))?;
                Ok(RunResult {
                    operator: op.name().to_owned(),
                    budget,
                    instance: inst.name().to_owned(),
                    num_clients: inst.num_clients(),
                    seed,
                    cost,
                    gap,
                    seconds,
                })
            })
            .collect()
    });
    let runs = runs?;

    let mut per_bin = [0usize; SIZE_BINS.len()];
    for inst in &spec.instances {
        per_bin[size_bin(inst.num_clients())] += 1;
    }
    let empty_bins: Vec<usize> = (0..SIZE_BINS.len()).filter(|&b| per_bin[b] == 0).collect();
    for &b in &empty_bins {
        log::warn!("size bin {} has no instances; omitted", bin_label(b));
    }
    let mut rows = Vec::new();
    for op in &spec.operators {
        for &budget in &spec.budgets {
            for (bin, &count) in per_bin.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let sel: Vec<&RunResult> = runs
                    .iter()
                    .filter(|r| r.operator == op.name() && r.budget == budget && size_bin(r.num_clients) == bin)
                    .collect();
                let n = sel.len() as f64;
                rows.push(ReportRow {
                    operator: op.name().to_owned(),
                    budget,
                    bin,
                    instances: count,
                    runs: sel.len(),
                    mean_gap: sel.iter().map(|r| r.gap).sum::<f64>() / n,
                    mean_seconds: sel.iter().map(|r| r.seconds).sum::<f64>() / n,
                });
            }
        }
    }
    Ok(BenchmarkReport { runs, rows, empty_bins })
}

impl BenchmarkReport {
    /// Machine-readable rows, one per (operator, budget, size bin).
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("operator\tbudget\tsize_bin\tinstances\truns\tmean_gap_percent\tmean_seconds\n");
        for r in &self.rows {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
                r.operator,
                r.budget,
                bin_label(r.bin),
                r.instances,
                r.runs,
                r.mean_gap,
                r.mean_seconds
            )
            .expect("write to string");
        }
        s
    }

    /// One line per (operator, budget), with gap and time per size bin.
    pub fn to_text(&self) -> String {
        let mut bins: Vec<usize> = self.rows.iter().map(|r| r.bin).collect();
        bins.sort_unstable();
        bins.dedup();
        let mut keys: Vec<(String, usize)> = Vec::new();
        for r in &self.rows {
            let k = (r.operator.clone(), r.budget);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let mut header = vec!["operator".to_owned(), "budget".to_owned()];
        for &b in &bins {
            header.push(format!("gap% n{}", bin_label(b)));
            header.push(format!("time(s) n{}", bin_label(b)));
        }
        let mut table = vec![header];
        for (op, budget) in &keys {
            let mut line = vec![op.clone(), budget.to_string()];
            for &b in &bins {
                match self.rows.iter().find(|r| &r.operator == op && r.budget == *budget && r.bin == b) {
                    Some(r) => {
                        line.push(format!("{:.3}", r.mean_gap));
                        line.push(format!("{:.3}", r.mean_seconds));
                    }
                    None => line.extend(["-".to_owned(), "-".to_owned()]),
                }
            }
            table.push(line);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            s.push_str(cells.join("  ").trim_end());
            s.push('\n');
        }
        s
    }
}
