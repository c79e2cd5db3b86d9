use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvrp_core::{BksRegistry, Instance};
use hgs_solver::HgsConfig;
use oplang::ExecBudget;
use reward_engine::{EvalSuite, OperatorCache, RewardMode};
use rfthgs::benchmark::{benchmark, BenchmarkSpec, OperatorHandle};
use rfthgs::plots::export_plots;
use rfthgs::{train, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "rfthgs", version, about = "Reinforcement fine-tuning of HGS crossover operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the training loop described by a TOML config.
    Train {
        config: PathBuf,
        /// Override the number of steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Override the run seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the log path.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Compare operators by gap to best-known costs.
    Benchmark {
        /// Instance files in TSPLIB CVRP format.
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Best-known costs, one `name cost` pair per line.
        #[arg(long)]
        bks: PathBuf,
        /// `srex`, `srex-dsl`, `identity`, or an OpLang file; repeatable.
        #[arg(long = "operator", default_value = "srex")]
        operators: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "800,1000")]
        budgets: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the machine-readable rows here instead of stdout.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Score one OpLang operator on an evaluation suite.
    EvaluateOperator {
        operator: PathBuf,
        /// Evaluation suite manifest.
        #[arg(long)]
        suite: PathBuf,
        /// Programs the operator must not copy; repeatable.
        #[arg(long = "example")]
        examples: Vec<PathBuf>,
        /// Use the beat-the-expert reward instead of the tiered one.
        #[arg(long)]
        discrete: bool,
    },
    /// Turn a training log into curve and histogram tables.
    ExportPlots {
        log: PathBuf,
        #[arg(long, default_value = "plots")]
        out_dir: PathBuf,
    },
    /// Parse an instance file and print its summary.
    ValidateInstance { path: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_instance(path: &PathBuf) -> Result<Instance, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Instance::parse(&text).map_err(|e| RunError::Data(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Train { config, steps, seed, log } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = steps {
                cfg.steps = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if log.is_some() {
                cfg.log_path = log;
            }
            let out = train(&cfg)?;
            for l in &out.logs {
                println!(
                    "step {:>4}  mean reward {:>8.4}  scored {:>5.1}%  cache hits {:>5.1}%  best phi {:.6}",
                    l.step,
                    l.mean_reward,
                    100.0 * l.scored_fraction,
                    100.0 * l.cache_hit_rate,
                    l.best_phi
                );
            }
            println!("best operator {} (phi {:.6})", out.best.fingerprint, out.best.phi);
            Ok(())
        }
        Command::Benchmark {
            instances,
            bks,
            operators,
            budgets,
            seeds,
            workers,
            tsv,
        } => {
            let bks_text = std::fs::read_to_string(&bks).map_err(|source| RunError::Io {
                path: bks.clone(),
                source,
            })?;
            let spec = BenchmarkSpec {
                instances: instances.iter().map(read_instance).collect::<Result<_, _>>()?,
                bks: BksRegistry::parse(&bks_text).map_err(|e| RunError::Data(format!("{}: {e}", bks.display())))?,
                operators: operators
                    .iter()
                    .map(|o| OperatorHandle::resolve(o))
                    .collect::<Result<_, _>>()?,
                budgets,
                seeds,
                hgs: HgsConfig::default(),
                exec_budget: ExecBudget::default(),
                workers,
            };
            let report = benchmark(&spec)?;
            print!("{}", report.to_text());
            match tsv {
                Some(p) => std::fs::write(&p, report.to_tsv()).map_err(|source| RunError::Io { path: p, source })?,
                None => print!("\n{}", report.to_tsv()),
            }
            Ok(())
        }
        Command::EvaluateOperator {
            operator,
            suite,
            examples,
            discrete,
        } => {
            let suite = EvalSuite::load(&suite)?;
            let source = std::fs::read_to_string(&operator).map_err(|source| RunError::Io {
                path: operator.clone(),
                source,
            })?;
            let mut cache = OperatorCache::default();
            for ex in &examples {
                let text = std::fs::read_to_string(ex).map_err(|source| RunError::Io {
                    path: ex.clone(),
                    source,
                })?;
                cache
                    .flag_prompt_example(&text)
                    .map_err(|e| RunError::Data(format!("{}: {e}", ex.display())))?;
            }
            let mode = if discrete { RewardMode::Discrete } else { RewardMode::Tiered };
            let record = cache.batch_evaluate(&[source], &suite, 1, mode).remove(0);
            println!("{}", serde_json::to_string_pretty(&record).expect("records serialize"));
            println!("expert phi {}", suite.expert_phi());
            Ok(())
        }
        Command::ExportPlots { log, out_dir } => {
            for p in export_plots(&log, &out_dir)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::ValidateInstance { path } => {
            let inst = read_instance(&path)?;
            let total = inst.total_demand();
            println!("name          {}", inst.name());
            println!("clients       {}", inst.num_clients());
            println!("capacity      {}", inst.capacity());
            println!("total demand  {total}");
            println!("min vehicles  {}", (total + inst.capacity() - 1) / inst.capacity());
            println!("max arc       {}", inst.max_arc());
            Ok(())
        }
    }
}
