use cvrp_core::{generate, BksRegistry, Instance};
use hgs_solver::HgsConfig;
use oplang::ExecBudget;
use rfthgs::benchmark::*;
use rfthgs::RunError;

fn instances() -> Vec<Instance> {
    vec![
        generate::random_uniform("a", 15, 30, 9, 1),
        generate::random_uniform("b", 25, 30, 9, 2),
        generate::random_uniform("c", 120, 60, 9, 3),
    ]
}

fn bks_for(insts: &[Instance]) -> BksRegistry {
    let mut reg = BksRegistry::new();
    for inst in insts {
        let b = reward_engine::reference_bks(inst, 200, 1);
        reg.insert(inst.name(), b as u64).unwrap();
    }
    reg
}

fn spec(insts: Vec<Instance>, operators: Vec<OperatorHandle>, budgets: Vec<usize>) -> BenchmarkSpec {
    BenchmarkSpec {
        bks: bks_for(&insts),
        instances: insts,
        operators,
        budgets,
        seeds: vec![1, 2],
        hgs: HgsConfig {
            population_min: 8,
            population_max: 16,
            ..HgsConfig::default()
        },
        exec_budget: ExecBudget::default(),
        workers: 1,
    }
}

#[test]
fn expert_against_itself_gives_identical_gaps() {
    let insts = instances()[..2].to_vec();
    let s = spec(
        insts,
        vec![OperatorHandle::Expert, OperatorHandle::resolve("srex-dsl").unwrap()],
        vec![40],
    );
    let report = benchmark(&s).unwrap();
    let (native, dsl): (Vec<_>, Vec<_>) = report.runs.iter().partition(|r| r.operator == "srex");
    assert_eq!(native.len(), dsl.len());
    for (a, b) in native.iter().zip(&dsl) {
        assert_eq!((a.instance.as_str(), a.seed, a.cost, a.gap), (b.instance.as_str(), b.seed, b.cost, b.gap));
    }
    let rows: Vec<_> = report.rows.iter().map(|r| (r.bin, r.mean_gap)).collect();
    assert_eq!(rows[..rows.len() / 2], rows[rows.len() / 2..]);
}

#[test]
fn more_budget_never_raises_the_gap() {
    let s = spec(instances()[..2].to_vec(), vec![OperatorHandle::Expert], vec![80, 100]);
    let report = benchmark(&s).unwrap();
    for r in report.runs.iter().filter(|r| r.budget == 100) {
        let short = report
            .runs
            .iter()
            .find(|q| q.budget == 80 && q.instance == r.instance && q.seed == r.seed)
            .unwrap();
        assert!(r.gap <= short.gap, "{}: {} > {}", r.instance, r.gap, short.gap);
    }
}

#[test]
fn empty_bins_are_omitted() {
    let s = spec(instances(), vec![OperatorHandle::Expert], vec![10]);
    let report = benchmark(&s).unwrap();
    let bins: Vec<usize> = report.rows.iter().map(|r| r.bin).collect();
    assert_eq!(bins, vec![0, 1]);
    assert_eq!(report.rows[0].instances, 2);
    assert_eq!(report.rows[0].runs, 4);
    assert_eq!(report.empty_bins, vec![2, 3, 4, 5]);
    let tsv = report.to_tsv();
    assert_eq!(tsv.lines().count(), 3);
    assert!(tsv.contains("[0,100)") && tsv.contains("[100,200)"));
    let text = report.to_text();
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains("[200,400)"));
}

#[test]
fn missing_bks_is_reported() {
    let mut s = spec(instances()[..1].to_vec(), vec![OperatorHandle::Expert], vec![10]);
    s.bks = BksRegistry::new();
    match benchmark(&s) {
        Err(RunError::MissingBks(name)) => assert_eq!(name, "a"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn size_bins_follow_client_counts() {
    assert_eq!(size_bin(50), 0);
    assert_eq!(size_bin(100), 1);
    assert_eq!(size_bin(399), 2);
    assert_eq!(size_bin(1000), 5);
    assert_eq!(bin_label(5), "[800,inf)");
}
