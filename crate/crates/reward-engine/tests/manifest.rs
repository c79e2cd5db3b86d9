use std::fs;

use reward_engine::{EvalSuite, SuiteError};

const VRP: &str = "NAME : tiny\nTYPE : CVRP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nCAPACITY : 10\nNODE_COORD_SECTION\n1 0 0\n2 3 4\n3 0 5\n4 6 8\nDEMAND_SECTION\n1 0\n2 4\n3 5\n4 3\nDEPOT_SECTION\n1\n-1\nEOF\n";

#[test]
fn manifest_with_registry_loads() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.vrp"), VRP).unwrap();
    fs::write(dir.path().join("bks.txt"), "tiny 21\n").unwrap();
    fs::write(
        dir.path().join("suite.toml"),
        "probe_iterations = 5\nbks_file = \"bks.txt\"\n\n[hgs]\npopulation_min = 4\npopulation_max = 8\n\n[[instance]]\npath = \"tiny.vrp\"\nseed = 3\n",
    )
    .unwrap();
    let suite = EvalSuite::load(&dir.path().join("suite.toml")).unwrap();
    assert_eq!(suite.len(), 1);
    assert_eq!(suite.bks, vec![21.0]);
    assert_eq!(suite.seeds, vec![3]);
    assert!(suite.expert_phi() > 0.0);
}

#[test]
fn missing_bks_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.vrp"), VRP).unwrap();
    fs::write(
        dir.path().join("suite.toml"),
        "probe_iterations = 5\n[[instance]]\npath = \"tiny.vrp\"\n",
    )
    .unwrap();
    let err = EvalSuite::load(&dir.path().join("suite.toml")).unwrap_err();
    assert!(matches!(err, SuiteError::MissingBks(ref n) if n == "tiny"), "{err}");
}

#[test]
fn unknown_manifest_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("suite.toml"), "probe_iterations = 5\nbogus = 1\n").unwrap();
    assert!(matches!(
        EvalSuite::load(&dir.path().join("suite.toml")),
        Err(SuiteError::Manifest(_))
    ));
}
