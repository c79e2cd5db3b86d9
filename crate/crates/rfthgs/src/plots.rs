//! Tab-separated series for plotting training dynamics elsewhere.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::steplog::{bin_center, read_log, StepLog, NUM_BINS};
use crate::RunError;

pub const CURVE_FILE: &str = "reward_curve.tsv";
pub const HISTOGRAM_FILE: &str = "reward_histogram.tsv";

pub fn curve_tsv(logs: &[StepLog]) -> String {
    let mut s = String::from(
        "step\tmean_reward\tscored_fraction\tnot_compilable\tnot_executable\tplagiarized\tscored\tcache_hit_rate\tbest_phi\n",
    );
    for l in logs {
        let t = &l.tier_counts;
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            l.step,
            l.mean_reward,
            l.scored_fraction,
            t.not_compilable,
            t.not_executable,
            t.plagiarized,
            t.scored,
            l.cache_hit_rate,
            l.best_phi
        )
        .expect("write to string");
    }
    s
}

/// One row per step; columns are bins labelled by their centre.
pub fn histogram_tsv(logs: &[StepLog]) -> String {
    let mut s = String::from("step");
    for b in 0..NUM_BINS {
        write!(s, "\t{:.1}", bin_center(b)).expect("write to string");
    }
    s.push('\n');
    for l in logs {
        s.push_str(&l.step.to_string());
        for c in &l.histogram {
            write!(s, "\t{c}").expect("write to string");
        }
        s.push('\n');
    }
    s
}

/// Reads a JSONL training log and writes the curve and histogram files
/// into `out_dir`. Returns the paths written.
pub fn export_plots(log: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let logs = read_log(log)?;
    std::fs::create_dir_all(out_dir).map_err(RunError::io(out_dir))?;
    let curve = out_dir.join(CURVE_FILE);
    let hist = out_dir.join(HISTOGRAM_FILE);
    std::fs::write(&curve, curve_tsv(&logs)).map_err(RunError::io(&curve))?;
    std::fs::write(&hist, histogram_tsv(&logs)).map_err(RunError::io(&hist))?;
    Ok(vec![curve, hist])
}
