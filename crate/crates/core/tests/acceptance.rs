//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line. Tolerances are checked against the
//! reports so a loosened check inside the library fails here.

use std::time::{Duration, Instant};

use fpgowers::cli::run_with;
use fpgowers::report::{Relation, VerificationReport, Verdict};
use fpgowers::suite::run_suite;
use fpgowers::variety::WstarScan;
use fpgowers::polymap::PolyMap;
use fpgowers::Exec;

fn gate(number: u32, title: &str, suites: &[&str], tolerance: f64, limit: Duration) {
    let exec = Exec::default();
    let start = Instant::now();
    let mut reports: Vec<VerificationReport> = Vec::new();
    for s in suites {
        reports.extend(run_suite(s, &exec).expect("suite runs"));
    }
    let elapsed = start.elapsed();
    let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.passed()).collect();
    let loose: Vec<&VerificationReport> = reports
        .iter()
        .filter(|r| r.verdict != Verdict::ReportOnly && r.tolerance > tolerance)
        .collect();
    let ok = !reports.is_empty() && failed.is_empty() && loose.is_empty() && elapsed <= limit;
    println!(
        "criterion {number}: {} {title} ({} checks, {} failed, {:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        reports.len(),
        failed.len(),
        elapsed.as_secs_f64()
    );
    for r in failed.iter().chain(&loose) {
        println!("    {r}");
    }
    assert!(ok, "criterion {number} failed");
}

fn count(suite: &str, check: &str) -> usize {
    run_suite(suite, &Exec::default())
        .unwrap()
        .iter()
        .filter(|r| r.check == check)
        .count()
}

#[test]
fn criterion_01_lemma2_equality() {
    // 4 shapes x 3 maps; every nonzero alpha: 3*(4+4+6) + 3*24 = 114.
    assert_eq!(count("lemma2-equality", "phase-norm-identity"), 114);
    gate(1, "phase norm equals W*(alpha) density", &["lemma2-equality"], 1e-9, Duration::from_secs(120));
}

#[test]
fn criterion_02_level_set_norm() {
    assert_eq!(count("level-set-norm", "level-set-norm-bound"), 7);
    gate(2, "level-set norm bound", &["level-set-norm"], 1e-9, Duration::from_secs(300));
}

#[test]
fn criterion_03_wstar_bound() {
    let reports = run_suite("wstar-bound", &Exec::default()).unwrap();
    assert_eq!(reports.len(), 8);
    assert!(reports.iter().all(|r| r.tolerance == 0.0 && r.relation == Relation::Le));
    gate(3, "W* count bound, exact integers", &["wstar-bound"], 0.0, Duration::from_secs(120));
}

#[test]
fn criterion_04_monotonicity_von_neumann() {
    assert_eq!(count("monotonicity-von-neumann", "norm-monotonicity"), 200);
    gate(4, "monotonicity and von Neumann", &["monotonicity-von-neumann"], 1e-9, Duration::from_secs(120));
}

#[test]
fn criterion_05_decomposition() {
    assert_eq!(count("decomposition", "decomposition-identity"), 107);
    gate(5, "decomposition identity", &["decomposition"], 1e-12, Duration::from_secs(120));
}

#[test]
fn criterion_06_counterexample() {
    gate(6, "counterexample gaps and parallelogram identity", &["counterexample"], 0.0, Duration::from_secs(60));
}

#[test]
fn criterion_07_level_set_concentration() {
    assert_eq!(count("level-set-concentration", "level-set-concentration"), 7);
    gate(7, "level-set concentration", &["level-set-concentration"], 1e-9, Duration::from_secs(300));
}

#[test]
fn criterion_08_chevalley_warning() {
    let reports = run_suite("chevalley-warning", &Exec::default()).unwrap();
    assert_eq!(reports.len(), 20);
    assert!(reports.iter().all(|r| r.verdict == Verdict::Pass));
    gate(8, "Chevalley-Warning counts", &["chevalley-warning"], 0.0, Duration::from_secs(120));
}

#[test]
fn criterion_09_subspace_pipeline() {
    assert_eq!(count("subspace-pipeline", "extension-equivalence"), 50);
    assert_eq!(count("subspace-pipeline", "subspace-maximality"), 3);
    gate(9, "greedy subspaces and extension tests", &["subspace-pipeline"], 0.0, Duration::from_secs(120));
}

#[test]
fn criterion_10_strategy_cross_validation() {
    let reports = run_suite("strategy-cross-validation", &Exec::default()).unwrap();
    let tol = |check: &str| {
        reports
            .iter()
            .filter(|r| r.check == check)
            .map(|r| r.tolerance)
            .fold(0.0, f64::max)
    };
    assert!(tol("definitional-vs-recursive") <= 1e-10);
    assert!(tol("fourier-vs-recursive") <= 1e-9);
    assert!(tol("parseval") <= 1e-12);
    assert_eq!(reports.iter().filter(|r| r.check == "fourier-vs-recursive").count(), 100);
    gate(10, "strategy cross-validation", &["strategy-cross-validation"], 1e-9, Duration::from_secs(300));
}

fn numeric_fields(path: &std::path::Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let record: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    serde_json::to_string(&(&record["results"], &record["data"], &record["fingerprint"])).unwrap()
}

#[test]
fn criterion_11_determinism_and_rate() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let path = dir.path().join(format!("w{workers}.jsonl"));
        let code = run_with(
            ["fpgowers", "verify", "all", "--workers", workers, "--out", path.to_str().unwrap()],
            &mut Vec::new(),
            &mut Vec::new(),
        );
        assert_eq!(code, 0);
        outputs.push(numeric_fields(&path));
    }
    let identical = outputs[0] == outputs[1];

    // Synthetic sweep: the (5,4,3) W* scan repeated to 10^8 tuple visits.
    let map = PolyMap::sum_of_powers(4, 3, 5).unwrap();
    let scan = WstarScan::rank_deficient(&map).unwrap();
    let exec = Exec::default();
    let single = Instant::now();
    let members = scan.count(&exec).unwrap();
    let single = single.elapsed();
    let reps = 100_000_000u64.div_ceil(scan.tuple_count());
    let start = Instant::now();
    let mut total = 0;
    for _ in 0..reps {
        total += scan.count(&exec).unwrap();
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(total, members * reps);
    let rate = (reps * scan.tuple_count()) as f64 / elapsed / exec.workers() as f64;
    let ok = identical && rate >= 1e7 && single < Duration::from_secs(1);
    println!(
        "criterion 11: {} determinism (1 vs 8 workers identical: {identical}), {:.3e} tuple-visits/s/worker, single (5,4,3) scan {:.3}s",
        if ok { "PASS" } else { "FAIL" },
        rate,
        single.as_secs_f64()
    );
    assert!(ok);
}
