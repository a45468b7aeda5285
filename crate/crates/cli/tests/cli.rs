use std::process::{Command, Output};

use aim_cli::output::StateRecord;
use aim_cli::{execute, EXIT_CONVERGENCE, EXIT_OK, EXIT_VALIDATION};

fn aim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aim")).args(args).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<StateRecord> {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON array of records")
}

fn eps(r: &StateRecord) -> f64 {
    r.epsilon.expect("epsilon present").0
}

#[test]
fn solves_a_single_oscillator_state() {
    let out = aim(&["solve", "--kappa", "2", "--reduced", "--a-tilde", "1", "--gamma", "10", "--beta", "1", "--n", "2", "--l", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = records(&out);
    assert_eq!(r.len(), 1);
    assert!((eps(&r[0]) - 152.2273430525).abs() < 1e-6);
    assert_eq!(r[0].status, "converged");
    assert!(r[0].e_physical.is_none());
    assert!(r[0].trace.is_none());
}

#[test]
fn solves_a_grid_of_linear_states_in_order() {
    let out = aim(&["solve", "--kappa", "1", "--reduced", "--a-tilde", "1", "--gamma", "1", "--beta", "0.5", "--n", "0..2", "--l", "0..2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = records(&out);
    let order: Vec<(u32, u32)> = r.iter().map(|r| (r.n, r.l)).collect();
    let want: Vec<(u32, u32)> = (0..3).flat_map(|n| (0..3).map(move |l| (n, l))).collect();
    assert_eq!(order, want);
    let last = r.iter().find(|r| r.n == 2 && r.l == 2).unwrap();
    assert!((eps(last) - 6.704883).abs() < 1e-6);
}

#[test]
fn json_keys_are_in_record_order() {
    let out = aim(&["solve", "--kappa", "2", "--reduced", "--a-tilde", "1", "--gamma", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = ["kappa", "a_tilde", "gamma", "beta", "n", "l", "epsilon", "e_physical", "k_converged", "status"];
    let mut at = 0;
    for k in keys {
        let pos = text[at..].find(&format!("\"{k}\"")).unwrap_or_else(|| panic!("{k} out of order"));
        at += pos;
    }
}

#[test]
fn closed_form_kappa_is_sent_to_exact() {
    let out = aim(&["solve", "--kappa", "0", "--B", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact"));
    let out = aim(&["exact", "--kappa", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn unknown_table_is_rejected() {
    let out = aim(&["table", "9"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(out.stdout.is_empty());
}

#[test]
fn validation_failures_exit_2() {
    for args in [
        &["solve", "--kappa", "3"][..],
        &["solve", "--kappa", "1", "--reduced", "--gamma", "1", "--A", "1"],
        &["solve", "--kappa", "1", "--precision-bits", "32"],
        &["solve", "--kappa", "1", "--n", "2..1"],
        &["solve", "--kappa", "1", "--beta", "-1"],
        &["solve", "--kappa", "1", "--C", "-1"],
        &["solve", "--kappa", "1", "--beta", "0.5,1"],
        &["wavefunction", "--kappa", "1", "--points", "10"],
    ] {
        let out = aim(args);
        assert_eq!(out.status.code(), Some(EXIT_VALIDATION), "{args:?}");
    }
}

#[test]
fn unconverged_state_exits_3_with_a_record() {
    let out = aim(&["solve", "--kappa", "1", "--reduced", "--gamma", "1", "--k-min", "10", "--k-max", "12", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(EXIT_CONVERGENCE));
    let r = records(&out);
    assert_eq!(r.len(), 1);
    assert_ne!(r[0].status, "converged");
    assert_eq!(r[0].k_converged, Some(12));
}

#[test]
fn missing_length_scale_is_reported_per_state() {
    let out = aim(&["solve", "--kappa", "1", "--B", "0", "--C", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let r = records(&out);
    assert_eq!(r[0].status, "failed");
    assert!(r[0].epsilon.is_none());
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["solve", "--kappa", "2", "--reduced", "--a-tilde", "1", "--gamma", "1", "--n", "0,1", "--l", "0..1"];
    let first = aim(&args);
    let again = aim(&args);
    let serial = Command::new(env!("CARGO_BIN_EXE_aim"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, serial.stdout);
}

#[test]
fn records_round_trip_into_configs() {
    let out = aim(&["solve", "--kappa", "2", "--A", "0.5", "--B", "1", "--C", "2", "--n", "0..1", "--l", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    for r in records(&out) {
        let cfg = r.to_config().unwrap();
        let again = execute(&cfg).unwrap();
        assert_eq!(again.code, EXIT_OK);
        let back: Vec<StateRecord> = serde_json::from_str(&again.output).unwrap();
        assert_eq!((back[0].n, back[0].l), (r.n, r.l));
        assert!((eps(&back[0]) - eps(&r)).abs() <= 1e-8 * eps(&r).abs());
    }
}

#[test]
fn physical_and_reduced_entry_agree() {
    // A = 0, B = C = 1, kappa = 2, m = hbar = 1: gamma = sqrt(2 * 0.5^4)
    let phys = records(&aim(&["solve", "--kappa", "2", "--C", "1"]));
    let red = records(&aim(&["solve", "--kappa", "2", "--reduced", "--a-tilde", "0", "--gamma", "0.3535533905932738"]));
    assert!((phys[0].gamma.unwrap().0 - 0.3535533906).abs() < 1e-10);
    assert!((eps(&phys[0]) - eps(&red[0])).abs() < 1e-9);
    let e = phys[0].e_physical.unwrap().0;
    assert!((e - 2.0 * eps(&phys[0])).abs() < 1e-9);
    assert!((e - 0.59377126).abs() < 1e-7);
}

#[test]
fn converge_reports_rows_every_ten_iterations() {
    let out = aim(&[
        "converge", "--kappa", "1", "--reduced", "--a-tilde", "1", "--gamma", "1", "--beta", "0.2,2.0", "--n", "0", "--l", "0",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = records(&out);
    assert_eq!(r.len(), 2);
    let at = |rec: &StateRecord, k: usize| rec.trace.as_ref().unwrap().iter().find(|p| p.k == k).unwrap().epsilon.0;
    let ks: Vec<usize> = r[0].trace.as_ref().unwrap().iter().map(|p| p.k).collect();
    assert_eq!(ks, vec![20, 30, 40, 50, 60, 70, 80, 90]);
    assert!((at(&r[1], 20) - 2.46417111).abs() < 1e-6);
    assert!((at(&r[0], 40) - 2.36071234).abs() < 1e-6);
}

#[test]
fn csv_has_header_and_trace_column() {
    let out = aim(&["exact", "--kappa", "0", "--B", "1", "--n", "0..1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kappa,a_tilde,gamma,beta,n,l,epsilon,e_physical,k_converged,status,trace"));
    assert_eq!(lines.next(), Some("0,0,0,,0,0,-0.25,-0.5,,exact,"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn hydrogen_through_exact() {
    let r = records(&aim(&["exact", "--kappa", "0", "--B", "1"]));
    assert_eq!(r[0].e_physical.unwrap().0, -0.5);
}

#[test]
fn table_four_passes() {
    let out = aim(&["table", "4"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let cells: Vec<aim_cli::output::CellRecord> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cells.len(), 1);
    assert!(cells[0].pass);
}

#[test]
fn oracle_agrees_with_solver() {
    let r = records(&aim(&["oracle", "--kappa", "2", "--C", "1"]));
    assert_eq!(r[0].status, "converged");
    assert!((r[0].e_physical.unwrap().0 - 0.59377126).abs() < 1e-6);
}

#[test]
fn wavefunction_writes_to_file() {
    let dir = std::env::temp_dir().join(format!("aim-wf-{}", std::process::id()));
    let path = dir.with_extension("csv");
    let out = aim(&[
        "wavefunction", "--kappa", "1", "--reduced", "--a-tilde", "1", "--gamma", "1", "--n", "1", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 400);
    assert_eq!(aim_core::engine::count_sign_changes(&values), 1);
}

#[test]
fn closed_form_wavefunction_in_reduced_units() {
    let out = aim(&["wavefunction", "--kappa", "-1", "--reduced", "--a-tilde", "0", "--gamma", "0.5", "--n", "2", "--l", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let samples: Vec<aim_cli::output::SampleRecord> = serde_json::from_slice(&out.stdout).unwrap();
    let values: Vec<f64> = samples.iter().map(|s| s.value.0).collect();
    assert_eq!(aim_core::engine::count_sign_changes(&values), 2);
}
