use std::process::Command;

use depolmark::dynmaps::crossover_point;
use depolmark_cli::output::to_json;
use depolmark_cli::{figure, run_sweep, Quantity, SweepError, SweepSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depolmark"))
}

fn values(col: Option<Vec<Option<f64>>>) -> Vec<f64> {
    col.expect("column exists")
        .into_iter()
        .map(|v| v.expect("regular sample"))
        .collect()
}

#[test]
fn choi_eigenvalues_cross_at_crossover() {
    let spec = SweepSpec {
        q: 0.3,
        p_min: 0.3,
        steps: 701,
        ..SweepSpec::new(Quantity::ChoiEigs)
    };
    let t = run_sweep(&spec).unwrap();
    let (li, lx) = (values(t.column("Lambda_I")), values(t.column("Lambda_X")));
    let ps = t.abscissa_values();
    let cross: Vec<f64> = (1..ps.len())
        .filter(|&i| (li[i] - lx[i]).signum() != (li[i - 1] - lx[i - 1]).signum())
        .map(|i| ps[i])
        .collect();
    assert_eq!(cross.len(), 1);
    assert!((cross[0] - 0.7726).abs() < 2e-3, "{cross:?}");
}

#[test]
fn decay_rate_positive_without_perturbation() {
    let spec = SweepSpec {
        alpha: vec![0.0],
        p_max: 0.99,
        ..SweepSpec::new(Quantity::DecayRate)
    };
    let t = run_sweep(&spec).unwrap();
    assert!(values(t.column("gamma")).iter().all(|&g| g > 0.0));
}

#[test]
fn two_qubit_g_dominates() {
    let spec = SweepSpec {
        alpha: vec![0.9],
        qubits: vec![1, 2],
        p_min: 0.70,
        p_max: 0.95,
        steps: 6,
        ..SweepSpec::new(Quantity::GFunction)
    };
    let t = run_sweep(&spec).unwrap();
    assert_eq!(t.abscissa, "q");
    let (g1, g2) = (values(t.column("g_n1")), values(t.column("g_n2")));
    assert!(g1.iter().zip(&g2).all(|(a, b)| b >= a));
    assert!(g2.iter().any(|&g| g > 0.0));
}

#[test]
fn fig4_columns_and_values() {
    let tables = figure("fig4").unwrap();
    assert_eq!(tables.len(), 1);
    let (stem, t) = &tables[0];
    assert_eq!(stem, "fig4");
    assert_eq!(t.abscissa, "alpha");
    assert_eq!(t.series, ["N_BLP", "N_HCLA_numeric", "N_HCLA_closed"]);
    assert_eq!(t.rows.len(), 101);
    for (alpha, row) in &t.rows {
        assert!((row[0].unwrap() - alpha / 4.0).abs() < 1e-8);
        assert!((row[1].unwrap() - row[2].unwrap()).abs() < 1e-6);
    }
}

#[test]
fn fig3_marks_the_pole() {
    let (_, t) = figure("fig3").unwrap().remove(0);
    let c = crossover_point(0.7, 2).unwrap();
    let gamma = t.column("gamma_a0.7").unwrap();
    let idx = t.abscissa_values().iter().position(|&p| p == c).unwrap();
    assert!(gamma[idx].is_none());
    assert_eq!(gamma.iter().filter(|v| v.is_none()).count(), 1);
}

#[test]
fn fig10_reports_both_qutrit_forms() {
    let (_, t) = figure("fig10").unwrap().remove(0);
    let (numeric, closed) = (values(t.column("N_HCLA_numeric")), values(t.column("N_HCLA_closed")));
    assert!((numeric[100] - 0.213_79).abs() < 1e-5);
    assert!((closed[100] - 0.105_36).abs() < 1e-5);
}

#[test]
fn unknown_figure_lists_ids() {
    match figure("fig99") {
        Err(SweepError::Usage(msg)) => assert!(msg.contains("fig1") && msg.contains("fig13")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn json_shape() {
    let spec = SweepSpec {
        alpha: vec![0.0],
        steps: 3,
        ..SweepSpec::new(Quantity::DecayRate)
    };
    let v = to_json(&run_sweep(&spec).unwrap());
    assert_eq!(v["columns"], serde_json::json!(["p", "gamma", "gamma_normalized"]));
    assert_eq!(v["spec"]["spec"]["quantity"], "decay-rate");
    assert!(v["spec"]["version"].is_string());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // γ̃ = 1/p is undefined at p = 0, γ = 1/(1 − p) at p = 1
    assert!(rows[0][2].is_null() && rows[2][1].is_null());
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str, format: &str| {
        let path = dir.path().join(name);
        let status = bin()
            .env("DEPOLMARK_THREADS", threads)
            .args([
                "sweep",
                "--quantity",
                "memory-x",
                "--alpha",
                "0,0.8",
                "--q",
                "0.3",
                "--steps",
                "57",
            ])
            .args(["--format", format, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    for format in ["csv", "json"] {
        let a = run("a", "1", format);
        assert_eq!(a, run("b", "1", format));
        assert_eq!(a, run("c", "4", format));
    }
    let csv = String::from_utf8(run("d", "2", "csv")).unwrap();
    assert!(csv.starts_with("p,X_a0,X_a0.8\n0.3,3,3\n"), "{csv}");
}

#[test]
fn figure_command_writes_files_and_warns_on_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["figure", "fig12", "--alpha", "0.5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    for stem in ["fig12_multiqubit", "fig12_multilevel"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{stem}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 602);
        assert!(!text.contains("NA"));
    }
    let header = std::fs::read_to_string(dir.path().join("fig12_multilevel.csv")).unwrap();
    assert!(header.starts_with("p,choi_norm_N2,choi_norm_N3,choi_norm_N4\n"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["sweep", "--quantity", "decay-rate", "--steps", "1"]), Some(2));
    assert_eq!(code(&["sweep", "--quantity", "nonsense"]), Some(2));
    assert_eq!(code(&["figure", "fig0"]), Some(2));
    let q = format!("{:?}", crossover_point(0.7, 2).unwrap());
    assert_eq!(
        code(&["sweep", "--quantity", "choi-norm", "--alpha", "0.7", "--q", &q]),
        Some(3)
    );
    let bad_threads = bin()
        .env("DEPOLMARK_THREADS", "zero")
        .args(["sweep", "--quantity", "blp"])
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
    assert_eq!(code(&["sweep", "--quantity", "blp", "--steps", "3"]), Some(0));
}
