use std::path::Path;
use std::process::Command;

use ttortho::io::set_from_bytes;
use ttortho::Kernel;
use ttortho_cli::table::{read_rows, HEADER};
use ttortho_cli::{cmd_plot, cmd_run, gen_bytes, CliError, InputSource, RunConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ttortho"))
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn gen_is_deterministic_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.ttv"), dir.path().join("b.ttv"));
    for p in [&a, &b] {
        let status = bin()
            .args(["gen", "--order", "3", "--mode-size", "15", "--count", "20", "--output"])
            .arg(p)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(u32::from_le_bytes(x[..4].try_into().unwrap()), 20);
    let set = set_from_bytes(&x).unwrap();
    assert_eq!(set.len(), 20);
    for v in &set {
        assert!((v.norm() - 1.0).abs() <= 1e-13);
        assert!(v.ranks().iter().all(|&r| r == 1));
    }
}

#[test]
fn run_from_file_matches_fresh_generation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ttv");
    std::fs::write(&input, gen_bytes(3, 6, 6).unwrap()).unwrap();
    let mut cfg = RunConfig::new(3, 6, 6);
    cfg.deltas = vec![1e-8];
    let fresh = cmd_run(&cfg).unwrap();
    cfg.input = InputSource::File(input);
    let loaded = cmd_run(&cfg).unwrap();
    assert_eq!(fresh.csv, loaded.csv);
    assert_eq!(fresh.exit_code(), 0);
}

#[test]
fn single_vector_gives_single_row() {
    for kernel in Kernel::ALL {
        let mut cfg = RunConfig::new(3, 5, 1);
        cfg.kernels = vec![kernel];
        cfg.deltas = vec![1e-5];
        let out = cmd_run(&cfg).unwrap();
        let rows: Vec<_> = out.rows.iter().filter(|r| r.kernel == kernel.name()).collect();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].loo.unwrap() <= 1e-14);
    }
}

#[test]
fn rounding_call_column_ends_at_table_counts() {
    let mut cfg = RunConfig::new(3, 6, 7);
    cfg.deltas = vec![1e-8];
    let out = cmd_run(&cfg).unwrap();
    for kernel in Kernel::ALL {
        let last = out.rows.iter().filter(|r| r.kernel == kernel.name()).last().unwrap();
        assert_eq!(last.k, 7);
        assert_eq!(last.rounding_calls, Some(kernel.expected_rounding_calls(7)));
    }
}

#[test]
fn run_binary_writes_csv_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let ok = bin()
        .args(["run", "--order", "3", "--mode-size", "5", "--count", "4", "--kernels", "mgs,householder", "--deltas", "1e-8", "--with-kappa", "--csv"])
        .arg(&csv)
        .arg("--svg-dir")
        .arg(dir.path().join("svg"))
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(&HEADER.join(",")));
    let rows = read_rows(text.as_bytes()).unwrap();
    assert!(rows.iter().any(|r| r.kernel == "householder-u"));
    assert!(rows.iter().filter(|r| r.kernel == "mgs").all(|r| r.kappa.is_some()));
    assert!(dir.path().join("svg/loo_delta_1e-8.svg").exists());

    // Gram breaks down on the d=3, n=15 set before k = 20.
    let failed = bin()
        .args(["run", "--order", "3", "--mode-size", "15", "--count", "20", "--kernels", "gram", "--deltas", "1e-8", "--csv"])
        .arg(&csv)
        .status()
        .unwrap();
    assert_eq!(failed.code(), Some(3));
    let rows = read_rows(std::fs::File::open(&csv).unwrap()).unwrap();
    let last = rows.last().unwrap();
    assert!(last.error.as_deref().unwrap().contains("singular"));
    assert!(last.loo.is_none());
}

#[test]
fn exit_codes_for_bad_config_and_io() {
    let bad = bin().args(["run", "--count", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let bad = bin().args(["run", "--kernels", "qr"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let bad = bin().args(["run", "--deltas", "-1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let missing = bin().args(["run", "--input", "/nonexistent/set.ttv"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
    let unknown = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn plot_rejects_empty_series() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    std::fs::write(&csv, format!("{}\n", HEADER.join(","))).unwrap();
    let err = cmd_plot(&csv, dir.path()).unwrap_err();
    assert!(matches!(err, CliError::Schema(_)));
    let out = bin().arg("plot").arg("--csv").arg(&csv).arg("--svg-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn plot_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    cmd_plot(&data("golden.csv"), dir.path()).unwrap();
    for (written, golden) in [
        ("loo_delta_1e-8.svg", "golden_loo.svg"),
        ("compression_ratio_delta_1e-8.svg", "golden_compression_ratio.svg"),
    ] {
        let got = std::fs::read_to_string(dir.path().join(written)).unwrap();
        let want = std::fs::read_to_string(data(golden)).unwrap();
        assert_eq!(got, want, "{written} differs from {golden}");
    }
}
