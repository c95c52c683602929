//! End-to-end checks of the `sirmine` binary: record wiring, flag surface,
//! and error exits.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sir_core::ingest::{load_csv, zscore, LoadOptions};
use sir_core::{solve_exhaustive, solve_pdp, MeasureEngine, MeasureKind};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sirmine")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

/// Deterministic pseudo-normal values via a summed xorshift, full-precision
/// formatting so the file round-trips to identical f64s.
fn noise_column(seed: u64, n: usize) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n)
        .map(|_| {
            let total: f64 = (0..12).map(|_| next()).sum();
            total - 6.0
        })
        .collect()
}

fn csv_from_columns(columns: &[(&str, &[f64])]) -> String {
    let header = columns
        .iter()
        .map(|(id, _)| *id)
        .collect::<Vec<_>>()
        .join(",");
    let n = columns[0].1.len();
    let mut out = header + "\n";
    for t in 0..n {
        let row = columns
            .iter()
            .map(|(_, v)| format!("{}", v[t]))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    out
}

#[test]
fn mine_matches_the_library_and_the_exhaustive_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let n = 16;
    let a = noise_column(11, n);
    let mut b = noise_column(12, n);
    b[4..10].copy_from_slice(&a[4..10]);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &b)]));

    let output = run(&[
        "mine",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "zscore",
        "--pair",
        "a",
        "b",
        "--tau",
        "1",
        "--lmin",
        "3",
    ]);
    assert!(output.status.success());

    // Recompute through the library on the same file.
    let dataset = load_csv(&path, &LoadOptions::default()).unwrap();
    let x = zscore(dataset.get("a").unwrap()).unwrap();
    let y = zscore(dataset.get("b").unwrap()).unwrap();
    let engine = MeasureEngine::build(&x, &y, MeasureKind::Ap).unwrap();
    let expected = solve_pdp(&engine, 1.0, 3);
    assert_eq!(stdout(&output).trim_end(), expected.to_record());

    // And against the independent enumeration oracle (N <= 20).
    let oracle = solve_exhaustive(&engine, 1.0, 3);
    assert_eq!(expected.sum_length, oracle.sum_length);
}

#[test]
fn mse_on_identical_columns_covers_everything() {
    let dir = tempfile::tempdir().unwrap();
    let n = 40;
    let a = noise_column(21, n);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &a)]));
    let output = run(&[
        "mine",
        "--input",
        path.to_str().unwrap(),
        "--pair",
        "a",
        "b",
        "--measure",
        "mse",
        "--tau",
        "0.1",
        "--lmin",
        "6",
    ]);
    assert!(output.status.success());
    let line = stdout(&output);
    let fields: Vec<&str> = line.trim_end().split('\t').collect();
    assert_eq!(fields[2], format!("1-{n}"));
    assert_eq!(fields[3], n.to_string());
}

#[test]
fn unknown_series_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = noise_column(31, 12);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &a)]));
    let output = run(&[
        "mine",
        "--input",
        path.to_str().unwrap(),
        "--pair",
        "a",
        "missing",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("unknown series"), "stderr: {stderr}");
    assert!(output.stdout.is_empty());
}

#[test]
fn bad_input_file_exits_nonzero() {
    let output = run(&["mine", "--input", "/no/such/file.csv", "--pair", "a", "b"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn bench_single_length_prints_one_row_per_solver() {
    let output = run(&[
        "bench",
        "--lengths",
        "120",
        "--pairs-per-length",
        "1",
        "--seed",
        "3",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("dp\t120\t"));
    assert!(lines[1].starts_with("pdp\t120\t"));
}

#[test]
fn bench_rejects_unsorted_lengths() {
    let output = run(&["bench", "--lengths", "240,120"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("ascending"));
}

#[test]
fn anomalies_with_no_sirs_score_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let n = 30;
    let a = noise_column(41, n);
    let b = noise_column(42, n);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &b)]));
    // tau far beyond reach: every SIR is empty.
    let output = run(&[
        "anomalies",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "zscore",
        "--tau",
        "1000",
        "--window",
        "6",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), n - 6 + 1);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(*line, format!("{}\t0.000000", i + 1));
    }
}

#[test]
fn associated_finds_the_planted_four_pair_set() {
    // Eight columns: a0..a3,b0..b3 where ai == bi on [1,40] of 60. All four
    // (ai,bi) SIRs are active together on those timestamps.
    let dir = tempfile::tempdir().unwrap();
    let n = 60;
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for i in 0..4 {
        let a = noise_column(100 + i, n);
        let mut b = noise_column(200 + i, n);
        b[..40].copy_from_slice(&a[..40]);
        columns.push((format!("a{i}"), a));
        columns.push((format!("b{i}"), b));
    }
    let borrowed: Vec<(&str, &[f64])> = columns
        .iter()
        .map(|(id, v)| (id.as_str(), v.as_slice()))
        .collect();
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&borrowed));
    let output = run(&[
        "associated",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "zscore",
        "--measure",
        "mse",
        "--tau",
        "0.1",
        "--lmin",
        "6",
        "--min-support",
        "40",
        "--max-full-corr",
        "1",
        "--redundancy",
        "1",
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = stdout(&output);
    let top = text.lines().next().expect("at least one set");
    let fields: Vec<&str> = top.split('\t').collect();
    assert!(fields[0].parse::<usize>().unwrap() >= 40);
    for i in 0..4 {
        assert!(fields[1].contains(&format!("a{i}:b{i}")), "line: {top}");
    }
}

#[test]
fn help_documents_every_flag() {
    let expectations: &[(&str, &[&str])] = &[
        (
            "mine",
            &["--input", "--preprocess", "--period", "--measure", "--tau", "--lmin", "--pair", "--all", "--max-full-corr", "--redundancy", "--workers", "--output"],
        ),
        (
            "batch",
            &["--input", "--measure", "--tau", "--lmin", "--max-full-corr", "--redundancy", "--workers", "--output"],
        ),
        (
            "significance",
            &["--input", "--pair", "--randomizations", "--seed", "--replace-second", "--verbose", "--workers", "--output"],
        ),
        (
            "anomalies",
            &["--input", "--window", "--measure", "--tau", "--lmin", "--workers", "--output"],
        ),
        (
            "associated",
            &["--input", "--min-support", "--min-set-size", "--all-itemsets", "--workers", "--output"],
        ),
        (
            "bench",
            &["--lengths", "--pairs-per-length", "--seed", "--tau", "--lmin", "--measure", "--output"],
        ),
    ];
    for (command, flags) in expectations {
        let output = run(&[command, "--help"]);
        assert!(output.status.success());
        let text = stdout(&output);
        for flag in *flags {
            assert!(text.contains(flag), "{command} --help missing {flag}");
        }
        // Defaults are spelled out where they exist.
        if *command != "mine" {
            continue;
        }
        assert!(text.contains("default"), "mine --help shows defaults");
    }
}

#[test]
fn output_flag_writes_the_same_records_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let a = noise_column(51, 40);
    let b = noise_column(52, 40);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &b)]));
    let out_path = dir.path().join("records.txt");
    let piped = run(&[
        "batch",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "zscore",
        "--tau",
        "0.8",
        "--lmin",
        "3",
    ]);
    let filed = run(&[
        "batch",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "zscore",
        "--tau",
        "0.8",
        "--lmin",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(piped.status.success() && filed.status.success());
    assert!(filed.stdout.is_empty());
    let file_contents = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(stdout(&piped), file_contents);
}

#[test]
fn climate_preset_requires_a_period() {
    let dir = tempfile::tempdir().unwrap();
    let a = noise_column(61, 24);
    let b = noise_column(62, 24);
    let path = write_file(dir.path(), "t.csv", &csv_from_columns(&[("a", &a), ("b", &b)]));
    let without = run(&[
        "mine",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "climate",
        "--pair",
        "a",
        "b",
    ]);
    assert_eq!(without.status.code(), Some(2));
    let with = run(&[
        "mine",
        "--input",
        path.to_str().unwrap(),
        "--preprocess",
        "climate",
        "--period",
        "12",
        "--pair",
        "a",
        "b",
    ]);
    assert!(with.status.success());
}
