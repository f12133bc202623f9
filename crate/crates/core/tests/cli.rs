use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use manifold_gp::dataset::{Dataset, DatasetOptions};
use manifold_gp::expr::Individual;
use manifold_gp::harness::{FRONT_HEADER, SUMMARY_HEADER, TELEMETRY_HEADER};
use manifold_gp::manifold_cost::cost;

fn wine() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/wine.csv")
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manifold-gp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let data = wine();
    let mut args = vec![
        "run",
        "--data",
        data.to_str().unwrap(),
        "--label-col",
        "class",
        "--seed",
        "3",
        "--generations",
        "5",
        "--population",
        "12",
        "--neighbourhood",
        "5",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    bin(&args)
}

#[test]
fn run_writes_every_report_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = small_run(&out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("front entries written to"));

    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    let mut lines = front.lines();
    assert_eq!(lines.next(), Some(FRONT_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(fields[0], i.to_string());
        assert!(out.join(format!("trees/{i}.sexp")).exists());
        assert!(out.join(format!("trees/{i}.dot")).exists());
    }
    let final_front = fs::read_to_string(out.join("final_front.csv")).unwrap();
    assert!(final_front.starts_with(FRONT_HEADER));

    let telemetry = fs::read_to_string(out.join("telemetry.csv")).unwrap();
    assert!(telemetry.starts_with(TELEMETRY_HEADER));
    assert_eq!(telemetry.lines().count(), 1 + 6);
    assert!(fs::read_to_string(out.join("summary.csv")).unwrap().starts_with(SUMMARY_HEADER));
    assert!(fs::read_to_string(out.join("baseline.csv")).unwrap().starts_with("knn_acc_mean,knn_acc_std\n0."));

    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    assert!(resolved.contains("evo.seed = 3"));
    assert!(resolved.contains("evo.max_trees = 6"));
    assert!(resolved.contains("cost.relu = \"exp\""));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    assert!(small_run(&a, &[]).status.success());
    let b = tmp.path().join("b");
    let o = bin(&[
        "run",
        "--config",
        a.join("config.resolved").to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for file in ["front.csv", "telemetry.csv", "final_front.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(small_run(&a, &[]).status.success());
    assert!(small_run(&b, &[]).status.success());
    assert_eq!(fs::read(a.join("front.csv")).unwrap(), fs::read(b.join("front.csv")).unwrap());
}

#[test]
fn bad_probabilities_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = small_run(&tmp.path().join("out"), &["--p-xover", "0.9", "--p-mut", "0.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("probabilities must sum to 1"), "{}", stderr(&o));
}

#[test]
fn missing_dataset_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["run", "--data", tmp.path().join("nope.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.csv"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(
        &config,
        format!(
            "data.path = {:?}\ndata.label_col = \"class\"\nevo.generations = 3\nevo.population = 10\nevo.neighbourhood = 4\nevo.seed = 9\n",
            wine().to_str().unwrap()
        ),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = bin(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    assert!(resolved.contains("evo.seed = 11"));
    assert!(resolved.contains("evo.generations = 3"));
    assert!(resolved.contains("evo.population = 10"));
}

#[test]
fn unknown_config_key_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(&config, "evo.generation = 3\n").unwrap();
    let o = bin(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("evo.generation"));
}

#[test]
fn score_prints_breakdown() {
    let tmp = tempfile::tempdir().unwrap();
    let trees = tmp.path().join("t.txt");
    fs::write(&trees, "(add f0 f1)\n(mul (add f0 f1) f2)\n").unwrap();
    let o = bin(&["score", trees.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("tree 0: (add f0 f1)\n  F = 2\n  baseline = 4\n"), "{s}");
    assert!(s.contains("tree 1: (mul (add f0 f1) f2)\n  F = 8\n"), "{s}");
    assert!(s.contains("individual: F = 10,"), "{s}");
}

#[test]
fn score_respects_cost_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let trees = tmp.path().join("t.txt");
    fs::write(&trees, "(add f0 f1)\n").unwrap();
    let o = bin(&["score", trees.to_str().unwrap(), "--cost-set", "add=exp"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("  F = 4\n"), "{}", stdout(&o));
}

#[test]
fn score_rejects_empty_and_malformed_files() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let o = bin(&["score", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no trees found"));

    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "(foo f0 f1)\n").unwrap();
    let o = bin(&["score", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown operator 'foo'"));
}

#[test]
fn embed_identity_trees() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d.csv");
    fs::write(&data, "a,b\n1,10\n2,20\n3,40\n").unwrap();
    let trees = tmp.path().join("t.txt");
    fs::write(&trees, "f1\nf0\n").unwrap();
    let o = bin(&["embed", trees.to_str().unwrap(), "--data", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "dim0,dim1\n0,0\n0.3333333333333333,0.5\n1,1\n");
}

#[test]
fn embed_rejects_out_of_range_feature() {
    let tmp = tempfile::tempdir().unwrap();
    let trees = tmp.path().join("t.txt");
    fs::write(&trees, "(add f0 f99)\n").unwrap();
    let o = bin(&[
        "embed",
        trees.to_str().unwrap(),
        "--data",
        wine().to_str().unwrap(),
        "--label-col",
        "class",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("f99"), "{}", stderr(&o));
}

#[test]
fn embedding_of_front_entry_reproduces_its_cost() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(small_run(&out, &[]).status.success());
    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    let first: Vec<&str> = front.lines().nth(1).unwrap().split(',').collect();
    let reported: f64 = first[1].parse().unwrap();

    let emb = out.join("emb.csv");
    let o = bin(&[
        "embed",
        out.join("trees/0.sexp").to_str().unwrap(),
        "--data",
        wine().to_str().unwrap(),
        "--label-col",
        "class",
        "--out",
        emb.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&emb).unwrap().starts_with("dim0"));

    let ds = Dataset::load_csv(wine(), Some("class"), &DatasetOptions::default()).unwrap();
    let ind = Individual::parse(&fs::read_to_string(out.join("trees/0.sexp")).unwrap()).unwrap();
    assert_eq!(cost(&ind, &ds), reported);
}
