use std::fs;

use manifold_gp::complexity::CostModel;
use manifold_gp::dataset::{Dataset, DatasetOptions};
use manifold_gp::evolution::{evaluate, Archive, FrontEntry};
use manifold_gp::harness::{report_parts, EvalConfig, FRONT_HEADER, SUMMARY_HEADER, TELEMETRY_HEADER};
use manifold_gp::{Individual, Matrix};

fn dataset() -> Dataset {
    let rows: Vec<[f64; 3]> = (0..40)
        .map(|i| {
            let x = i as f64;
            [x, (x * 0.7).sin(), if i < 20 { 0.0 } else { 5.0 + x * 0.1 }]
        })
        .collect();
    let labels = (0..40).map(|i| if i < 20 { "a" } else { "b" }.to_owned()).collect();
    Dataset::new(
        Matrix::from_rows(&rows),
        vec!["x".into(), "wave".into(), "step".into()],
        Some(labels),
        &DatasetOptions::default(),
    )
    .unwrap()
}

fn entry(text: &str, ds: &Dataset, model: &CostModel) -> FrontEntry {
    let mut ind = Individual::parse(text).unwrap();
    ind.objectives = Some(evaluate(&ind, ds, model).unwrap());
    FrontEntry::new(ind, 0)
}

#[test]
fn empty_archive_gives_header_only_files() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = dataset();
    let model = CostModel::default();
    let (files, records) = report_parts(
        &Archive::new(),
        &Archive::new(),
        &[],
        &ds,
        &model,
        &EvalConfig::default(),
        0,
        tmp.path(),
    )
    .unwrap();
    assert!(records.is_empty());
    assert_eq!(fs::read_to_string(files.front).unwrap(), format!("{FRONT_HEADER}\n"));
    assert_eq!(fs::read_to_string(files.final_front).unwrap(), format!("{FRONT_HEADER}\n"));
    assert_eq!(fs::read_to_string(files.telemetry).unwrap(), format!("{TELEMETRY_HEADER}\n"));
    assert_eq!(fs::read_to_string(files.summary).unwrap(), format!("{SUMMARY_HEADER}\n"));
    assert_eq!(fs::read_dir(files.trees).unwrap().count(), 0);
}

#[test]
fn entries_are_written_in_ascending_complexity() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = dataset();
    let model = CostModel::default();
    let candidates = [
        "(sigmoid (mul (add f0 f1) (sub f2 f0)))\n(add f1 f2)\n",
        "(mul (relu f2) f0)\n",
        "(add f2 f0)\n(sub f1 f0)\n",
    ];
    let mut archive = Archive::new();
    for text in candidates {
        archive.insert(entry(text, &ds, &model));
    }
    // Whatever survives must be mutually non-dominated and sorted on output.
    assert!(archive.is_mutually_non_dominated());
    let (files, records) = report_parts(
        &archive,
        &archive,
        &[],
        &ds,
        &model,
        &EvalConfig::default(),
        0,
        tmp.path(),
    )
    .unwrap();
    assert_eq!(records.len(), archive.len());
    let front = fs::read_to_string(&files.front).unwrap();
    let complexities: Vec<f64> = front
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(complexities.len(), archive.len());
    assert!(complexities.windows(2).all(|w| w[0] <= w[1]), "{complexities:?}");
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r.id, i);
        let sexp = fs::read_to_string(files.trees.join(format!("{i}.sexp"))).unwrap();
        let dot = fs::read_to_string(files.trees.join(format!("{i}.dot"))).unwrap();
        assert_eq!(Individual::parse(&sexp).unwrap().trees.len(), r.n_trees);
        assert!(dot.contains("digraph tree0"));
        assert!(r.accuracy.is_some());
    }
    assert_eq!(fs::read_to_string(&files.summary).unwrap().lines().count(), 9);
}
