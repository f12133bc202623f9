//! Downstream evaluation of front individuals and report files.
//!
//! Embeddings are judged by k-nearest-neighbour accuracy under stratified
//! k-fold cross-validation. Reports are plain CSV plus per-individual
//! s-expression and DOT files, so reruns with the same seed are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::complexity::{CostClass, CostModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::evolution::{Archive, FrontEntry, GenerationStats, RunResult};
use crate::expr::{ExprTree, Individual};
use crate::matrix::{squared_distance, Matrix};
use crate::rng::{self, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    pub k: usize,
    pub folds: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { k: 5, folds: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvAccuracy {
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
    /// False when a class was too small and folds were assigned unstratified.
    pub stratified: bool,
}

/// Majority label among the `k` nearest training rows (all of them when `k`
/// exceeds the training set). Distance ties go to the lower index, vote ties
/// to the smaller class id.
pub fn knn_predict(train: &[&[f64]], train_labels: &[usize], query: &[f64], k: usize) -> usize {
    let mut order: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| (squared_distance(row, query), i))
        .collect();
    let k = k.min(order.len());
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < order.len() {
        order.select_nth_unstable_by(k, by_distance);
    }
    let n_classes = train_labels.iter().max().map_or(0, |m| m + 1);
    let mut votes = vec![0usize; n_classes];
    for &(_, i) in &order[..k] {
        votes[train_labels[i]] += 1;
    }
    // first maximum is the smallest class id
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

/// Fold index per instance. Stratified: each class is shuffled and dealt
/// round-robin, continuing the deal across classes.
pub fn assign_folds<R: Rng + ?Sized>(labels: &[usize], folds: usize, stratified: bool, rng: &mut R) -> Vec<usize> {
    let n = labels.len();
    let mut fold_of = vec![0; n];
    if stratified {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut next = 0;
        for class in 0..n_classes {
            let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            members.shuffle(rng);
            for i in members {
                fold_of[i] = next % folds;
                next += 1;
            }
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(rng);
        for (pos, i) in all.into_iter().enumerate() {
            fold_of[i] = pos % folds;
        }
    }
    fold_of
}

pub fn knn_cv_accuracy<R: Rng + ?Sized>(
    embedding: &Matrix,
    labels: &[usize],
    k: usize,
    folds: usize,
    rng: &mut R,
) -> Result<CvAccuracy> {
    let n = embedding.rows();
    if labels.len() != n {
        return Err(Error::LengthMismatch(labels.len(), n));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if folds < 2 || folds > n {
        return Err(Error::InvalidArgument(format!("need 2 <= folds <= n ({n}), got {folds}")));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let smallest = (0..n_classes)
        .map(|c| labels.iter().filter(|&&l| l == c).count())
        .filter(|&count| count > 0)
        .min()
        .unwrap_or(0);
    let stratified = smallest >= folds;
    if !stratified {
        log::warn!("a class has {smallest} members, fewer than {folds} folds; using unstratified folds");
    }
    let fold_of = assign_folds(labels, folds, stratified, rng);

    let accuracies: Vec<f64> = (0..folds)
        .map(|fold| {
            let (mut train, mut train_labels) = (Vec::new(), Vec::new());
            for i in (0..n).filter(|&i| fold_of[i] != fold) {
                train.push(embedding.row(i));
                train_labels.push(labels[i]);
            }
            let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
            let correct = test
                .iter()
                .filter(|&&i| knn_predict(&train, &train_labels, embedding.row(i), k) == labels[i])
                .count();
            correct as f64 / test.len() as f64
        })
        .collect();
    let mean = accuracies.iter().sum::<f64>() / folds as f64;
    let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / folds as f64;
    Ok(CvAccuracy {
        mean,
        std: var.sqrt(),
        stratified,
    })
}

/// Node census of an individual.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SummaryStats {
    pub nodes: usize,
    pub exp: usize,
    pub prod: usize,
    pub sum: usize,
    pub leaves: usize,
    pub unique_features: usize,
}

pub fn summary_stats(ind: &Individual, model: &CostModel) -> SummaryStats {
    let mut s = SummaryStats::default();
    let mut features = std::collections::BTreeSet::new();
    for tree in &ind.trees {
        tree.visit(&mut |node| {
            s.nodes += 1;
            match node {
                ExprTree::Feature(k) => {
                    s.leaves += 1;
                    features.insert(*k);
                }
                ExprTree::Call(op, _) => match model.class_of(*op) {
                    Some(CostClass::Sum) => s.sum += 1,
                    Some(CostClass::Prod) => s.prod += 1,
                    Some(CostClass::Exp) => s.exp += 1,
                    None => {}
                },
            }
        });
    }
    s.unique_features = features.len();
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub id: usize,
    pub cost: f64,
    pub complexity: f64,
    pub n_trees: usize,
    pub accuracy: Option<CvAccuracy>,
    pub stats: SummaryStats,
}

/// Scores archive entries (sorted by ascending complexity) with KNN
/// cross-validation. Every entry sees the same fold assignment.
pub fn evaluate_front(
    entries: &[&FrontEntry],
    dataset: &Dataset,
    model: &CostModel,
    eval: &EvalConfig,
    seed: u64,
) -> Result<Vec<EvalRecord>> {
    entries
        .par_iter()
        .enumerate()
        .map(|(id, e)| {
            let accuracy = match dataset.labels() {
                Some(labels) => {
                    let mut rng = rng::stream(seed, Stream::Folds);
                    Some(knn_cv_accuracy(&e.individual.embed(dataset), labels, eval.k, eval.folds, &mut rng)?)
                }
                None => None,
            };
            Ok(EvalRecord {
                id,
                cost: e.cost(),
                complexity: e.complexity(),
                n_trees: e.individual.trees.len(),
                accuracy,
                stats: summary_stats(&e.individual, model),
            })
        })
        .collect()
}

/// KNN accuracy on the normalized input features.
pub fn baseline_accuracy(dataset: &Dataset, eval: &EvalConfig, seed: u64) -> Result<Option<CvAccuracy>> {
    match dataset.labels() {
        Some(labels) => {
            let mut rng = rng::stream(seed, Stream::Folds);
            Ok(Some(knn_cv_accuracy(dataset.instances(), labels, eval.k, eval.folds, &mut rng)?))
        }
        None => Ok(None),
    }
}

pub const FRONT_HEADER: &str = "id,cost,complexity,n_trees,n_nodes,n_exp,n_prod,n_sum,n_leaf,n_unique_feat,knn_acc_mean,knn_acc_std";
pub const TELEMETRY_HEADER: &str = "generation,min_cost,min_complexity,archive_size";
pub const SUMMARY_HEADER: &str = "statistic,min,median,mean,max";

pub fn front_csv(records: &[EvalRecord]) -> String {
    let mut out = String::from(FRONT_HEADER);
    out.push('\n');
    for r in records {
        let (mean, std) = match r.accuracy {
            Some(a) => (a.mean.to_string(), a.std.to_string()),
            None => (String::new(), String::new()),
        };
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.id, r.cost, r.complexity, r.n_trees, s.nodes, s.exp, s.prod, s.sum, s.leaves, s.unique_features, mean, std
        );
    }
    out
}

pub fn telemetry_csv(telemetry: &[GenerationStats]) -> String {
    let mut out = String::from(TELEMETRY_HEADER);
    out.push('\n');
    for t in telemetry {
        let _ = writeln!(out, "{},{},{},{}", t.generation, t.min_cost, t.min_complexity, t.archive_size);
    }
    out
}

/// Min/median/mean/max of each per-individual statistic over the front.
pub fn summary_csv(records: &[EvalRecord]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    type Column = (&'static str, fn(&EvalRecord) -> f64);
    let columns: [Column; 8] = [
        ("n_trees", |r| r.n_trees as f64),
        ("n_nodes", |r| r.stats.nodes as f64),
        ("n_exp", |r| r.stats.exp as f64),
        ("n_prod", |r| r.stats.prod as f64),
        ("n_sum", |r| r.stats.sum as f64),
        ("n_leaf", |r| r.stats.leaves as f64),
        ("n_unique_feat", |r| r.stats.unique_features as f64),
        ("complexity", |r| r.complexity),
    ];
    if records.is_empty() {
        return out;
    }
    for (name, get) in columns {
        let mut v: Vec<f64> = records.iter().map(get).collect();
        v.sort_by(f64::total_cmp);
        let median = if v.len() % 2 == 1 {
            v[v.len() / 2]
        } else {
            (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
        };
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let _ = writeln!(out, "{name},{},{median},{mean},{}", v[0], v[v.len() - 1]);
    }
    out
}

/// Paths written by [`report`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReportFiles {
    pub front: PathBuf,
    pub final_front: PathBuf,
    pub telemetry: PathBuf,
    pub summary: PathBuf,
    pub baseline: PathBuf,
    pub trees: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_trees(dir: &Path, prefix: &str, entries: &[&FrontEntry], names: &[String]) -> Result<()> {
    for (id, e) in entries.iter().enumerate() {
        write(&dir.join(format!("{prefix}{id}.sexp")), &e.sexprs)?;
        write(&dir.join(format!("{prefix}{id}.dot")), &e.individual.to_dot(Some(names)))?;
    }
    Ok(())
}

/// Writes all report files into `out_dir`:
///
/// - `front.csv`: the all-generations archive, ascending complexity
/// - `final_front.csv`: non-dominated final incumbents, same columns
/// - `telemetry.csv`, `summary.csv`, `baseline.csv`
/// - `trees/<id>.sexp` and `trees/<id>.dot` for archive entries,
///   `trees/final_<id>.*` for the final front
pub fn report(
    result: &RunResult,
    dataset: &Dataset,
    model: &CostModel,
    eval: &EvalConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(ReportFiles, Vec<EvalRecord>)> {
    report_parts(&result.archive, &result.final_front, &result.telemetry, dataset, model, eval, seed, out_dir)
}

#[allow(clippy::too_many_arguments)]
pub fn report_parts(
    archive: &Archive,
    final_front: &Archive,
    telemetry: &[GenerationStats],
    dataset: &Dataset,
    model: &CostModel,
    eval: &EvalConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(ReportFiles, Vec<EvalRecord>)> {
    let trees = out_dir.join("trees");
    fs::create_dir_all(&trees).map_err(|e| Error::io(&trees, e))?;

    let entries = archive.sorted();
    let records = evaluate_front(&entries, dataset, model, eval, seed)?;
    let final_entries = final_front.sorted();
    let final_records = evaluate_front(&final_entries, dataset, model, eval, seed)?;

    let files = ReportFiles {
        front: out_dir.join("front.csv"),
        final_front: out_dir.join("final_front.csv"),
        telemetry: out_dir.join("telemetry.csv"),
        summary: out_dir.join("summary.csv"),
        baseline: out_dir.join("baseline.csv"),
        trees,
    };
    write(&files.front, &front_csv(&records))?;
    write(&files.final_front, &front_csv(&final_records))?;
    write(&files.telemetry, &telemetry_csv(telemetry))?;
    write(&files.summary, &summary_csv(&records))?;
    let baseline = match baseline_accuracy(dataset, eval, seed)? {
        Some(a) => format!("knn_acc_mean,knn_acc_std\n{},{}\n", a.mean, a.std),
        None => "knn_acc_mean,knn_acc_std\n".to_owned(),
    };
    write(&files.baseline, &baseline)?;
    write_trees(&files.trees, "", &entries, dataset.feature_names())?;
    write_trees(&files.trees, "final_", &final_entries, dataset.feature_names())?;
    Ok((files, records))
}
