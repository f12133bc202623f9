//! Command-line front end: `run`, `score` and `embed`.
//!
//! Exit codes: 0 on success, 1 for configuration, input or parse errors, 2 for
//! failures after a run has started (for example unwritable output).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::complexity::{baseline_complexity, complexity_report};
use crate::config::RunConfig;
use crate::dataset::{Dataset, DatasetOptions};
use crate::error::{Error, Result};
use crate::evolution;
use crate::expr::Individual;
use crate::harness::{self, EvalRecord};

#[derive(Debug, Parser)]
#[command(name = "manifold-gp", version, about = "Evolve explainable low-dimensional embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Evolve a front of embeddings and write reports.
    Run(RunArgs),
    /// Print the complexity breakdown of the trees in a file.
    Score(ScoreArgs),
    /// Apply the trees in a file to a dataset and write the embedding as CSV.
    Embed(EmbedArgs),
}

#[derive(Debug, Args, Default)]
pub struct CostArgs {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub size_max: Option<usize>,
    /// Leaf weight in subtree measures.
    #[arg(long)]
    pub leaf: Option<f64>,
    /// Operator cost classes, e.g. `add=sum,relu=exp`.
    #[arg(long)]
    pub cost_set: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub label_col: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub neighbourhood: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub p_xover: Option<f64>,
    #[arg(long)]
    pub p_mut: Option<f64>,
    #[arg(long)]
    pub p_tree_mut: Option<f64>,
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub max_neighbours: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// File with one s-expression per line.
    pub trees: PathBuf,
    #[command(flatten)]
    pub cost: CostArgs,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// File with one s-expression per line.
    pub trees: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub label_col: Option<String>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

fn input(error: Error) -> Failure {
    Failure { code: 1, error }
}

fn runtime(error: Error) -> Failure {
    Failure { code: 2, error }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a).map(|s| print!("{s}")),
        Command::Score(a) => cmd_score(&a).map(|s| print!("{s}")),
        Command::Embed(a) => cmd_embed(&a).map(|s| print!("{s}")),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.error);
            f.code
        }
    }
}

fn apply_cost_args(config: &mut RunConfig, args: &CostArgs) -> Result<()> {
    if let Some(mu) = args.mu {
        config.cost.mu = mu;
    }
    if let Some(s) = args.size_max {
        config.cost.size_max = s;
    }
    if let Some(l) = args.leaf {
        config.cost.leaf = l;
    }
    if let Some(set) = &args.cost_set {
        config.apply_cost_set(set)?;
    }
    Ok(())
}

/// Defaults, then the config file, then flags.
pub fn resolve_run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &args.data {
        c.data = Some(d.clone());
    }
    if let Some(l) = &args.label_col {
        c.label_col = Some(l.clone());
    }
    if let Some(o) = &args.out {
        c.out = o.clone();
    }
    let e = &mut c.evo;
    if let Some(v) = args.seed {
        e.seed = v;
    }
    if let Some(v) = args.generations {
        e.generations = v;
    }
    if let Some(v) = args.population {
        e.population_size = v;
    }
    if let Some(v) = args.neighbourhood {
        e.neighbourhood = v;
    }
    if let Some(v) = args.threads {
        e.threads = v;
    }
    if let Some(v) = args.p_xover {
        e.p_crossover = v;
    }
    if let Some(v) = args.p_mut {
        e.p_standard_mutation = v;
    }
    if let Some(v) = args.p_tree_mut {
        e.p_tree_mutation = v;
    }
    if let Some(v) = args.k {
        c.eval.k = v;
    }
    if let Some(v) = args.folds {
        c.eval.folds = v;
    }
    if let Some(v) = args.max_neighbours {
        c.max_neighbours = Some(v);
    }
    apply_cost_args(&mut c, &args.cost)?;
    c.validate()?;
    Ok(c)
}

fn load_dataset(path: &Path, label_col: Option<&str>, max_neighbours: Option<usize>) -> Result<Dataset> {
    Dataset::load_csv(path, label_col, &DatasetOptions { max_neighbours })
}

pub fn cmd_run(args: &RunArgs) -> std::result::Result<String, Failure> {
    let config = resolve_run_config(args).map_err(input)?;
    let data = config
        .data
        .clone()
        .ok_or_else(|| input(Error::config("no dataset given (--data or data.path)")))?;
    let dataset = load_dataset(&data, config.label_col.as_deref(), config.max_neighbours).map_err(input)?;
    if let Some(labels) = dataset.labels() {
        if labels.len() < config.eval.folds {
            return Err(input(Error::config(format!(
                "eval.folds = {} exceeds the {} instances",
                config.eval.folds,
                labels.len()
            ))));
        }
    }

    let result = evolution::run(&dataset, &config.evo, &config.cost).map_err(runtime)?;
    std::fs::create_dir_all(&config.out).map_err(|e| runtime(Error::io(&config.out, e)))?;
    let (_, records) = harness::report(&result, &dataset, &config.cost, &config.eval, config.evo.seed, &config.out)
        .map_err(runtime)?;
    let resolved_path = config.out.join("config.resolved");
    std::fs::write(&resolved_path, config.resolved(Some(dataset.n_features())))
        .map_err(|e| runtime(Error::io(&resolved_path, e)))?;

    Ok(front_table(&records, &config.out))
}

fn front_table(records: &[EvalRecord], out: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>4}  {:>8}  {:>12}  {:>5}  {:>5}  {:>8}", "id", "cost", "complexity", "trees", "nodes", "knn_acc");
    for r in records {
        let acc = r.accuracy.map_or("-".to_owned(), |a| format!("{:.4}", a.mean));
        let _ = writeln!(
            s,
            "{:>4}  {:>8.5}  {:>12.6}  {:>5}  {:>5}  {:>8}",
            r.id,
            r.cost,
            r.complexity,
            r.n_trees,
            r.stats.nodes,
            acc
        );
    }
    let _ = writeln!(s, "{} front entries written to {}", records.len(), out.display());
    s
}

fn read_individual(path: &Path) -> Result<Individual> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Individual::parse(&text)
}

pub fn cmd_score(args: &ScoreArgs) -> std::result::Result<String, Failure> {
    let mut config = RunConfig::default();
    apply_cost_args(&mut config, &args.cost).map_err(input)?;
    config.cost.validate().map_err(input)?;
    let ind = read_individual(&args.trees).map_err(input)?;
    let report = complexity_report(&ind, &config.cost).map_err(input)?;

    let mut s = String::new();
    let mut baseline_total = 0.0;
    for (i, (tree, tc)) in ind.trees.iter().zip(&report.trees).enumerate() {
        let baseline = baseline_complexity(tree);
        baseline_total += baseline;
        let _ = writeln!(s, "tree {i}: {tree}");
        let _ = writeln!(s, "  F = {}", tc.value);
        let _ = writeln!(s, "  baseline = {baseline}");
        let _ = writeln!(
            s,
            "  unscaled = {}, S_T = {}, nodes = {}, asymmetry = {}",
            tc.unscaled, tc.scaling, tc.nodes, tc.asymmetry_total
        );
        if !tc.contributions.is_empty() {
            let _ = writeln!(s, "  {:>4}  {:<8} {:<5} {:>8} {:>8} {:>8} {:>12}", "node", "op", "class", "L", "R", "A", "contribution");
            for c in &tc.contributions {
                let _ = writeln!(
                    s,
                    "  {:>4}  {:<8} {:<5} {:>8} {:>8} {:>8} {:>12}",
                    c.index,
                    c.op.name(),
                    c.class.name(),
                    c.left,
                    c.right,
                    c.asymmetry,
                    c.value
                );
            }
        }
    }
    let _ = writeln!(s, "individual: F = {}, baseline = {}", report.total, baseline_total);
    Ok(s)
}

/// Embedding CSV with one `dim<k>` column per tree.
pub fn embedding_csv(ind: &Individual, dataset: &Dataset) -> String {
    let emb = ind.embed(dataset);
    let mut s = (0..emb.cols()).map(|k| format!("dim{k}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in emb.iter_rows() {
        s.push_str(&row.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

pub fn cmd_embed(args: &EmbedArgs) -> std::result::Result<String, Failure> {
    let dataset = load_dataset(&args.data, args.label_col.as_deref(), None).map_err(input)?;
    let ind = read_individual(&args.trees).map_err(input)?;
    ind.check_features(dataset.n_features()).map_err(input)?;
    let csv = embedding_csv(&ind, &dataset);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| runtime(Error::io(path, e)))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}
