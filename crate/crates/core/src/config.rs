//! Run configuration.
//!
//! Config files are TOML with dotted keys, for example:
//!
//! ```toml
//! evo.generations = 200
//! evo.seed = 42
//! cost.mu = 0.75
//! cost.relu = "exp"
//! eval.k = 5
//! ```
//!
//! Values are layered: defaults, then the config file, then command-line
//! flags. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use crate::complexity::{CostClass, CostModel};
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::expr::Operator;
use crate::harness::EvalConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub label_col: Option<String>,
    pub out: PathBuf,
    pub evo: EvolutionConfig,
    pub cost: CostModel,
    pub eval: EvalConfig,
    pub max_neighbours: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            label_col: None,
            out: PathBuf::from("out"),
            evo: EvolutionConfig::default(),
            cost: CostModel::default(),
            eval: EvalConfig::default(),
            max_neighbours: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse '{value}'")))
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = RunConfig::default();
        config.apply_toml(&text)?;
        Ok(config)
    }

    /// Applies every key of a TOML document.
    pub fn apply_toml(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text.parse().map_err(|e| Error::config(format!("{e}")))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat)?;
        for (key, value) in flat {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Sets one dotted key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data.path" => self.data = Some(PathBuf::from(value)),
            "data.label_col" => self.label_col = Some(value.to_owned()),
            "run.out" => self.out = PathBuf::from(value),
            "run.threads" => self.evo.threads = parse(key, value)?,
            "evo.generations" => self.evo.generations = parse(key, value)?,
            "evo.population" => self.evo.population_size = parse(key, value)?,
            "evo.seed" => self.evo.seed = parse(key, value)?,
            "evo.p_xover" => self.evo.p_crossover = parse(key, value)?,
            "evo.p_mut" => self.evo.p_standard_mutation = parse(key, value)?,
            "evo.p_tree_mut" => self.evo.p_tree_mutation = parse(key, value)?,
            "evo.min_depth" => self.evo.min_depth = parse(key, value)?,
            "evo.max_depth" => self.evo.max_depth = parse(key, value)?,
            "evo.init_depth" => self.evo.init_depth = parse(key, value)?,
            "evo.max_trees" => self.evo.max_trees = Some(parse(key, value)?),
            "evo.neighbourhood" => self.evo.neighbourhood = parse(key, value)?,
            "evo.max_replacements" => self.evo.max_replacements = parse(key, value)?,
            "cost.mu" => self.cost.mu = parse(key, value)?,
            "cost.size_max" => self.cost.size_max = parse(key, value)?,
            "cost.leaf" => self.cost.leaf = parse(key, value)?,
            "cost.max_neighbours" => self.max_neighbours = Some(parse(key, value)?),
            "eval.k" => self.eval.k = parse(key, value)?,
            "eval.folds" => self.eval.folds = parse(key, value)?,
            _ => {
                let op = key
                    .strip_prefix("cost.")
                    .and_then(Operator::from_name)
                    .ok_or_else(|| Error::config(format!("unknown config key '{key}'")))?;
                self.cost.set_class(op, value.trim().parse::<CostClass>()?);
            }
        }
        Ok(())
    }

    /// Applies a `op=class,op=class` list.
    pub fn apply_cost_set(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (op, class) = item
                .split_once('=')
                .ok_or_else(|| Error::config(format!("--cost-set entry '{item}' is not op=class")))?;
            let op = op.trim();
            if Operator::from_name(op).is_none() {
                return Err(Error::config(format!("--cost-set: unknown operator '{op}'")));
            }
            self.set(&format!("cost.{op}"), class)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.evo.validate()?;
        self.cost.validate()?;
        if self.eval.k == 0 {
            return Err(Error::config("eval.k must be at least 1"));
        }
        if self.eval.folds < 2 {
            return Err(Error::config("eval.folds must be at least 2"));
        }
        if self.max_neighbours == Some(0) {
            return Err(Error::config("cost.max_neighbours must be at least 1"));
        }
        Ok(())
    }

    /// Every effective setting as a TOML document that [`RunConfig::from_file`]
    /// reads back to the same configuration. `n_features` resolves the default
    /// tree limit.
    pub fn resolved(&self, n_features: Option<usize>) -> String {
        let mut lines = Vec::new();
        if let Some(d) = &self.data {
            lines.push(format!("data.path = {}", quote(&d.to_string_lossy())));
        }
        if let Some(l) = &self.label_col {
            lines.push(format!("data.label_col = {}", quote(l)));
        }
        lines.push(format!("run.out = {}", quote(&self.out.to_string_lossy())));
        lines.push(format!("run.threads = {}", self.evo.threads));
        let e = &self.evo;
        lines.push(format!("evo.generations = {}", e.generations));
        lines.push(format!("evo.population = {}", e.population_size));
        lines.push(format!("evo.seed = {}", e.seed as i64));
        lines.push(format!("evo.p_xover = {:?}", e.p_crossover));
        lines.push(format!("evo.p_mut = {:?}", e.p_standard_mutation));
        lines.push(format!("evo.p_tree_mut = {:?}", e.p_tree_mutation));
        lines.push(format!("evo.min_depth = {}", e.min_depth));
        lines.push(format!("evo.max_depth = {}", e.max_depth));
        lines.push(format!("evo.init_depth = {}", e.init_depth));
        match (e.max_trees, n_features) {
            (Some(t), _) => lines.push(format!("evo.max_trees = {t}")),
            (None, Some(m)) => lines.push(format!("evo.max_trees = {}", e.max_trees_for(m))),
            (None, None) => {}
        }
        lines.push(format!("evo.neighbourhood = {}", e.neighbourhood));
        lines.push(format!("evo.max_replacements = {}", e.max_replacements));
        lines.push(format!("cost.mu = {:?}", self.cost.mu));
        lines.push(format!("cost.size_max = {}", self.cost.size_max));
        lines.push(format!("cost.leaf = {:?}", self.cost.leaf));
        if let Some(k) = self.max_neighbours {
            lines.push(format!("cost.max_neighbours = {k}"));
        }
        for (op, class) in self.cost.classes() {
            lines.push(format!("cost.{op} = {}", quote(class.name())));
        }
        lines.push(format!("eval.k = {}", self.eval.k));
        lines.push(format!("eval.folds = {}", self.eval.folds));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        let text = match v {
            toml::Value::Table(t) => {
                flatten(&key, t, out)?;
                continue;
            }
            toml::Value::String(s) => s.clone(),
            // seeds above i64::MAX are written as negative integers
            toml::Value::Integer(i) if key == "evo.seed" => (*i as u64).to_string(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            other => return Err(Error::config(format!("{key}: unsupported value {other}"))),
        };
        out.push((key, text));
    }
    Ok(())
}
