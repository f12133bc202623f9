//! Structural complexity of expression trees.
//!
//! Every internal node contributes a cost-class term over the measures of its
//! child subtrees plus an asymmetry penalty on the child node counts:
//!
//! | class | node term            |
//! |-------|----------------------|
//! | sum   | `L + R`              |
//! | prod  | `max(L * R, L, R)`   |
//! | exp   | `2^(L + R)`          |
//!
//! `L` and `R` are subtree measures where each leaf weighs `leaf` and each
//! internal node weighs 1 (plain node counts with the default `leaf = 1`).
//! Unary operators have `R = 0` and an empty right subtree. The penalty is
//! `2^|size_left - size_right| - 1`. A tree's value is the sum of node
//! contributions times a size scaling term, and an individual's complexity is
//! the sum over its trees.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{ExprTree, Individual, Operator};

/// Ceiling on every exponential and node term: 2^64.
pub const TERM_CAP: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostClass {
    Sum,
    Prod,
    Exp,
}

impl CostClass {
    pub fn name(self) -> &'static str {
        match self {
            CostClass::Sum => "sum",
            CostClass::Prod => "prod",
            CostClass::Exp => "exp",
        }
    }

    /// Node term over the left and right subtree measures.
    pub fn node_term(self, left: f64, right: f64) -> f64 {
        let v = match self {
            CostClass::Sum => left + right,
            CostClass::Prod => (left * right).max(left).max(right),
            CostClass::Exp => capped_pow2(left + right),
        };
        v.min(TERM_CAP)
    }
}

impl fmt::Display for CostClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(CostClass::Sum),
            "prod" => Ok(CostClass::Prod),
            "exp" => Ok(CostClass::Exp),
            other => Err(Error::config(format!("unknown cost class '{other}' (expected sum, prod or exp)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    costs: BTreeMap<Operator, CostClass>,
    /// Size fraction above which the scaling term kicks in.
    pub mu: f64,
    pub size_max: usize,
    /// Weight of a leaf in subtree measures.
    pub leaf: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        use CostClass::*;
        use Operator::*;
        let costs = [
            (Add, Sum),
            (Sub, Sum),
            (Mul, Prod),
            (PDiv, Prod),
            (Relu, Exp),
            (Sigmoid, Exp),
            (Max, Exp),
            (Min, Exp),
            (Abs, Exp),
        ]
        .into_iter()
        .collect();
        CostModel {
            costs,
            mu: 0.75,
            size_max: 100,
            leaf: 1.0,
        }
    }
}

impl CostModel {
    /// Model with no operator classes assigned.
    pub fn empty(mu: f64, size_max: usize, leaf: f64) -> Self {
        CostModel {
            costs: BTreeMap::new(),
            mu,
            size_max,
            leaf,
        }
    }

    pub fn class_of(&self, op: Operator) -> Option<CostClass> {
        self.costs.get(&op).copied()
    }

    pub fn set_class(&mut self, op: Operator, class: CostClass) {
        self.costs.insert(op, class);
    }

    pub fn classes(&self) -> impl Iterator<Item = (Operator, CostClass)> + '_ {
        self.costs.iter().map(|(o, c)| (*o, *c))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::config(format!("cost.mu must lie in (0, 1], got {}", self.mu)));
        }
        if self.size_max == 0 {
            return Err(Error::config("cost.size_max must be positive"));
        }
        if !(self.leaf > 0.0 && self.leaf.is_finite()) {
            return Err(Error::config(format!("cost.leaf must be positive, got {}", self.leaf)));
        }
        for op in Operator::ALL {
            if self.class_of(op).is_none() {
                return Err(Error::UnassignedOperator(op));
            }
        }
        Ok(())
    }
}

pub fn capped_pow2(x: f64) -> f64 {
    if x >= 64.0 {
        TERM_CAP
    } else {
        x.exp2()
    }
}

/// `2^|left - right| - 1` over child node counts.
pub fn asymmetry_penalty(size_left: usize, size_right: usize) -> f64 {
    let delta = size_left.abs_diff(size_right);
    if delta >= 64 {
        TERM_CAP - 1.0
    } else {
        ((1u128 << delta) - 1) as f64
    }
}

/// 1 while `t / size_max <= mu`, otherwise `2 t / size_max`.
pub fn scaling_term(t: usize, size_max: usize, mu: f64) -> f64 {
    let alpha = t as f64 / size_max as f64;
    if alpha <= mu {
        1.0
    } else {
        2.0 * alpha
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeContribution {
    /// Pre-order position in the tree.
    pub index: usize,
    pub op: Operator,
    pub class: CostClass,
    pub left: f64,
    pub right: f64,
    pub asymmetry: f64,
    /// Node term plus asymmetry.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeComplexity {
    /// Scaled tree complexity.
    pub value: f64,
    /// Sum of node contributions before scaling.
    pub unscaled: f64,
    pub scaling: f64,
    pub nodes: usize,
    pub asymmetry_total: f64,
    pub contributions: Vec<NodeContribution>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    pub trees: Vec<TreeComplexity>,
    pub total: f64,
}

struct Walk<'a> {
    model: &'a CostModel,
    next_index: usize,
    sum: f64,
    asymmetry: f64,
    record: Option<Vec<NodeContribution>>,
}

impl Walk<'_> {
    /// Returns (subtree measure, node count).
    fn visit(&mut self, tree: &ExprTree) -> Result<(f64, usize)> {
        let index = self.next_index;
        self.next_index += 1;
        match tree {
            ExprTree::Feature(_) => Ok((self.model.leaf, 1)),
            ExprTree::Call(op, children) => {
                let class = self.model.class_of(*op).ok_or(Error::UnassignedOperator(*op))?;
                let (left, nl) = self.visit(&children[0])?;
                let (right, nr) = match children.get(1) {
                    Some(c) => self.visit(c)?,
                    None => (0.0, 0),
                };
                let asymmetry = asymmetry_penalty(nl, nr);
                let value = class.node_term(left, right) + asymmetry;
                self.sum += value;
                self.asymmetry += asymmetry;
                if let Some(rec) = self.record.as_mut() {
                    rec.push(NodeContribution {
                        index,
                        op: *op,
                        class,
                        left,
                        right,
                        asymmetry,
                        value,
                    });
                }
                Ok((1.0 + left + right, 1 + nl + nr))
            }
        }
    }
}

fn walk(tree: &ExprTree, model: &CostModel, record: bool) -> Result<TreeComplexity> {
    let mut w = Walk {
        model,
        next_index: 0,
        sum: 0.0,
        asymmetry: 0.0,
        record: record.then(Vec::new),
    };
    let (_, nodes) = w.visit(tree)?;
    let scaling = scaling_term(nodes, model.size_max, model.mu);
    let mut contributions = w.record.unwrap_or_default();
    contributions.sort_by_key(|c| c.index);
    Ok(TreeComplexity {
        value: scaling * w.sum,
        unscaled: w.sum,
        scaling,
        nodes,
        asymmetry_total: w.asymmetry,
        contributions,
    })
}

/// Complexity breakdown of one tree, including per-node contributions.
pub fn tree_complexity(tree: &ExprTree, model: &CostModel) -> Result<TreeComplexity> {
    walk(tree, model, true)
}

/// Scaled complexity of one tree.
pub fn tree_value(tree: &ExprTree, model: &CostModel) -> Result<f64> {
    walk(tree, model, false).map(|t| t.value)
}

pub fn individual_complexity(ind: &Individual, model: &CostModel) -> Result<f64> {
    ind.trees.iter().map(|t| tree_value(t, model)).sum()
}

pub fn complexity_report(ind: &Individual, model: &CostModel) -> Result<ComplexityReport> {
    let trees = ind
        .trees
        .iter()
        .map(|t| tree_complexity(t, model))
        .collect::<Result<Vec<_>>>()?;
    let total = trees.iter().map(|t| t.value).sum();
    Ok(ComplexityReport { trees, total })
}

/// Recursive complexity from the classic expression-complexity table: a
/// variable is 2, `+`/`-` sum their children, `*`/`/` multiply their children
/// and add 1, and every other operator is `2^c` of its first child.
pub fn baseline_complexity(tree: &ExprTree) -> f64 {
    match tree {
        ExprTree::Feature(_) => 2.0,
        ExprTree::Call(op, children) => {
            let c: Vec<f64> = children.iter().map(baseline_complexity).collect();
            let v = match op {
                Operator::Add | Operator::Sub => c.iter().sum(),
                Operator::Mul | Operator::PDiv => c.iter().product::<f64>() + 1.0,
                _ => capped_pow2(c[0]),
            };
            v.min(TERM_CAP)
        }
    }
}

pub fn baseline_individual(ind: &Individual) -> f64 {
    ind.trees.iter().map(baseline_complexity).sum()
}
