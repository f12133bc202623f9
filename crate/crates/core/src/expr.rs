//! Symbolic expression trees over dataset features.
//!
//! Depth counts edges: a lone feature has depth 0, `(add f0 f1)` has depth 1.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Below this magnitude the protected division returns 1.
pub const PDIV_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    PDiv,
    Max,
    Min,
    Abs,
    Relu,
    Sigmoid,
}

impl Operator {
    pub const ALL: [Operator; 9] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::PDiv,
        Operator::Max,
        Operator::Min,
        Operator::Abs,
        Operator::Relu,
        Operator::Sigmoid,
    ];

    pub fn arity(self) -> usize {
        match self {
            Operator::Abs | Operator::Relu | Operator::Sigmoid => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Add => "add",
            Operator::Sub => "sub",
            Operator::Mul => "mul",
            Operator::PDiv => "pdiv",
            Operator::Max => "max",
            Operator::Min => "min",
            Operator::Abs => "abs",
            Operator::Relu => "relu",
            Operator::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Operator::ALL.into_iter().find(|op| op.name() == name)
    }

    /// Applies the operator; `b` is ignored for unary operators. Results are
    /// saturated to the finite range.
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Operator::Add => a + b,
            Operator::Sub => a - b,
            Operator::Mul => a * b,
            Operator::PDiv => {
                if b.abs() >= PDIV_EPSILON {
                    a / b
                } else {
                    1.0
                }
            }
            Operator::Max => a.max(b),
            Operator::Min => a.min(b),
            Operator::Abs => a.abs(),
            Operator::Relu => a.max(0.0),
            Operator::Sigmoid => 1.0 / (1.0 + (-a).exp()),
        };
        saturate(v)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[inline]
fn saturate(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else if v.is_nan() {
        // only reachable from non-finite inputs, which datasets reject
        0.0
    } else {
        f64::MAX.copysign(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprTree {
    Feature(usize),
    Call(Operator, Vec<ExprTree>),
}

impl ExprTree {
    pub fn feature(index: usize) -> Self {
        ExprTree::Feature(index)
    }

    pub fn unary(op: Operator, child: ExprTree) -> Self {
        assert_eq!(op.arity(), 1, "{op} is not unary");
        ExprTree::Call(op, vec![child])
    }

    pub fn binary(op: Operator, left: ExprTree, right: ExprTree) -> Self {
        assert_eq!(op.arity(), 2, "{op} is not binary");
        ExprTree::Call(op, vec![left, right])
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ExprTree::Feature(_))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            ExprTree::Feature(_) => 1,
            ExprTree::Call(_, children) => 1 + children.iter().map(ExprTree::size).sum::<usize>(),
        }
    }

    /// Edge count from the root to the deepest leaf.
    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Feature(_) => 0,
            ExprTree::Call(_, children) => 1 + children.iter().map(ExprTree::depth).max().unwrap_or(0),
        }
    }

    pub fn max_feature(&self) -> usize {
        match self {
            ExprTree::Feature(k) => *k,
            ExprTree::Call(_, children) => children.iter().map(ExprTree::max_feature).max().unwrap_or(0),
        }
    }

    /// Pre-order node visit.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ExprTree)) {
        f(self);
        if let ExprTree::Call(_, children) = self {
            for c in children {
                c.visit(f);
            }
        }
    }

    /// Node at pre-order position `index`.
    pub fn node(&self, index: usize) -> Option<&ExprTree> {
        let mut remaining = index;
        self.find(&mut remaining)
    }

    fn find(&self, remaining: &mut usize) -> Option<&ExprTree> {
        if *remaining == 0 {
            return Some(self);
        }
        *remaining -= 1;
        if let ExprTree::Call(_, children) = self {
            for c in children {
                if let Some(hit) = c.find(remaining) {
                    return Some(hit);
                }
            }
        }
        None
    }

    pub fn node_mut(&mut self, index: usize) -> Option<&mut ExprTree> {
        let mut remaining = index;
        self.find_mut(&mut remaining)
    }

    fn find_mut(&mut self, remaining: &mut usize) -> Option<&mut ExprTree> {
        if *remaining == 0 {
            return Some(self);
        }
        *remaining -= 1;
        if let ExprTree::Call(_, children) = self {
            for c in children {
                let size = c.size();
                if *remaining < size {
                    return c.find_mut(remaining);
                }
                *remaining -= size;
            }
        }
        None
    }

    /// Depth (edges from the root) of the node at pre-order `index`.
    pub fn node_depth(&self, index: usize) -> Option<usize> {
        fn walk(t: &ExprTree, remaining: &mut usize, depth: usize) -> Option<usize> {
            if *remaining == 0 {
                return Some(depth);
            }
            *remaining -= 1;
            if let ExprTree::Call(_, children) = t {
                for c in children {
                    if let Some(d) = walk(c, remaining, depth + 1) {
                        return Some(d);
                    }
                }
            }
            None
        }
        let mut remaining = index;
        walk(self, &mut remaining, 0)
    }

    /// Evaluates the tree on one feature vector.
    pub fn eval(&self, instance: &[f64]) -> f64 {
        match self {
            ExprTree::Feature(k) => instance[*k],
            ExprTree::Call(op, children) => {
                let a = children[0].eval(instance);
                let b = if children.len() > 1 { children[1].eval(instance) } else { 0.0 };
                op.apply(a, b)
            }
        }
    }

    /// Evaluates the tree on every row of `data`, one column at a time.
    pub fn eval_rows(&self, data: &Matrix) -> Vec<f64> {
        match self {
            ExprTree::Feature(k) => data.column(*k).collect(),
            ExprTree::Call(op, children) => {
                let mut a = children[0].eval_rows(data);
                if children.len() > 1 {
                    let b = children[1].eval_rows(data);
                    for (x, y) in a.iter_mut().zip(b) {
                        *x = op.apply(*x, y);
                    }
                } else {
                    for x in &mut a {
                        *x = op.apply(*x, 0.0);
                    }
                }
                a
            }
        }
    }

    /// Canonical s-expression.
    pub fn to_sexpr(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = Parser::new(text);
        let tree = parser.tree()?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.error(parser.pos, "unexpected trailing input"));
        }
        Ok(tree)
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Feature(k) => write!(f, "f{k}"),
            ExprTree::Call(op, children) => {
                write!(f, "({op}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl std::str::FromStr for ExprTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExprTree::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, position: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || c == b'(' || c == b')' {
                break;
            }
            self.pos += 1;
        }
        // atoms stop at ASCII delimiters, so the slice is valid UTF-8
        (start, std::str::from_utf8(&self.src[start..self.pos]).unwrap_or(""))
    }

    fn tree(&mut self) -> Result<ExprTree> {
        self.skip_ws();
        match self.src.get(self.pos) {
            None => Err(self.error(self.pos, "unexpected end of input")),
            Some(b')') => Err(self.error(self.pos, "unexpected ')'")),
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let (start, name) = self.atom();
                if name.is_empty() {
                    return Err(self.error(start, "expected operator name"));
                }
                let op = Operator::from_name(name)
                    .ok_or_else(|| self.error(start, format!("unknown operator '{name}'")))?;
                let mut children = Vec::with_capacity(2);
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.error(self.pos, "missing ')'")),
                        Some(_) => children.push(self.tree()?),
                    }
                }
                if children.len() != op.arity() {
                    return Err(self.error(
                        start,
                        format!("'{op}' takes {} argument(s), got {}", op.arity(), children.len()),
                    ));
                }
                Ok(ExprTree::Call(op, children))
            }
            Some(_) => {
                let (start, token) = self.atom();
                token
                    .strip_prefix('f')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse().ok())
                    .map(ExprTree::Feature)
                    .ok_or_else(|| self.error(start, format!("expected feature like 'f0', got '{token}'")))
            }
        }
    }
}

/// Objective values, both minimised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objectives {
    pub cost: f64,
    pub complexity: f64,
}

impl Objectives {
    /// Pareto dominance under minimisation.
    pub fn dominates(&self, other: &Objectives) -> bool {
        self.cost <= other.cost
            && self.complexity <= other.complexity
            && (self.cost < other.cost || self.complexity < other.complexity)
    }
}

/// Multi-tree individual: one embedding dimension per tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub trees: Vec<ExprTree>,
    pub objectives: Option<Objectives>,
}

impl Individual {
    pub fn new(trees: Vec<ExprTree>) -> Self {
        Individual {
            trees,
            objectives: None,
        }
    }

    /// One s-expression per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut trees = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.trim();
            if !body.is_empty() && !body.starts_with('#') {
                let tree = ExprTree::parse(line).map_err(|e| match e {
                    Error::Parse { position, message } => Error::Parse {
                        position: offset + position,
                        message,
                    },
                    other => other,
                })?;
                trees.push(tree);
            }
            offset += line.len();
        }
        if trees.is_empty() {
            return Err(Error::Parse {
                position: 0,
                message: "no trees found".into(),
            });
        }
        Ok(Individual::new(trees))
    }

    pub fn to_sexprs(&self) -> String {
        let mut out = String::new();
        for t in &self.trees {
            out.push_str(&t.to_sexpr());
            out.push('\n');
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(ExprTree::size).sum()
    }

    /// Checks every feature index against the dataset width.
    pub fn check_features(&self, n_features: usize) -> Result<()> {
        for (i, t) in self.trees.iter().enumerate() {
            let k = t.max_feature();
            if k >= n_features {
                return Err(Error::FeatureOutOfRange {
                    tree: i,
                    feature: k,
                    features: n_features,
                });
            }
        }
        Ok(())
    }

    /// Embedding matrix: row per instance, column per tree.
    pub fn embed(&self, dataset: &Dataset) -> Matrix {
        self.embed_rows(dataset.instances())
    }

    pub fn embed_rows(&self, data: &Matrix) -> Matrix {
        let n = data.rows();
        let d = self.trees.len();
        let mut out = Matrix::zeros(n, d);
        for (k, tree) in self.trees.iter().enumerate() {
            for (i, v) in tree.eval_rows(data).into_iter().enumerate() {
                out.set(i, k, v);
            }
        }
        out
    }

    /// Graphviz text, one digraph per tree. Leaves are labelled with feature
    /// names when given.
    pub fn to_dot(&self, feature_names: Option<&[String]>) -> String {
        let mut out = String::new();
        for (t, tree) in self.trees.iter().enumerate() {
            out.push_str(&format!("digraph tree{t} {{\n"));
            let mut next = 0;
            dot_node(tree, feature_names, &mut next, &mut out);
            out.push_str("}\n");
        }
        out
    }
}

fn dot_node(tree: &ExprTree, names: Option<&[String]>, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let label = match tree {
        ExprTree::Feature(k) => names
            .and_then(|n| n.get(*k))
            .cloned()
            .unwrap_or_else(|| format!("f{k}")),
        ExprTree::Call(op, _) => op.name().to_owned(),
    };
    let label = label.replace('\\', "\\\\").replace('"', "\\\"");
    let shape = if tree.is_leaf() { "box" } else { "ellipse" };
    out.push_str(&format!("  n{id} [label=\"{label}\", shape={shape}];\n"));
    if let ExprTree::Call(_, children) = tree {
        for c in children {
            let child = dot_node(c, names, next, out);
            out.push_str(&format!("  n{id} -> n{child};\n"));
        }
    }
    id
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMethod {
    Grow,
    Full,
}

/// Random tree whose depth lies in `[depth_min, depth_max]`. A target depth is
/// drawn uniformly from that range; `Full` reaches it on every branch, `Grow`
/// stops branches early with probability proportional to the terminal share
/// of the primitive set but never before `depth_min`.
pub fn random_tree<R: Rng + ?Sized>(
    depth_min: usize,
    depth_max: usize,
    method: InitMethod,
    n_features: usize,
    rng: &mut R,
) -> ExprTree {
    assert!(depth_min >= 1 && depth_min <= depth_max, "need 1 <= depth_min <= depth_max");
    let target = rng.gen_range(depth_min..=depth_max);
    build_tree(depth_min, target, method, n_features, rng)
}

/// Tree with depth exactly `target` (`Full`) or in `[min_depth, target]` (`Grow`).
pub fn build_tree<R: Rng + ?Sized>(
    min_depth: usize,
    target: usize,
    method: InitMethod,
    n_features: usize,
    rng: &mut R,
) -> ExprTree {
    fn go<R: Rng + ?Sized>(
        depth: usize,
        min_depth: usize,
        target: usize,
        method: InitMethod,
        n_features: usize,
        rng: &mut R,
    ) -> ExprTree {
        let n_ops = Operator::ALL.len();
        let terminal = if depth >= target {
            true
        } else if depth < min_depth || method == InitMethod::Full {
            false
        } else {
            rng.gen_range(0..n_features + n_ops) < n_features
        };
        if terminal {
            return ExprTree::Feature(rng.gen_range(0..n_features));
        }
        let op = *Operator::ALL.choose(rng).expect("non-empty");
        let children = (0..op.arity())
            .map(|_| go(depth + 1, min_depth, target, method, n_features, rng))
            .collect();
        ExprTree::Call(op, children)
    }
    // every branch is forced to min_depth, so all leaves sit at or below it
    go(0, min_depth.min(target), target, method, n_features, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn t(s: &str) -> ExprTree {
        ExprTree::parse(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(t("(add f0 f1)").eval(&[2.0, 3.0]), 5.0);
        assert_eq!(t("(pdiv f0 f1)").eval(&[4.0, 0.0]), 1.0);
        assert_eq!(t("(pdiv f0 f1)").eval(&[4.0, 2.0]), 2.0);
        assert_eq!(t("(pdiv f0 f1)").eval(&[4.0, 5e-7]), 1.0);
        assert_eq!(t("(sigmoid f0)").eval(&[0.0]), 0.5);
        assert_eq!(t("(relu f0)").eval(&[-3.0]), 0.0);
        assert_eq!(t("(abs f0)").eval(&[-3.0]), 3.0);
        assert_eq!(t("(max f0 f1)").eval(&[1.0, 2.0]), 2.0);
        assert_eq!(t("(min f0 f1)").eval(&[1.0, 2.0]), 1.0);
        assert_eq!(t("(sub f0 f1)").eval(&[1.0, 2.0]), -1.0);
    }

    #[test]
    fn overflow_saturates() {
        let big = [f64::MAX, f64::MAX];
        assert_eq!(t("(add f0 f1)").eval(&big), f64::MAX);
        assert_eq!(t("(mul f0 f1)").eval(&big), f64::MAX);
        assert_eq!(t("(sub (sub f0 f0) (add f0 f1))").eval(&big), -f64::MAX);
        assert_eq!(t("(sigmoid f0)").eval(&[-1e308]), 0.0);
    }

    #[test]
    fn serialization_round_trip_and_canonical_form() {
        for s in ["(mul f3 (relu f7))", "(sub (add f0 f1) f2)", "f12", "(sigmoid (max f0 (pdiv f1 f2)))"] {
            assert_eq!(t(s).to_sexpr(), s);
        }
        assert_eq!(t("  ( add   f0\n f1 ) ").to_sexpr(), "(add f0 f1)");
    }

    #[test]
    fn parse_errors_name_the_token() {
        match ExprTree::parse("(foo f0)") {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 1);
                assert!(message.contains("foo"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(ExprTree::parse("(add f0)"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(ExprTree::parse("(add f0 f1"), Err(Error::Parse { .. })));
        assert!(matches!(ExprTree::parse("(add f0 x1)"), Err(Error::Parse { position: 8, .. })));
        assert!(matches!(ExprTree::parse("f0 f1"), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(ExprTree::parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn individual_parse_offsets_positions() {
        let ind = Individual::parse("(add f0 f1)\n# comment\n\n(abs f2)\n").unwrap();
        assert_eq!(ind.trees.len(), 2);
        match Individual::parse("(add f0 f1)\n(bad f0)\n") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 13),
            other => panic!("{other:?}"),
        }
        assert!(Individual::parse("\n  \n").is_err());
    }

    #[test]
    fn size_depth_and_node_access() {
        let tree = t("(mul (add f0 f1) (relu f2))");
        assert_eq!(tree.size(), 6);
        assert_eq!(tree.depth(), 2);
        assert_eq!(t("f0").depth(), 0);
        assert_eq!(tree.node(1), Some(&t("(add f0 f1)")));
        assert_eq!(tree.node(4), Some(&t("(relu f2)")));
        assert_eq!(tree.node(5), Some(&t("f2")));
        assert_eq!(tree.node(6), None);
        assert_eq!(tree.node_depth(5), Some(2));
        let mut copy = tree.clone();
        *copy.node_mut(4).unwrap() = t("f9");
        assert_eq!(copy.to_sexpr(), "(mul (add f0 f1) f9)");
    }

    #[test]
    fn embed_matches_per_cell_evaluation() {
        let ind = Individual::parse("(add f0 f0)\n(add f1 f1)\n").unwrap();
        let data = Matrix::from_rows(&[[1.0, 2.0]]);
        assert_eq!(ind.embed_rows(&data), Matrix::from_rows(&[[2.0, 4.0]]));

        let mut rng = seeded(3);
        let rows: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let data = Matrix::from_rows(&rows);
        let ind = Individual::new((0..3).map(|_| random_tree(1, 5, InitMethod::Grow, 3, &mut rng)).collect());
        let emb = ind.embed_rows(&data);
        for (i, row) in rows.iter().enumerate() {
            for (k, tree) in ind.trees.iter().enumerate() {
                assert_eq!(emb.get(i, k), oracle_eval(tree, row));
            }
        }
    }

    // independent interpreter over the printed form
    fn oracle_eval(tree: &ExprTree, x: &[f64]) -> f64 {
        fn ev(tokens: &[String], pos: &mut usize, x: &[f64]) -> f64 {
            let tok = tokens[*pos].clone();
            *pos += 1;
            if tok == "(" {
                let name = tokens[*pos].clone();
                *pos += 1;
                let a = ev(tokens, pos, x);
                let v = match name.as_str() {
                    "abs" => a.abs(),
                    "relu" => if a > 0.0 { a } else { 0.0 },
                    "sigmoid" => 1.0 / (1.0 + (-a).exp()),
                    _ => {
                        let b = ev(tokens, pos, x);
                        match name.as_str() {
                            "add" => a + b,
                            "sub" => a - b,
                            "mul" => a * b,
                            "pdiv" => if b.abs() < 1e-6 { 1.0 } else { a / b },
                            "max" => if a >= b { a } else { b },
                            "min" => if a <= b { a } else { b },
                            _ => unreachable!(),
                        }
                    }
                };
                assert_eq!(tokens[*pos], ")");
                *pos += 1;
                v
            } else {
                x[tok[1..].parse::<usize>().unwrap()]
            }
        }
        let text = tree.to_sexpr().replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
        ev(&tokens, &mut 0, x)
    }

    #[test]
    fn constant_data_gives_constant_columns() {
        let ind = Individual::parse("(sigmoid (mul f0 f1))\n(sub f1 (abs f0))\n").unwrap();
        let data = Matrix::from_rows(&[[0.3, 0.7], [0.3, 0.7], [0.3, 0.7]]);
        let emb = ind.embed_rows(&data);
        for k in 0..2 {
            let col: Vec<f64> = emb.column(k).collect();
            assert!(col.iter().all(|&v| v == col[0]));
        }
    }

    #[test]
    fn full_depth_one_is_operator_over_terminals() {
        let mut rng = seeded(1);
        for _ in 0..50 {
            let tree = random_tree(1, 1, InitMethod::Full, 4, &mut rng);
            assert_eq!(tree.depth(), 1);
            assert!(!tree.is_leaf());
        }
    }

    #[test]
    fn full_trees_have_all_leaves_at_target() {
        fn leaf_depths(t: &ExprTree, d: usize, out: &mut Vec<usize>) {
            match t {
                ExprTree::Feature(_) => out.push(d),
                ExprTree::Call(_, cs) => cs.iter().for_each(|c| leaf_depths(c, d + 1, out)),
            }
        }
        let mut rng = seeded(5);
        for target in 1..6 {
            let tree = build_tree(1, target, InitMethod::Full, 5, &mut rng);
            let mut depths = Vec::new();
            leaf_depths(&tree, 0, &mut depths);
            assert!(depths.iter().all(|&d| d == target));
        }
    }

    #[test]
    fn generation_respects_bounds() {
        let mut rng = seeded(11);
        for i in 0..10_000 {
            let method = if i % 2 == 0 { InitMethod::Grow } else { InitMethod::Full };
            let lo = 1 + i % 3;
            let hi = lo + i % 5;
            let tree = random_tree(lo, hi, method, 7, &mut rng);
            assert!((lo..=hi).contains(&tree.depth()), "depth {} not in [{lo}, {hi}]", tree.depth());
            assert!(tree.max_feature() < 7);
        }
        for _ in 0..1000 {
            assert!(random_tree(1, 6, InitMethod::Grow, 3, &mut rng).depth() <= 6);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_tree(2, 6, InitMethod::Grow, 9, &mut seeded(99));
        let b = random_tree(2, 6, InitMethod::Grow, 9, &mut seeded(99));
        assert_eq!(a, b);
    }

    #[test]
    fn dot_output_lists_every_node() {
        let ind = Individual::parse("(mul f0 (relu f1))\n(add f1 f0)\n").unwrap();
        let names = vec!["alcohol".to_owned(), "ash".to_owned()];
        let dot = ind.to_dot(Some(&names));
        assert_eq!(dot.matches("digraph").count(), 2);
        assert!(dot.contains("label=\"relu\""));
        assert!(dot.contains("label=\"alcohol\""));
        assert_eq!(dot.matches("->").count(), 3 + 2);
        assert!(ind.to_dot(None).contains("label=\"f1\""));
    }

    #[test]
    fn dominance() {
        let a = Objectives { cost: 0.1, complexity: 5.0 };
        let b = Objectives { cost: 0.2, complexity: 5.0 };
        assert!(a.dominates(&b));
        assert!(!b.dominates(&a));
        assert!(!a.dominates(&a));
    }

    fn tree_strategy() -> impl Strategy<Value = ExprTree> {
        let leaf = (0usize..20).prop_map(ExprTree::Feature);
        leaf.prop_recursive(6, 64, 2, |inner| {
            (0usize..9, inner.clone(), inner).prop_map(|(i, a, b)| {
                let op = Operator::ALL[i];
                if op.arity() == 1 {
                    ExprTree::unary(op, a)
                } else {
                    ExprTree::binary(op, a, b)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(tree in tree_strategy()) {
            let text = tree.to_sexpr();
            let back = ExprTree::parse(&text).unwrap();
            prop_assert_eq!(&back, &tree);
            prop_assert_eq!(back.to_sexpr(), text);
        }

        #[test]
        fn eval_is_pure(tree in tree_strategy(), xs in prop::collection::vec(-10.0f64..10.0, 20)) {
            let a = tree.eval(&xs);
            let b = tree.eval(&xs);
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert!(a.is_finite());
        }
    }
}
