//! Variation operators on multi-tree individuals.

use rand::Rng;

use crate::expr::{build_tree, ExprTree, Individual, InitMethod};

/// Depth cap for subtrees grown by standard mutation.
pub const MUTATION_SUBTREE_DEPTH: usize = 4;

/// Attempts before an invalid offspring falls back to a copy of its parent.
pub const MAX_ATTEMPTS: usize = 10;

/// Structural limits an individual must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub min_depth: usize,
    pub max_depth: usize,
    /// Upper limit on depth for freshly initialised (ramped) trees.
    pub init_depth: usize,
    pub max_trees: usize,
    pub n_features: usize,
}

impl Bounds {
    pub fn is_valid(&self, ind: &Individual) -> bool {
        (2..=self.max_trees).contains(&ind.trees.len())
            && ind.trees.iter().all(|t| {
                (self.min_depth..=self.max_depth).contains(&t.depth()) && t.max_feature() < self.n_features
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operation {
    Crossover,
    Mutation,
    TreeMutation,
}

/// Operator probabilities; they sum to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorRates {
    pub crossover: f64,
    pub mutation: f64,
    pub tree_mutation: f64,
}

impl OperatorRates {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Operation {
        let u: f64 = rng.gen();
        if u < self.crossover {
            Operation::Crossover
        } else if u < self.crossover + self.mutation {
            Operation::Mutation
        } else {
            Operation::TreeMutation
        }
    }
}

/// A ramped half-and-half tree: depth uniform in `[min_depth, init_depth]`,
/// full or grow with equal probability.
pub fn ramped_tree<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> ExprTree {
    let depth = rng.gen_range(bounds.min_depth..=bounds.init_depth);
    let method = if rng.gen_bool(0.5) { InitMethod::Full } else { InitMethod::Grow };
    build_tree(bounds.min_depth, depth, method, bounds.n_features, rng)
}

/// Offspring of `a` with a random subtree of `a` replaced by a random subtree
/// of `b`.
pub fn crossover<R: Rng + ?Sized>(a: &Individual, b: &Individual, rng: &mut R) -> Individual {
    let ta = rng.gen_range(0..a.trees.len());
    let tb = rng.gen_range(0..b.trees.len());
    let na = rng.gen_range(0..a.trees[ta].size());
    let donor_tree = &b.trees[tb];
    let donor = donor_tree
        .node(rng.gen_range(0..donor_tree.size()))
        .expect("index below size")
        .clone();
    let mut child = Individual::new(a.trees.clone());
    *child.trees[ta].node_mut(na).expect("index below size") = donor;
    child
}

/// Offspring of `a` with a random node replaced by a grown subtree.
pub fn mutate<R: Rng + ?Sized>(a: &Individual, bounds: &Bounds, rng: &mut R) -> Individual {
    let ti = rng.gen_range(0..a.trees.len());
    let tree = &a.trees[ti];
    let ni = rng.gen_range(0..tree.size());
    let at_depth = tree.node_depth(ni).expect("index below size");
    let room = bounds.max_depth.saturating_sub(at_depth).min(MUTATION_SUBTREE_DEPTH);
    let target = rng.gen_range(0..=room);
    let sub = build_tree(0, target, InitMethod::Grow, bounds.n_features, rng);
    let mut child = Individual::new(a.trees.clone());
    *child.trees[ti].node_mut(ni).expect("index below size") = sub;
    child
}

/// Offspring of `a` with one tree appended or removed. Removal at two trees
/// turns into an addition and addition at the limit into a removal.
pub fn add_remove_tree<R: Rng + ?Sized>(a: &Individual, bounds: &Bounds, rng: &mut R) -> Individual {
    let mut trees = a.trees.clone();
    let want_add = rng.gen_bool(0.5);
    let can_add = trees.len() < bounds.max_trees;
    let can_remove = trees.len() > 2;
    if (want_add && can_add) || !can_remove {
        if can_add {
            trees.push(ramped_tree(bounds, rng));
        }
    } else {
        let i = rng.gen_range(0..trees.len());
        trees.remove(i);
    }
    Individual::new(trees)
}

pub fn apply<R: Rng + ?Sized>(
    op: Operation,
    a: &Individual,
    b: &Individual,
    bounds: &Bounds,
    rng: &mut R,
) -> Individual {
    match op {
        Operation::Crossover => crossover(a, b, rng),
        Operation::Mutation => mutate(a, bounds, rng),
        Operation::TreeMutation => add_remove_tree(a, bounds, rng),
    }
}

/// One offspring. An operator is drawn per attempt; offspring outside the
/// bounds are discarded and after [`MAX_ATTEMPTS`] failures a copy of `a` is
/// returned.
pub fn vary<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    rates: &OperatorRates,
    bounds: &Bounds,
    rng: &mut R,
) -> Individual {
    for _ in 0..MAX_ATTEMPTS {
        let op = rates.draw(rng);
        let child = apply(op, a, b, bounds, rng);
        if bounds.is_valid(&child) {
            return child;
        }
    }
    Individual::new(a.trees.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    const BOUNDS: Bounds = Bounds {
        min_depth: 2,
        max_depth: 14,
        init_depth: 6,
        max_trees: 6,
        n_features: 13,
    };

    const RATES: OperatorRates = OperatorRates {
        crossover: 0.7,
        mutation: 0.15,
        tree_mutation: 0.15,
    };

    fn random_individual<R: Rng>(rng: &mut R) -> Individual {
        let n = rng.gen_range(2..=BOUNDS.max_trees);
        Individual::new((0..n).map(|_| ramped_tree(&BOUNDS, rng)).collect())
    }

    #[test]
    fn remove_at_two_trees_adds() {
        let mut rng = seeded(0);
        let parent = Individual::parse("(add f0 (mul f1 f2))\n(sub (abs f3) f4)\n").unwrap();
        for _ in 0..50 {
            let child = add_remove_tree(&parent, &BOUNDS, &mut rng);
            assert_eq!(child.trees.len(), 3);
            assert_eq!(child.trees[..2], parent.trees[..]);
        }
    }

    #[test]
    fn add_at_limit_removes() {
        let mut rng = seeded(1);
        let bounds = Bounds { max_trees: 3, ..BOUNDS };
        let parent = Individual::new((0..3).map(|_| ramped_tree(&bounds, &mut rng)).collect());
        for _ in 0..50 {
            assert_eq!(add_remove_tree(&parent, &bounds, &mut rng).trees.len(), 2);
        }
    }

    #[test]
    fn crossover_changes_at_most_one_subtree() {
        let mut rng = seeded(2);
        let a = Individual::parse("(add (mul f0 f1) (sub f2 f3))\n(max (abs f4) f5)\n").unwrap();
        let b = Individual::parse("(add (mul f0 f1) (sub f2 f9))\n(max (abs f4) f5)\n").unwrap();
        for _ in 0..200 {
            let child = crossover(&a, &b, &mut rng);
            let changed: Vec<usize> = (0..2).filter(|&i| child.trees[i] != a.trees[i]).collect();
            assert!(changed.len() <= 1);
        }
    }

    #[test]
    fn mutation_keeps_other_trees() {
        let mut rng = seeded(3);
        let a = random_individual(&mut rng);
        for _ in 0..100 {
            let child = mutate(&a, &BOUNDS, &mut rng);
            assert_eq!(child.trees.len(), a.trees.len());
            let changed = child.trees.iter().zip(&a.trees).filter(|(x, y)| x != y).count();
            assert!(changed <= 1);
        }
    }

    #[test]
    fn ten_thousand_offspring_respect_bounds() {
        let mut rng = seeded(4);
        let pool: Vec<Individual> = (0..40).map(|_| random_individual(&mut rng)).collect();
        let mut violations = 0;
        for i in 0..10_000 {
            let a = &pool[i % pool.len()];
            let b = &pool[(i * 7 + 3) % pool.len()];
            let child = vary(a, b, &RATES, &BOUNDS, &mut rng);
            // oracle: recompute every bound directly
            let ok = child.trees.len() >= 2
                && child.trees.len() <= BOUNDS.max_trees
                && child.trees.iter().all(|t| t.depth() >= 2 && t.depth() <= 14 && t.max_feature() < 13);
            violations += usize::from(!ok);
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn invalid_parents_fall_back_to_copy() {
        // depth-0 trees can never be repaired by one variation under min_depth 6
        let bounds = Bounds { min_depth: 6, init_depth: 6, ..BOUNDS };
        let a = Individual::parse("f0\nf1\n").unwrap();
        let child = vary(&a, &a, &RATES, &bounds, &mut seeded(5));
        assert_eq!(child.trees, a.trees);
    }

    #[test]
    fn rates_follow_probabilities() {
        let mut rng = seeded(6);
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            counts[RATES.draw(&mut rng) as usize] += 1;
        }
        assert!((counts[0] as f64 / 1e5 - 0.7).abs() < 0.01);
        assert!((counts[1] as f64 / 1e5 - 0.15).abs() < 0.01);
    }
}
