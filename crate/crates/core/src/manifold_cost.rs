//! Neighbourhood-preservation cost of an embedding.
//!
//! For every point, its input-space neighbours (nearest first) are ranked again
//! by their distance to the point in the embedding. The per-point term is
//! `(1 - rho) / 2` with `rho` the Spearman correlation between the two
//! orderings, and the cost is the mean over points: 0 for a perfectly
//! preserved neighbourhood structure, 1 for a fully reversed one.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::expr::Individual;
use crate::matrix::{squared_distance, Matrix};

/// Fractional (1-based) ranks; tied values share the mean of their ranks.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of two rank vectors. Zero when either has no variance.
pub fn spearman(ranks_a: &[f64], ranks_b: &[f64]) -> Result<f64> {
    if ranks_a.len() != ranks_b.len() {
        return Err(Error::LengthMismatch(ranks_a.len(), ranks_b.len()));
    }
    Ok(pearson(ranks_a, ranks_b))
}

/// Spearman correlation of raw values: ranks both, then [`spearman`].
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    spearman(&fractional_ranks(a), &fractional_ranks(b))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_b = b.iter().sum::<f64>() / n as f64;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return 0.0;
    }
    (cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0)
}

/// Per-point term `(1 - rho) / 2` for one point of an embedding.
fn point_term(embedding: &Matrix, point: usize, neighbours: &[usize], identity: &[f64], dist: &mut Vec<f64>) -> f64 {
    let e = embedding.row(point);
    dist.clear();
    dist.extend(neighbours.iter().map(|&j| squared_distance(e, embedding.row(j))));
    let ranks = fractional_ranks(dist);
    (1.0 - pearson(identity, &ranks)) / 2.0
}

/// Cost of a precomputed embedding (row per instance) against the dataset's
/// input-space neighbour orderings.
pub fn cost_of_embedding(embedding: &Matrix, dataset: &Dataset) -> Result<f64> {
    let n = dataset.n_instances();
    if embedding.rows() != n {
        return Err(Error::LengthMismatch(embedding.rows(), n));
    }
    let orders = dataset.neighbour_order();
    let mut identity: Vec<f64> = Vec::new();
    let mut dist = Vec::new();
    let mut total = 0.0;
    for (i, neighbours) in orders.iter().enumerate() {
        if identity.len() != neighbours.len() {
            identity = (1..=neighbours.len()).map(|r| r as f64).collect();
        }
        total += point_term(embedding, i, neighbours, &identity, &mut dist);
    }
    Ok(total / n as f64)
}

/// Neighbourhood cost of an individual's embedding of `dataset`.
pub fn cost(ind: &Individual, dataset: &Dataset) -> f64 {
    cost_of_embedding(&ind.embed(dataset), dataset).expect("embedding has one row per instance")
}
