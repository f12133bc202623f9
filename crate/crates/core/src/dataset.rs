//! Tabular datasets: CSV loading, per-feature min-max normalization and the
//! precomputed input-space neighbour orderings used by the manifold cost.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetOptions {
    /// Truncates every neighbour ordering to the nearest `k` points.
    pub max_neighbours: Option<usize>,
}

/// Immutable, normalized dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    instances: Matrix,
    feature_names: Vec<String>,
    labels: Option<Vec<usize>>,
    class_names: Vec<String>,
    neighbour_order: Vec<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from raw rows. Columns are min-max normalized and the
    /// neighbour orderings computed.
    pub fn new(
        raw: Matrix,
        feature_names: Vec<String>,
        labels: Option<Vec<String>>,
        options: &DatasetOptions,
    ) -> Result<Self> {
        let (n, m) = (raw.rows(), raw.cols());
        if n < 2 || m < 2 {
            return Err(Error::TooSmall {
                instances: n,
                features: m,
            });
        }
        if feature_names.len() != m {
            return Err(Error::LengthMismatch(feature_names.len(), m));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        for i in 0..n {
            for (j, v) in raw.row(i).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: i + 1,
                        column: feature_names[j].clone(),
                    });
                }
            }
        }

        let (labels, class_names) = match labels {
            Some(raw_labels) => {
                if raw_labels.len() != n {
                    return Err(Error::LengthMismatch(raw_labels.len(), n));
                }
                let (ids, names) = encode_labels(&raw_labels);
                (Some(ids), names)
            }
            None => (None, Vec::new()),
        };

        let instances = normalize(&raw);
        let mut neighbour_order = neighbour_order(&instances);
        if let Some(k) = options.max_neighbours {
            for row in &mut neighbour_order {
                row.truncate(k.max(1));
            }
        }

        Ok(Dataset {
            instances,
            feature_names,
            labels,
            class_names,
            neighbour_order,
        })
    }

    /// Loads a headered CSV file. Every column except `label_column` must be
    /// numeric.
    pub fn load_csv(
        path: impl AsRef<Path>,
        label_column: Option<&str>,
        options: &DatasetOptions,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(std::io::BufReader::new(file));
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };

        let header: Vec<String> = reader
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut seen = HashSet::new();
        for name in &header {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let label_idx = match label_column {
            Some(col) => Some(
                header
                    .iter()
                    .position(|h| h == col)
                    .ok_or_else(|| Error::MissingLabelColumn(col.to_owned()))?,
            ),
            None => None,
        };
        let feature_cols: Vec<usize> = (0..header.len()).filter(|&j| Some(j) != label_idx).collect();
        let feature_names: Vec<String> = feature_cols.iter().map(|&j| header[j].clone()).collect();

        let mut data = Vec::new();
        let mut labels = label_idx.map(|_| Vec::new());
        let mut n = 0;
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(csv_err)?;
            // header is row 1
            let row = r + 2;
            for &j in &feature_cols {
                let cell = record.get(j).unwrap_or("");
                let v: f64 = cell.parse().map_err(|_| Error::BadCell {
                    row,
                    column: header[j].clone(),
                    value: cell.to_owned(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row,
                        column: header[j].clone(),
                    });
                }
                data.push(v);
            }
            if let (Some(li), Some(labels)) = (label_idx, labels.as_mut()) {
                labels.push(record.get(li).unwrap_or("").to_owned());
            }
            n += 1;
        }
        let raw = Matrix::from_vec(n, feature_cols.len(), data);
        Dataset::new(raw, feature_names, labels, options)
    }

    pub fn instances(&self) -> &Matrix {
        &self.instances
    }

    pub fn n_instances(&self) -> usize {
        self.instances.rows()
    }

    pub fn n_features(&self) -> usize {
        self.instances.cols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Original label strings, indexed by class id.
    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn neighbour_order(&self) -> &[Vec<usize>] {
        &self.neighbour_order
    }
}

/// Class ids follow sorted label order: numeric when every label parses as a
/// number, lexicographic otherwise.
fn encode_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    let mut names: Vec<String> = raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(values) = numeric {
        let mut pairs: Vec<(f64, String)> = values.into_iter().zip(raw.iter().cloned()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        pairs.dedup_by(|a, b| a.1 == b.1);
        names = pairs.into_iter().map(|(_, s)| s).collect();
    }
    let ids = raw
        .iter()
        .map(|s| names.iter().position(|n| n == s).expect("label present"))
        .collect();
    (ids, names)
}

/// Min-max normalizes each column to [0, 1]. Constant columns become zeros.
pub fn normalize(raw: &Matrix) -> Matrix {
    let (n, m) = (raw.rows(), raw.cols());
    let mut out = Matrix::zeros(n, m);
    for j in 0..m {
        let (lo, hi) = raw
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let span = hi - lo;
        if span > 0.0 && span.is_finite() {
            for i in 0..n {
                let v = ((raw.get(i, j) - lo) / span).clamp(0.0, 1.0);
                out.set(i, j, v);
            }
        }
    }
    out
}

/// For every point, all other point indices sorted by ascending Euclidean
/// distance; equal distances are ordered by ascending index.
pub fn neighbour_order(instances: &Matrix) -> Vec<Vec<usize>> {
    let n = instances.rows();
    let mut dist = vec![0.0; n];
    (0..n)
        .map(|i| {
            let xi = instances.row(i);
            for (j, d) in dist.iter_mut().enumerate() {
                *d = squared_distance(xi, instances.row(j));
            }
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
            order
        })
        .collect()
}
