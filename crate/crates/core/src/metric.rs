//! Point storage and pairwise distances.

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;

/// Distance function between two points of equal dimension.
#[derive(Debug, Clone, Copy, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    SquaredEuclidean,
    Manhattan,
    /// Any pure, symmetric function with zero self-distance.
    Custom(fn(&[f64], &[f64]) -> f64),
}

impl Metric {
    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
            Metric::SquaredEuclidean => squared_euclidean(a, b),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Custom(f) => f(a, b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::SquaredEuclidean => "sqeuclidean",
            Metric::Manhattan => "manhattan",
            Metric::Custom(_) => "custom",
        }
    }
}

#[inline]
fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// An immutable set of points in R^d. Point ids are the row indices.
#[derive(Debug, Clone)]
pub struct Dataset {
    coords: Vec<f64>,
    dim: usize,
    metric: Metric,
}

/// Custom metrics compare equal to each other.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.coords == other.coords
            && self.metric.name() == other.metric.name()
    }
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidDataset("points have dimension 0".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has dimension {} but point 0 has dimension {dim}",
                    p.len()
                )));
            }
            if let Some(j) = p.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has a non-finite coordinate at index {j}"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Dataset {
            coords,
            dim,
            metric: Metric::default(),
        })
    }

    /// One-dimensional dataset, one point per value.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(self.point(i), self.point(j))
    }
}

/// Above this many points distances are computed on demand instead of
/// materialised.
pub const DENSE_LIMIT: usize = 10_000;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<f64>),
    OnDemand(Dataset),
}

/// Symmetric distance lookup over a dataset's point ids.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    storage: Storage,
}

impl DistanceMatrix {
    pub fn new(dataset: &Dataset) -> Self {
        Self::with_policy(dataset, ExecPolicy::default())
    }

    pub fn with_policy(dataset: &Dataset, policy: ExecPolicy) -> Self {
        let n = dataset.len();
        if n > DENSE_LIMIT {
            return DistanceMatrix {
                n,
                storage: Storage::OnDemand(dataset.clone()),
            };
        }
        let rows = policy.map_range(n, |i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { dataset.distance(i, j) })
                .collect::<Vec<f64>>()
        });
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend(row);
        }
        // force exact symmetry whatever the metric's rounding
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        DistanceMatrix {
            n,
            storage: Storage::Dense(data),
        }
    }

    /// Wrap a precomputed square matrix.
    pub fn from_square(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidDataset("distance matrix is empty".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidDataset(format!(
                    "nonzero self-distance at {i}"
                )));
            }
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if a != b || a.is_nan() || a < 0.0 {
                    return Err(Error::InvalidDataset(format!(
                        "entries ({i},{j}) and ({j},{i}) are not a symmetric non-negative pair"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            n,
            storage: Storage::Dense(data),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::OnDemand(ds) => {
                if i == j {
                    0.0
                } else {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    ds.distance(a, b)
                }
            }
        }
    }

    /// Row `i` as an owned vector (borrowed rows are not available for
    /// on-demand storage).
    pub fn row(&self, i: usize) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n..(i + 1) * self.n].to_vec(),
            Storage::OnDemand(_) => (0..self.n).map(|j| self.get(i, j)).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }
}

/// Full symmetric n×n distance matrix.
pub fn pairwise_distances(dataset: &Dataset) -> Vec<Vec<f64>> {
    DistanceMatrix::new(dataset).to_rows()
}
