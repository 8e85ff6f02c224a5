//! Partial and complete clusterings over point ids `0..n`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Disjoint, non-empty clusters whose union need not cover every point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialClustering {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

impl PartialClustering {
    pub fn empty(n: usize) -> Self {
        PartialClustering {
            n,
            clusters: Vec::new(),
        }
    }

    /// Members of each cluster are stored sorted; cluster order is kept.
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(clusters.len());
        for (ci, mut c) in clusters.into_iter().enumerate() {
            if c.is_empty() {
                return Err(Error::param(format!("cluster {ci} is empty")));
            }
            c.sort_unstable();
            for &x in &c {
                if x >= n {
                    return Err(Error::param(format!("point id {x} out of range (n = {n})")));
                }
                if seen[x] {
                    return Err(Error::param(format!(
                        "point {x} appears in more than one cluster"
                    )));
                }
                seen[x] = true;
            }
            out.push(c);
        }
        Ok(PartialClustering { n, clusters: out })
    }

    pub(crate) fn from_parts_unchecked(n: usize, clusters: Vec<Vec<usize>>) -> Self {
        PartialClustering { n, clusters }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn into_clusters(self) -> Vec<Vec<usize>> {
        self.clusters
    }

    /// `labels[x]` is the index of the cluster holding `x`, if any.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut labels = vec![None; self.n];
        for (ci, c) in self.clusters.iter().enumerate() {
            for &x in c {
                labels[x] = Some(ci);
            }
        }
        labels
    }

    pub fn covered(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Clusters as a set of sets, for order-insensitive comparison.
    pub fn as_set(&self) -> BTreeSet<Vec<usize>> {
        self.clusters.iter().cloned().collect()
    }

    /// Promote to a full clustering when every point is covered.
    pub fn into_clustering(self) -> Result<Clustering> {
        if self.covered() != self.n {
            return Err(Error::param(format!(
                "partial clustering covers {} of {} points",
                self.covered(),
                self.n
            )));
        }
        let labels = self.labels().into_iter().map(|l| l.unwrap()).collect();
        Ok(Clustering {
            labels,
            k: self.clusters.len(),
        })
    }
}

/// A partition of `0..n` with contiguous labels `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Labels must be exactly the values `0..k` for some `k ≥ 1`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::param("labels are empty"));
        }
        let k = labels.iter().max().unwrap() + 1;
        let mut present = vec![false; k];
        for &l in &labels {
            present[l] = true;
        }
        if let Some(missing) = present.iter().position(|p| !p) {
            return Err(Error::param(format!(
                "labels are not contiguous: label {missing} is unused"
            )));
        }
        Ok(Clustering { labels, k })
    }

    /// Relabel arbitrary values to `0..k` in order of first appearance.
    pub fn from_arbitrary_labels<T: Ord + Clone>(labels: &[T]) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        let relabelled = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(l.clone()).or_insert(next)
            })
            .collect();
        Self::from_labels(relabelled)
    }

    pub fn from_clusters(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        PartialClustering::new(n, clusters)?.into_clustering()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize) -> usize {
        self.labels[x]
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l].push(x);
        }
        out
    }

    pub fn as_set(&self) -> BTreeSet<Vec<usize>> {
        self.clusters().into_iter().collect()
    }

    /// Same partition, ignoring label names.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.len() == other.len() && self.k == other.k && self.as_set() == other.as_set()
    }

    /// True when a bijection maps every partial cluster to a distinct
    /// cluster of `self` that contains it.
    pub fn extends(&self, partial: &PartialClustering) -> bool {
        if partial.universe() != self.len() || partial.len() != self.k {
            return false;
        }
        let mut used = vec![false; self.k];
        for c in partial.clusters() {
            let target = self.labels[c[0]];
            if used[target] || c.iter().any(|&x| self.labels[x] != target) {
                return false;
            }
            used[target] = true;
        }
        true
    }
}
