//! ε-connectivity through a minimum spanning tree of reachability weights.
//!
//! Two points are ε-connected when a chain joins them whose hops are at most
//! ε long and whose points all have sparsity at most ε. With the edge weight
//! `max(d(u, v), ε(u), ε(v))` that is exactly a minimax path problem, and a
//! minimum spanning tree preserves every minimax path value. All ε-distance,
//! ε-cluster and cluster-sparsity queries are answered on the tree.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::sparsity::SparsityProfile;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MstEdge {
    /// Smaller endpoint id.
    pub u: usize,
    /// Larger endpoint id.
    pub v: usize,
    pub weight: f64,
}

impl MstEdge {
    fn key_cmp(&self, other: &MstEdge) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

#[inline]
pub fn reachability_weight(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    u: usize,
    v: usize,
) -> f64 {
    dist.get(u, v).max(profile.get(u)).max(profile.get(v))
}

/// Spanning tree over a set of point ids under reachability weights.
///
/// Edges are ordered by `(weight, min id, max id)`; under that strict order
/// the minimum spanning tree is unique, so construction is deterministic.
#[derive(Debug, Clone)]
pub struct ReachabilityMst {
    n_p: usize,
    eps: Vec<f64>,
    in_tree: Vec<bool>,
    members: Vec<usize>,
    edges: Vec<MstEdge>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl ReachabilityMst {
    pub fn build(dist: &DistanceMatrix, profile: &SparsityProfile) -> Self {
        let all: Vec<usize> = (0..dist.len()).collect();
        Self::build_on(dist, profile, &all)
    }

    /// Tree over `members` only; chains may not leave the subset, but the
    /// supplied sparsities are used as given.
    pub fn build_on(dist: &DistanceMatrix, profile: &SparsityProfile, members: &[usize]) -> Self {
        let n = dist.len();
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let m = members.len();

        let mut in_tree = vec![false; n];
        let mut edges = Vec::with_capacity(m.saturating_sub(1));
        if m > 0 {
            // Prim over local indices, comparing full (weight, min, max) keys.
            let mut done = vec![false; m];
            let mut best: Vec<Option<MstEdge>> = vec![None; m];
            let mut current = 0;
            done[0] = true;
            for _ in 1..m {
                let cu = members[current];
                for j in 0..m {
                    if done[j] {
                        continue;
                    }
                    let cv = members[j];
                    let cand = MstEdge {
                        u: cu.min(cv),
                        v: cu.max(cv),
                        weight: reachability_weight(dist, profile, cu, cv),
                    };
                    let better = match &best[j] {
                        None => true,
                        Some(b) => cand.key_cmp(b) == Ordering::Less,
                    };
                    if better {
                        best[j] = Some(cand);
                    }
                }
                let mut next: Option<usize> = None;
                for j in 0..m {
                    if done[j] {
                        continue;
                    }
                    next = match next {
                        None => Some(j),
                        Some(k) => {
                            let (a, b) = (best[j].as_ref().unwrap(), best[k].as_ref().unwrap());
                            if a.key_cmp(b) == Ordering::Less {
                                Some(j)
                            } else {
                                Some(k)
                            }
                        }
                    };
                }
                let j = next.unwrap();
                done[j] = true;
                edges.push(best[j].unwrap());
                current = j;
            }
        }
        edges.sort_by(MstEdge::key_cmp);

        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        for &x in &members {
            in_tree[x] = true;
        }
        ReachabilityMst {
            n_p: profile.n_p(),
            eps: profile.values().to_vec(),
            in_tree,
            members,
            edges,
            adj,
        }
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    /// Size of the underlying universe (not just the tree members).
    pub fn universe(&self) -> usize {
        self.eps.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_tree[x]
    }

    /// Edges in ascending `(weight, u, v)` order.
    pub fn edges(&self) -> &[MstEdge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adj[x]
    }

    #[inline]
    pub fn sparsity(&self, x: usize) -> f64 {
        self.eps[x]
    }

    /// ε(x, y) for every tree member `y`; `+inf` for ids outside the tree.
    pub fn minimax_from(&self, x: usize) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; self.eps.len()];
        if !self.in_tree[x] {
            return out;
        }
        out[x] = self.eps[x];
        let mut stack = vec![(x, usize::MAX)];
        while let Some((u, parent)) = stack.pop() {
            for &(v, w) in &self.adj[u] {
                if v != parent {
                    out[v] = out[u].max(w);
                    stack.push((v, u));
                }
            }
        }
        out
    }

    /// ε(x, y): the smallest ε at which `x` and `y` are ε-connected.
    pub fn epsilon_distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return if self.in_tree[x] {
                self.eps[x]
            } else {
                f64::INFINITY
            };
        }
        self.minimax_from(x)[y]
    }

    /// ε(x, c) = min over `y ∈ c` of ε(x, y).
    pub fn point_to_set(&self, x: usize, set: &[usize]) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::param("cluster argument is empty"));
        }
        let row = self.minimax_from(x);
        Ok(set.iter().map(|&y| row[y]).fold(f64::INFINITY, f64::min))
    }

    /// ε(a, b) = min over pairs of ε(x, y).
    pub fn set_to_set(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::param("cluster argument is empty"));
        }
        let n = self.eps.len();
        let mut tag = vec![0u8; n];
        for &x in a {
            tag[x] |= 1;
        }
        let mut best = f64::INFINITY;
        for &y in b {
            tag[y] |= 2;
            if tag[y] == 3 && self.in_tree[y] {
                best = best.min(self.eps[y]);
            }
        }
        let mut uf = UnionFind::new(n);
        let mut comp_tag = tag.clone();
        for e in &self.edges {
            if e.weight >= best {
                break;
            }
            let (ta, tb) = (comp_tag[uf.find(e.u)], comp_tag[uf.find(e.v)]);
            let root = uf.union(e.u, e.v).unwrap();
            comp_tag[root] = ta | tb;
            if comp_tag[root] == 3 {
                best = e.weight;
                break;
            }
        }
        Ok(best)
    }

    /// ε*(c): the smallest ε at which every pair in `c` is ε-connected.
    /// Chains may pass through any tree member.
    pub fn cluster_sparsity(&self, c: &[usize]) -> Result<f64> {
        let Some(&first) = c.first() else {
            return Err(Error::param("cluster is empty"));
        };
        if c.iter().any(|&x| !self.in_tree[x]) {
            return Ok(f64::INFINITY);
        }
        let max_eps = c
            .iter()
            .map(|&x| self.eps[x])
            .fold(f64::NEG_INFINITY, f64::max);
        if c.iter().all(|&x| x == first) {
            return Ok(max_eps);
        }
        let n = self.eps.len();
        let mut count = vec![0usize; n];
        let mut distinct = 0;
        for &x in c {
            if count[x] == 0 {
                distinct += 1;
            }
            count[x] = 1;
        }
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            let (ca, cb) = (count[uf.find(e.u)], count[uf.find(e.v)]);
            let root = uf.union(e.u, e.v).unwrap();
            count[root] = ca + cb;
            if count[root] == distinct {
                return Ok(e.weight.max(max_eps));
            }
        }
        Ok(f64::INFINITY)
    }

    /// c*(x, ε): all points ε-connected to `x`, sorted; empty when
    /// `eps < ε(x)`.
    pub fn cluster_centered(&self, x: usize, eps: f64) -> Vec<usize> {
        if !self.in_tree[x] || eps < self.eps[x] {
            return Vec::new();
        }
        let mut out = self.walk(x, |w| w <= eps);
        out.sort_unstable();
        out
    }

    fn walk(&self, x: usize, admit: impl Fn(f64) -> bool) -> Vec<usize> {
        let mut out = vec![x];
        let mut stack = vec![(x, usize::MAX)];
        while let Some((u, parent)) = stack.pop() {
            for &(v, w) in &self.adj[u] {
                if v != parent && admit(w) {
                    out.push(v);
                    stack.push((v, u));
                }
            }
        }
        out
    }

    /// Per-cluster sparsity ε*(c) and the full matrix of ε(c, c') for a
    /// labelling of all tree members, in one ascending sweep over the edges.
    pub fn cluster_summary(&self, labels: &[usize], k: usize) -> ClusterSummary {
        let n = self.eps.len();
        let mut sizes = vec![0usize; k];
        let mut max_eps = vec![f64::NEG_INFINITY; k];
        for &x in &self.members {
            sizes[labels[x]] += 1;
            max_eps[labels[x]] = max_eps[labels[x]].max(self.eps[x]);
        }
        let mut sparsity: Vec<f64> = (0..k)
            .map(|c| {
                if sizes[c] == 1 {
                    max_eps[c]
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let mut cross = vec![vec![f64::INFINITY; k]; k];

        // per component: (label, member count) pairs, kept sorted by label
        let mut comp: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &x in &self.members {
            comp[x].push((labels[x], 1));
        }
        let mut uf = UnionFind::new(n);
        let mut cross_left = k * k.saturating_sub(1) / 2;
        let mut sparsity_left = sizes.iter().filter(|&&s| s > 1).count();
        for e in &self.edges {
            if cross_left == 0 && sparsity_left == 0 {
                break;
            }
            let (ra, rb) = (uf.find(e.u), uf.find(e.v));
            let a = std::mem::take(&mut comp[ra]);
            let b = std::mem::take(&mut comp[rb]);
            for &(la, _) in &a {
                for &(lb, _) in &b {
                    if la != lb && cross[la][lb].is_infinite() {
                        cross[la][lb] = e.weight;
                        cross[lb][la] = e.weight;
                        cross_left -= 1;
                    }
                }
            }
            let mut merged = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
                let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
                if take_a {
                    merged.push(a[i]);
                    i += 1;
                } else if take_b {
                    merged.push(b[j]);
                    j += 1;
                } else {
                    let label = a[i].0;
                    let total = a[i].1 + b[j].1;
                    if total == sizes[label] && sparsity[label].is_infinite() {
                        sparsity[label] = e.weight.max(max_eps[label]);
                        sparsity_left -= 1;
                    }
                    merged.push((label, total));
                    i += 1;
                    j += 1;
                }
            }
            let root = uf.union(e.u, e.v).unwrap();
            comp[root] = merged;
        }
        ClusterSummary { sparsity, cross }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    /// ε*(c) per cluster label.
    pub sparsity: Vec<f64>,
    /// ε(c, c') with `+inf` on the diagonal.
    pub cross: Vec<Vec<f64>>,
}

impl ClusterSummary {
    /// min over `c' ≠ c` of ε(c, c'); `+inf` for a single cluster.
    pub fn nearest_other(&self, c: usize) -> f64 {
        self.cross[c].iter().copied().fold(f64::INFINITY, f64::min)
    }
}
