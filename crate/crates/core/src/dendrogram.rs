//! The tree of maximal clusters for a dataset and density parameter.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::clustering::PartialClustering;
use crate::connectivity::ReachabilityMst;
use crate::metric::DistanceMatrix;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: usize,
    /// Smallest ε at which the node's cluster exists.
    pub birth: f64,
    /// Sorted member ids.
    pub members: Vec<usize>,
    /// Child node ids ordered by smallest member.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// Nodes `0..n` are the singleton leaves, one per point, born at the
/// point's sparsity. Internal nodes are created once per distinct merge
/// level; when several components join at the same weight they become
/// children of a single node.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    nodes: Vec<Node>,
    root: usize,
    n: usize,
}

impl Dendrogram {
    /// Build from a reachability tree spanning every point.
    pub fn build(mst: &ReachabilityMst) -> Self {
        let n = mst.universe();
        let mut nodes: Vec<Node> = (0..n)
            .map(|x| Node {
                id: x,
                birth: mst.sparsity(x),
                members: vec![x],
                children: Vec::new(),
                parent: None,
            })
            .collect();
        let mut uf = UnionFind::new(n);
        let mut node_of: Vec<usize> = (0..n).collect();
        let edges = mst.edges();
        let mut i = 0;
        while i < edges.len() {
            let w = edges[i].weight;
            let mut j = i;
            while j < edges.len() && edges[j].weight == w {
                j += 1;
            }
            let group = &edges[i..j];
            let before: Vec<(usize, usize)> = group
                .iter()
                .map(|e| (node_of[uf.find(e.u)], node_of[uf.find(e.v)]))
                .collect();
            for e in group {
                uf.union(e.u, e.v);
            }
            let mut merged: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (e, (a, b)) in group.iter().zip(before) {
                let entry = merged.entry(uf.find(e.u)).or_default();
                entry.push(a);
                entry.push(b);
            }
            for (root, mut children) in merged {
                children.sort_unstable();
                children.dedup();
                children.sort_by_key(|&c| nodes[c].members[0]);
                let id = nodes.len();
                let mut members: Vec<usize> = children
                    .iter()
                    .flat_map(|&c| nodes[c].members.iter().copied())
                    .collect();
                members.sort_unstable();
                for &c in &children {
                    nodes[c].parent = Some(id);
                }
                nodes.push(Node {
                    id,
                    birth: w,
                    members,
                    children,
                    parent: None,
                });
                node_of[root] = id;
            }
            i = j;
        }
        let root = nodes.len() - 1;
        Dendrogram { nodes, root, n }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Whether the node's cluster is an ε-cluster for some ε. A leaf born at
    /// the same level as its parent never exists on its own.
    pub fn is_maximal(&self, id: usize) -> bool {
        match self.nodes[id].parent {
            None => true,
            Some(p) => self.nodes[id].birth < self.nodes[p].birth,
        }
    }

    /// Distinct birth levels, ascending.
    pub fn levels(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self.nodes.iter().map(|v| v.birth).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }

    /// Topmost nodes with `birth ≤ eps`; points under no such node are left
    /// unclustered.
    pub fn cut_nodes(&self, eps: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if self.nodes[v].birth <= eps {
                out.push(v);
            } else {
                stack.extend(self.nodes[v].children.iter().copied());
            }
        }
        out.sort_by_key(|&v| self.nodes[v].members[0]);
        out
    }

    pub fn epsilon_cut(&self, eps: f64) -> PartialClustering {
        let clusters = self
            .cut_nodes(eps)
            .into_iter()
            .map(|v| self.nodes[v].members.clone())
            .collect();
        PartialClustering::from_parts_unchecked(self.n, clusters)
    }

    /// ε-cut at `eps · (1 + rel_tol)`, for thresholds typed as decimals.
    pub fn epsilon_cut_tol(&self, eps: f64, rel_tol: f64) -> PartialClustering {
        self.epsilon_cut(eps + rel_tol * eps.abs())
    }

    /// The unique ε-cut with exactly `k` clusters, with its level.
    pub fn k_cut(&self, k: usize) -> Option<(f64, PartialClustering)> {
        if k == 0 {
            return None;
        }
        self.levels()
            .into_iter()
            .find(|&eps| self.cut_nodes(eps).len() == k)
            .map(|eps| (eps, self.epsilon_cut(eps)))
    }

    /// DBSCAN's output read off the dendrogram: the ε-cut, then every
    /// unclustered point joins the cut cluster at smallest plain distance if
    /// that distance is at most `eps`. Ties go to the lower cluster index.
    pub fn dbscan_from_cut(&self, dist: &DistanceMatrix, eps: f64) -> PartialClustering {
        let cut = self.epsilon_cut(eps);
        let labels = cut.labels();
        let mut clusters = cut.clusters().to_vec();
        for x in 0..self.n {
            if labels[x].is_some() {
                continue;
            }
            let mut best: Option<(f64, usize)> = None;
            for (ci, c) in cut.clusters().iter().enumerate() {
                let dxc = c
                    .iter()
                    .map(|&y| dist.get(x, y))
                    .fold(f64::INFINITY, f64::min);
                if dxc <= eps && best.is_none_or(|(b, _)| dxc < b) {
                    best = Some((dxc, ci));
                }
            }
            if let Some((_, ci)) = best {
                clusters[ci].push(x);
            }
        }
        for c in &mut clusters {
            c.sort_unstable();
        }
        PartialClustering::from_parts_unchecked(self.n, clusters)
    }

    /// Nested form for JSON output.
    pub fn to_tree(&self) -> TreeNode {
        self.subtree(self.root)
    }

    fn subtree(&self, id: usize) -> TreeNode {
        let v = &self.nodes[id];
        TreeNode {
            id,
            birth: v.birth,
            members: v.members.clone(),
            children: v.children.iter().map(|&c| self.subtree(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNode {
    pub id: usize,
    pub birth: f64,
    pub members: Vec<usize>,
    pub children: Vec<TreeNode>,
}
