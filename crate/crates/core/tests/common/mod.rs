//! Brute-force oracles and seeded instance generators shared by the
//! integration tests. The oracles never consult the spanning tree or dendrogram.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use mse_core::eval::generate::Rng;
use mse_core::seeding::{candidate_a_values, greedy_partial_clusters, SeedParams};
use mse_core::{Clustering, Dataset, Dendrogram, DistanceMatrix, SparsityProfile};

pub struct Instance {
    pub data: Dataset,
    pub dist: DistanceMatrix,
    pub profile: SparsityProfile,
}

impl Instance {
    pub fn new(points: Vec<Vec<f64>>, n_p: usize) -> Self {
        let data = Dataset::new(points).unwrap();
        let dist = DistanceMatrix::new(&data);
        let profile = SparsityProfile::compute(&dist, n_p).unwrap();
        Instance {
            data,
            dist,
            profile,
        }
    }

    pub fn line(values: &[f64], n_p: usize) -> Self {
        Self::new(values.iter().map(|&v| vec![v]).collect(), n_p)
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn eps(&self, x: usize) -> f64 {
        self.profile.get(x)
    }
}

/// Points on a small integer grid plus optional jitter. Integer grids make
/// distance ties common; jitter removes them.
pub fn random_points(
    rng: &mut Rng,
    n: usize,
    dim: usize,
    grid: u64,
    jitter: bool,
) -> Vec<Vec<f64>> {
    assert!(
        jitter || (grid as f64).powi(dim as i32) >= n as f64,
        "grid too small for {n} distinct points"
    );
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p: Vec<f64> = (0..dim)
            .map(|_| {
                let v = (rng.next_u64() % grid) as f64;
                if jitter {
                    v + 0.5 * rng.uniform()
                } else {
                    v
                }
            })
            .collect();
        let key: Vec<u64> = p.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

pub fn pick(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// Candidate thresholds: every quantity a chain could bottleneck on.
fn thresholds(inst: &Instance) -> Vec<f64> {
    let n = inst.n();
    let mut t: Vec<f64> = (0..n).map(|x| inst.eps(x)).collect();
    for i in 0..n {
        for j in i + 1..n {
            t.push(inst.dist.get(i, j));
        }
    }
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// Points ε-connected to `x` by a chain whose hops and sparsities are all
/// at most `t`, found by BFS on the thresholded graph.
pub fn bfs_ball(inst: &Instance, x: usize, t: f64) -> Vec<usize> {
    if inst.eps(x) > t {
        return Vec::new();
    }
    let n = inst.n();
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut q = VecDeque::from([x]);
    while let Some(u) = q.pop_front() {
        for v in 0..n {
            if !seen[v] && inst.eps(v) <= t && inst.dist.get(u, v) <= t {
                seen[v] = true;
                q.push_back(v);
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

/// Smallest threshold at which a chain joins `x` and `y`.
pub fn chain_distance(inst: &Instance, x: usize, y: usize) -> f64 {
    for t in thresholds(inst) {
        if bfs_ball(inst, x, t).contains(&y) {
            return t;
        }
    }
    unreachable!("the complete graph connects everything at the largest threshold")
}

pub fn all_chain_distances(inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.n();
    let ts = thresholds(inst);
    let mut out = vec![vec![f64::INFINITY; n]; n];
    for x in 0..n {
        for &t in &ts {
            for y in bfs_ball(inst, x, t) {
                if out[x][y] == f64::INFINITY {
                    out[x][y] = t;
                }
            }
        }
    }
    out
}

/// Every set of the form c*(x, t), i.e. every maximal cluster.
pub fn maximal_clusters(inst: &Instance) -> BTreeSet<Vec<usize>> {
    let ts = thresholds(inst);
    let mut out = BTreeSet::new();
    for x in 0..inst.n() {
        for &t in &ts {
            let b = bfs_ball(inst, x, t);
            if !b.is_empty() {
                out.insert(b);
            }
        }
    }
    out
}

/// Weak separability straight from the definition, using chain distances.
pub fn brute_weak(e: &[Vec<f64>], c: &Clustering) -> bool {
    let clusters = c.clusters();
    clusters.iter().enumerate().all(|(i, a)| {
        let inner = a
            .iter()
            .flat_map(|&x| a.iter().map(move |&y| e[x][y]))
            .fold(0.0, f64::max);
        let cross = clusters
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, b)| a.iter().flat_map(move |&x| b.iter().map(move |&y| e[x][y])))
            .fold(f64::INFINITY, f64::min);
        inner < cross
    })
}

/// All partitions of `0..n` into members of `family`.
pub fn partitions_from(family: &BTreeSet<Vec<usize>>, n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(
        family: &[Vec<usize>],
        covered: &mut Vec<bool>,
        acc: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let Some(first) = covered.iter().position(|&c| !c) else {
            out.push(acc.clone());
            return;
        };
        for s in family {
            if s.contains(&first) && s.iter().all(|&x| !covered[x]) {
                s.iter().for_each(|&x| covered[x] = true);
                acc.push(s.clone());
                go(family, covered, acc, out);
                acc.pop();
                s.iter().for_each(|&x| covered[x] = false);
            }
        }
    }
    let fam: Vec<Vec<usize>> = family.iter().cloned().collect();
    let mut out = Vec::new();
    go(&fam, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Well-separated Gaussian groups with uneven sizes and spreads.
pub fn planted(
    rng: &mut Rng,
    n: usize,
    dim: usize,
    k: usize,
    gap: f64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sizes = vec![n / k; k];
    for s in sizes.iter_mut().take(n % k) {
        *s += 1;
    }
    let mut pts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, &size) in sizes.iter().enumerate() {
        let spread = 0.5 + rng.uniform();
        let center: Vec<f64> = (0..dim)
            .map(|j| {
                if j == 0 {
                    gap * c as f64
                } else {
                    10.0 * rng.uniform()
                }
            })
            .collect();
        for _ in 0..size {
            pts.push(center.iter().map(|m| m + spread * rng.normal()).collect());
            labels.push(c);
        }
    }
    (pts, labels)
}

/// BFS ball using ratio comparisons `value / e ≤ a`, over `alive` points.
pub fn ratio_ball(inst: &Instance, x: usize, a: f64, alive: &[bool]) -> Vec<usize> {
    let e = inst.eps(x);
    let ok = |v: f64| if e > 0.0 { v / e <= a } else { v <= 0.0 };
    let n = inst.n();
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut q = VecDeque::from([x]);
    while let Some(u) = q.pop_front() {
        for v in 0..n {
            if alive[v] && !seen[v] && ok(inst.eps(v)) && ok(inst.dist.get(u, v)) {
                seen[v] = true;
                q.push_back(v);
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

/// Literal replay of the greedy seed loop with explicit Tried and Clustered
/// sets. `overlap` grows balls among unclustered points only.
pub fn replay_greedy(inst: &Instance, a: f64, m: usize, d: f64, overlap: bool) -> Vec<Vec<usize>> {
    let n = inst.n();
    let mut tried = vec![false; n];
    let mut clustered = vec![false; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut min_extracted = f64::INFINITY;
    loop {
        let mut best: Option<usize> = None;
        for x in 0..n {
            if tried[x] || clustered[x] {
                continue;
            }
            if best.is_none_or(|b| inst.eps(x) < inst.eps(b)) {
                best = Some(x);
            }
        }
        let Some(x) = best else { break };
        let e = inst.eps(x);
        if e > d * min_extracted {
            break;
        }
        let alive: Vec<bool> = if overlap {
            clustered.iter().map(|c| !c).collect()
        } else {
            vec![true; n]
        };
        let ball = ratio_ball(inst, x, a, &alive);
        let disjoint = ball.iter().all(|&y| !clustered[y]);
        if ball.len() >= m && disjoint {
            ball.iter().for_each(|&y| clustered[y] = true);
            out.push(ball);
            if min_extracted.is_infinite() {
                min_extracted = e;
            }
        } else {
            tried[x] = true;
        }
    }
    out
}

/// Every `d(y, z) / ε(x) ≥ 1`, by triple loop.
pub fn brute_candidates(inst: &Instance) -> Vec<f64> {
    let n = inst.n();
    let mut s = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let r = inst.dist.get(y, z) / inst.eps(x);
                if r >= 1.0 {
                    s.push(r);
                }
            }
        }
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

/// Recompute every one-hop bound from scratch at each step and attach the
/// minimiser (value, then point id, then cluster index). Also checks that
/// the bound's minimum equals the true minimum ε-distance to a cluster.
pub fn naive_expand(inst: &Instance, seeds: &[Vec<usize>]) -> Vec<usize> {
    let n = inst.n();
    let e = all_chain_distances(inst);
    let mut label: Vec<Option<usize>> = vec![None; n];
    for (c, s) in seeds.iter().enumerate() {
        for &x in s {
            label[x] = Some(c);
        }
    }
    while label.iter().any(Option::is_none) {
        let mut best: Option<(f64, usize, usize)> = None;
        let mut true_min = f64::INFINITY;
        for x in (0..n).filter(|&x| label[x].is_none()) {
            for c in 0..seeds.len() {
                let members: Vec<usize> = (0..n).filter(|&y| label[y] == Some(c)).collect();
                let bound = members
                    .iter()
                    .map(|&y| inst.dist.get(x, y).max(inst.eps(x)).max(inst.eps(y)))
                    .fold(f64::INFINITY, f64::min);
                true_min = members.iter().map(|&y| e[x][y]).fold(true_min, f64::min);
                let cand = (bound, x, c);
                if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                    best = Some(cand);
                }
            }
        }
        let (v, x, c) = best.unwrap();
        assert_eq!(v, true_min, "one-hop minimum differs from true ε minimum");
        label[x] = Some(c);
    }
    label.into_iter().map(Option::unwrap).collect()
}

pub fn random_seeds(rng: &mut Rng, n: usize) -> Vec<Vec<usize>> {
    let k = pick(rng, 1, n.min(4));
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, pick(rng, 0, i));
    }
    let mut seeds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let used = pick(rng, k, n);
    for (j, &x) in ids[..used].iter().enumerate() {
        seeds[j % k].push(x);
    }
    seeds.iter_mut().for_each(|s| s.sort_unstable());
    seeds
}

/// Smallest candidate with exactly `k` seeds, by scanning all of S.
pub fn sweep(inst: &Instance, m: usize, d: f64, k: usize) -> Option<(f64, Vec<Vec<usize>>)> {
    candidate_a_values(&inst.dist, &inst.profile)
        .unwrap()
        .into_iter()
        .map(|a| (a, seeds(inst, a, m, d)))
        .find(|(_, c)| c.len() == k)
}

/// A random clustering built from the dendrogram: split nodes at random,
/// so results are often, but not always, unions of maximal clusters.
pub fn random_tree_clustering(rng: &mut Rng, g: &Dendrogram) -> Clustering {
    let mut parts = Vec::new();
    let mut stack = vec![g.root()];
    while let Some(v) = stack.pop() {
        let node = g.node(v);
        if !node.children.is_empty() && rng.uniform() < 0.6 {
            stack.extend(node.children.iter().copied());
        } else {
            parts.push(node.members.clone());
        }
    }
    Clustering::from_clusters(g.universe(), parts).unwrap()
}

pub fn seeds(inst: &Instance, a: f64, m: usize, d: f64) -> Vec<Vec<usize>> {
    greedy_partial_clusters(
        &inst.dist,
        &inst.profile,
        &SeedParams::new(a, m, d).unwrap(),
    )
    .unwrap()
    .into_clusters()
}
