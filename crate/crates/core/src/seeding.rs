//! Greedy seed extraction and the search for the smallest connectivity
//! ratio `A` that yields exactly `k` seeds.
//!
//! A greedy run walks the points from densest to sparsest. The current
//! point `x` proposes the ball `c*(x, A·ε(x))`; the ball is accepted as a
//! seed when it has at least `min_size` points and touches no earlier seed.
//! The run stops early once the current sparsity exceeds `density_ratio`
//! times the sparsity of the first accepted seed's centre.

use std::collections::HashMap;

use serde::Serialize;

use crate::clustering::PartialClustering;
use crate::connectivity::ReachabilityMst;
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::metric::DistanceMatrix;
use crate::sparsity::SparsityProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedParams {
    /// Relative connectivity radius `A ≥ 1`.
    pub a: f64,
    /// Minimum seed size `M ≥ 1`.
    pub min_size: usize,
    /// Density-ratio stop `D ≥ 1`, or `+inf` to disable.
    pub density_ratio: f64,
}

impl SeedParams {
    pub fn new(a: f64, min_size: usize, density_ratio: f64) -> Result<Self> {
        let p = SeedParams {
            a,
            min_size,
            density_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 1.0) {
            return Err(Error::param(format!(
                "A must be at least 1 (got {})",
                self.a
            )));
        }
        validate_m_d(self.min_size, self.density_ratio)
    }
}

pub(crate) fn validate_m_d(min_size: usize, density_ratio: f64) -> Result<()> {
    if min_size < 1 {
        return Err(Error::param("minimum seed size must be at least 1"));
    }
    if !(density_ratio >= 1.0) {
        return Err(Error::param(format!(
            "density ratio must be at least 1 (got {density_ratio})"
        )));
    }
    Ok(())
}

/// Options for the overlap-tolerant variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OverlapOptions {
    /// Recompute sparsities on the residual points after every accepted
    /// seed instead of keeping the full-dataset values.
    pub recompute_sparsity: bool,
}

/// `w ≤ a·e`, evaluated as the ratio `w / e ≤ a` so that thresholds built
/// from candidate ratios compare exactly.
#[inline]
fn within(w: f64, e: f64, a: f64) -> bool {
    if e > 0.0 {
        w / e <= a
    } else {
        w <= 0.0
    }
}

/// Reusable state for repeated greedy runs on one dataset.
#[derive(Debug, Clone)]
pub struct Seeder<'a> {
    dist: &'a DistanceMatrix,
    profile: &'a SparsityProfile,
    mst: ReachabilityMst,
    order: Vec<usize>,
}

impl<'a> Seeder<'a> {
    pub fn new(dist: &'a DistanceMatrix, profile: &'a SparsityProfile) -> Self {
        Seeder {
            dist,
            profile,
            mst: ReachabilityMst::build(dist, profile),
            order: profile.density_order(),
        }
    }

    pub fn mst(&self) -> &ReachabilityMst {
        &self.mst
    }

    pub fn profile(&self) -> &SparsityProfile {
        self.profile
    }

    /// One greedy run with connectivity over the full dataset.
    pub fn run(&self, params: &SeedParams) -> PartialClustering {
        let n = self.dist.len();
        let mut owner: Vec<bool> = vec![false; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut min_extracted = f64::INFINITY;
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut ball: Vec<usize> = Vec::new();

        for &x in &self.order {
            if owner[x] {
                continue;
            }
            let e = self.profile.get(x);
            if stops(e, params.density_ratio, min_extracted) {
                break;
            }
            if params.a < 1.0 && e > 0.0 {
                continue;
            }
            // walk c*(x, A·ε(x)); any already-seeded point rejects the ball
            ball.clear();
            ball.push(x);
            stack.clear();
            stack.push((x, usize::MAX));
            let mut disjoint = true;
            'walk: while let Some((u, parent)) = stack.pop() {
                for &(v, w) in self.mst.neighbors(u) {
                    if v == parent || !within(w, e, params.a) {
                        continue;
                    }
                    if owner[v] {
                        disjoint = false;
                        break 'walk;
                    }
                    ball.push(v);
                    stack.push((v, u));
                }
            }
            if disjoint && ball.len() >= params.min_size {
                for &y in &ball {
                    owner[y] = true;
                }
                let mut seed = ball.clone();
                seed.sort_unstable();
                clusters.push(seed);
                if min_extracted.is_infinite() {
                    min_extracted = e;
                }
            }
        }
        PartialClustering::from_parts_unchecked(n, clusters)
    }

    /// Overlap-tolerant run: each accepted seed is removed from the universe,
    /// later balls are grown among the remaining points only, and the
    /// disjointness test becomes vacuous.
    pub fn run_overlap(&self, params: &SeedParams, opts: &OverlapOptions) -> PartialClustering {
        let n = self.dist.len();
        let mut removed = vec![false; n];
        let mut tried = vec![false; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut min_extracted = f64::INFINITY;
        let mut residual_tree: Option<ReachabilityMst> = None;
        let mut residual_profile: Option<SparsityProfile> = None;
        let mut cursor = 0;

        loop {
            let eps = residual_profile.as_ref().unwrap_or(self.profile);
            let next = if residual_profile.is_some() {
                (0..n)
                    .filter(|&x| !removed[x] && !tried[x])
                    .min_by(|&a, &b| eps.get(a).total_cmp(&eps.get(b)).then(a.cmp(&b)))
            } else {
                while cursor < n && (removed[self.order[cursor]] || tried[self.order[cursor]]) {
                    cursor += 1;
                }
                self.order.get(cursor).copied()
            };
            let Some(x) = next else { break };
            let e = eps.get(x);
            if stops(e, params.density_ratio, min_extracted) {
                break;
            }
            let tree = residual_tree.as_ref().unwrap_or(&self.mst);
            let ball = if params.a < 1.0 && e > 0.0 {
                Vec::new()
            } else {
                let mut ball = vec![x];
                let mut stack = vec![(x, usize::MAX)];
                while let Some((u, parent)) = stack.pop() {
                    for &(v, w) in tree.neighbors(u) {
                        if v != parent && within(w, e, params.a) {
                            ball.push(v);
                            stack.push((v, u));
                        }
                    }
                }
                ball
            };
            if ball.len() < params.min_size {
                tried[x] = true;
                continue;
            }
            for &y in &ball {
                removed[y] = true;
            }
            let mut seed = ball;
            seed.sort_unstable();
            clusters.push(seed);
            if min_extracted.is_infinite() {
                min_extracted = e;
            }
            let residual: Vec<usize> = (0..n).filter(|&y| !removed[y]).collect();
            if residual.is_empty() {
                break;
            }
            if opts.recompute_sparsity {
                match SparsityProfile::on_subset(self.dist, self.profile.n_p(), &residual) {
                    Ok(p) => residual_profile = Some(p),
                    // fewer points left than n_p: sparsity is undefined
                    Err(_) => break,
                }
            }
            let p = residual_profile.as_ref().unwrap_or(self.profile);
            residual_tree = Some(ReachabilityMst::build_on(self.dist, p, &residual));
        }
        PartialClustering::from_parts_unchecked(n, clusters)
    }
}

#[inline]
fn stops(e: f64, density_ratio: f64, min_extracted: f64) -> bool {
    density_ratio.is_finite() && min_extracted.is_finite() && e > density_ratio * min_extracted
}

/// Greedy partial clusters with connectivity over the full dataset.
pub fn greedy_partial_clusters(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    params: &SeedParams,
) -> Result<PartialClustering> {
    params.validate()?;
    Ok(Seeder::new(dist, profile).run(params))
}

/// Overlap-tolerant greedy partial clusters.
pub fn greedy_partial_clusters_overlap(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    params: &SeedParams,
    opts: &OverlapOptions,
) -> Result<PartialClustering> {
    params.validate()?;
    Ok(Seeder::new(dist, profile).run_overlap(params, opts))
}

/// Every ratio `d(y, z) / ε(x)` that is at least 1, sorted and deduplicated.
/// Greedy output can only change at one of these values of `A`.
pub fn candidate_a_values(dist: &DistanceMatrix, profile: &SparsityProfile) -> Result<Vec<f64>> {
    candidate_a_values_with(dist, profile, ExecPolicy::default())
}

pub fn candidate_a_values_with(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    policy: ExecPolicy,
) -> Result<Vec<f64>> {
    if let Some(point) = profile.first_zero() {
        return Err(Error::DegenerateDensity { point });
    }
    let n = dist.len();
    let rows = policy.map_range(n, |y| {
        ((y + 1)..n).map(|z| dist.get(y, z)).collect::<Vec<f64>>()
    });
    let mut distances: Vec<f64> = rows.into_iter().flatten().collect();
    policy.sort_f64(&mut distances);
    distances.dedup();

    let mut sparsities = profile.values().to_vec();
    sparsities.sort_by(f64::total_cmp);
    sparsities.dedup();

    let per_eps = policy.map_slice(&sparsities, |&e| {
        let start = distances.partition_point(|&d| d < e);
        distances[start..]
            .iter()
            .map(|&d| d / e)
            .collect::<Vec<f64>>()
    });
    let mut values: Vec<f64> = Vec::with_capacity(per_eps.iter().map(Vec::len).sum());
    for chunk in per_eps {
        values.extend(chunk);
    }
    policy.sort_f64(&mut values);
    values.dedup();
    Ok(values)
}

/// Outcome of a search over `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinAResult {
    pub a: f64,
    pub seeds: PartialClustering,
    /// Number of greedy runs performed.
    pub probes: usize,
    /// Size of the candidate set (exact mode) or rungs visited (approximate).
    pub candidates: usize,
}

/// The smallest candidate `A` whose greedy run yields exactly `k` seeds.
///
/// Seed counts are non-increasing in `A` when `min_size = 1`, so a binary
/// search finds the leftmost candidate with at most `k` seeds. With larger
/// `min_size` that order can break (small balls are rejected), so the
/// candidates are scanned in ascending order instead.
pub fn min_a_exact(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    min_size: usize,
    density_ratio: f64,
    k: usize,
) -> Result<MinAResult> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    validate_m_d(min_size, density_ratio)?;
    let mut s = candidate_a_values(dist, profile)?;
    if s.is_empty() {
        s.push(1.0);
    }
    let seeder = Seeder::new(dist, profile);
    let mut memo: HashMap<usize, PartialClustering> = HashMap::new();
    let mut probes = 0;
    let mut probe = |i: usize, memo: &mut HashMap<usize, PartialClustering>| -> usize {
        memo.entry(i)
            .or_insert_with(|| {
                probes += 1;
                seeder.run(&SeedParams {
                    a: s[i],
                    min_size,
                    density_ratio,
                })
            })
            .len()
    };

    if min_size > 1 {
        let mut below = None;
        let mut above = None;
        for i in 0..s.len() {
            let c = probe(i, &mut memo);
            if c == k {
                let seeds = memo.remove(&i).unwrap();
                return Ok(MinAResult {
                    a: s[i],
                    seeds,
                    probes,
                    candidates: s.len(),
                });
            }
            if c < k {
                below = Some(below.map_or(c, |b: usize| b.max(c)));
            } else {
                above = Some(above.map_or(c, |b: usize| b.min(c)));
            }
        }
        return Err(Error::KUnachievable {
            k,
            below,
            above,
            approximate: false,
        });
    }

    let (mut lo, mut hi) = (0, s.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, &mut memo) <= k {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if lo < s.len() && probe(lo, &mut memo) == k {
        let seeds = memo.remove(&lo).unwrap();
        return Ok(MinAResult {
            a: s[lo],
            seeds,
            probes,
            candidates: s.len(),
        });
    }
    let below = (lo < s.len()).then(|| probe(lo, &mut memo));
    let above = lo.checked_sub(1).map(|i| probe(i, &mut memo));
    Err(Error::KUnachievable {
        k,
        below,
        above,
        approximate: false,
    })
}

/// Geometric ladder `a0 · growth^i` for the approximate search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ladder {
    pub a0: f64,
    pub growth: f64,
    pub max_steps: usize,
    /// Bisection steps between the two rungs that straddle `k`.
    pub refine_steps: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder {
            a0: 1.0,
            growth: 1.1,
            max_steps: 200,
            refine_steps: 40,
        }
    }
}

impl Ladder {
    pub fn validate(&self) -> Result<()> {
        if !(self.growth > 1.0) || !self.growth.is_finite() {
            return Err(Error::param(format!(
                "ladder growth must exceed 1 (got {})",
                self.growth
            )));
        }
        if !(self.a0 >= 1.0) || !self.a0.is_finite() {
            return Err(Error::param(format!(
                "ladder start must be at least 1 (got {})",
                self.a0
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::param("ladder needs at least one step"));
        }
        Ok(())
    }
}

/// Which greedy variant a search drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Original,
    Overlap(OverlapOptions),
}

/// Climb the ladder until a run yields exactly `k` seeds. When two
/// consecutive rungs straddle `k`, bisect between them before climbing on.
pub fn min_a_approx(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    min_size: usize,
    density_ratio: f64,
    k: usize,
    ladder: &Ladder,
    variant: Variant,
) -> Result<MinAResult> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    validate_m_d(min_size, density_ratio)?;
    ladder.validate()?;
    let seeder = Seeder::new(dist, profile);
    let mut probes = 0;
    let mut below: Option<usize> = None;
    let mut above: Option<usize> = None;
    let mut run = |a: f64| {
        probes += 1;
        let params = SeedParams {
            a,
            min_size,
            density_ratio,
        };
        let seeds = match variant {
            Variant::Original => seeder.run(&params),
            Variant::Overlap(opts) => seeder.run_overlap(&params, &opts),
        };
        let c = seeds.len();
        if c < k {
            below = Some(below.map_or(c, |b: usize| b.max(c)));
        } else if c > k {
            above = Some(above.map_or(c, |b: usize| b.min(c)));
        }
        seeds
    };

    let mut prev: Option<(f64, usize)> = None;
    for step in 0..ladder.max_steps {
        let a = ladder.a0 * ladder.growth.powi(step as i32);
        let seeds = run(a);
        let count = seeds.len();
        if count == k {
            return Ok(MinAResult {
                a,
                seeds,
                probes,
                candidates: step + 1,
            });
        }
        if let Some((pa, pc)) = prev {
            if (pc < k) != (count < k) {
                let (mut lo, mut hi) = (pa, a);
                for _ in 0..ladder.refine_steps {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let seeds = run(mid);
                    let c = seeds.len();
                    if c == k {
                        return Ok(MinAResult {
                            a: mid,
                            seeds,
                            probes,
                            candidates: step + 1,
                        });
                    }
                    if (c < k) == (pc < k) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
        }
        prev = Some((a, count));
    }
    Err(Error::KUnachievable {
        k,
        below,
        above,
        approximate: true,
    })
}
