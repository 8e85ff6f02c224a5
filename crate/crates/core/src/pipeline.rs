//! End-to-end clustering: search for the smallest seed ratio giving `k`
//! seeds, then expand the seeds into a full clustering.

use serde::Serialize;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::eval::metrics::calinski_harabasz;
use crate::exec::ExecPolicy;
use crate::expansion::{expand_with_stats, ExpansionStats};
use crate::metric::{Dataset, DistanceMatrix};
use crate::seeding::{min_a_approx, min_a_exact, Ladder, OverlapOptions, Variant};
use crate::sparsity::SparsityProfile;

/// Parameters of the exact mode. `min_size = 1` and `density_ratio = inf`
/// are the settings under which recovery of a separable clustering holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactParams {
    pub n_p: usize,
    pub k: usize,
    pub min_size: usize,
    pub density_ratio: f64,
}

impl ExactParams {
    pub fn new(n_p: usize, k: usize) -> Self {
        ExactParams {
            n_p,
            k,
            min_size: 1,
            density_ratio: f64::INFINITY,
        }
    }

    pub fn min_size(mut self, m: usize) -> Self {
        self.min_size = m;
        self
    }

    pub fn density_ratio(mut self, d: f64) -> Self {
        self.density_ratio = d;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapParams {
    pub n_p: usize,
    pub k: usize,
    pub min_size: usize,
    pub density_ratio: f64,
    /// Sparsity order used during expansion.
    pub expansion_n_p: usize,
    pub ladder: Ladder,
    pub overlap: OverlapOptions,
}

impl OverlapParams {
    pub fn new(n_p: usize, k: usize, min_size: usize, density_ratio: f64) -> Self {
        OverlapParams {
            n_p,
            k,
            min_size,
            density_ratio,
            expansion_n_p: 2,
            ladder: Ladder::default(),
            overlap: OverlapOptions::default(),
        }
    }
}

/// A clustering together with the search diagnostics that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRun {
    pub clustering: Clustering,
    /// The seed ratio that produced exactly `k` seeds.
    pub a: f64,
    pub seed_sizes: Vec<usize>,
    pub probes: usize,
    pub candidates: usize,
    pub expansion: ExpansionStats,
}

fn check_np(n_p: usize, n: usize) -> Result<()> {
    if n_p == 0 || n_p > n {
        return Err(Error::param(format!("n_p must lie in 1..={n} (got {n_p})")));
    }
    Ok(())
}

pub fn mse_exact(dataset: &Dataset, params: &ExactParams) -> Result<MseRun> {
    let dist = DistanceMatrix::new(dataset);
    mse_exact_on(&dist, params)
}

pub fn mse_exact_on(dist: &DistanceMatrix, params: &ExactParams) -> Result<MseRun> {
    check_np(params.n_p, dist.len())?;
    let profile = SparsityProfile::compute(dist, params.n_p)?;
    let found = min_a_exact(
        dist,
        &profile,
        params.min_size,
        params.density_ratio,
        params.k,
    )?;
    let seed_sizes = found.seeds.clusters().iter().map(Vec::len).collect();
    let (clustering, expansion) =
        expand_with_stats(dist, &profile, &found.seeds, ExecPolicy::default())?;
    Ok(MseRun {
        clustering,
        a: found.a,
        seed_sizes,
        probes: found.probes,
        candidates: found.candidates,
        expansion,
    })
}

/// Exact-mode seeding with the geometric ladder in place of the candidate
/// set. Works on inputs with duplicate points, where the candidate set is
/// undefined.
pub fn mse_approx_on(
    dist: &DistanceMatrix,
    params: &ExactParams,
    ladder: &Ladder,
) -> Result<MseRun> {
    check_np(params.n_p, dist.len())?;
    let profile = SparsityProfile::compute(dist, params.n_p)?;
    let found = min_a_approx(
        dist,
        &profile,
        params.min_size,
        params.density_ratio,
        params.k,
        ladder,
        Variant::Original,
    )?;
    let seed_sizes = found.seeds.clusters().iter().map(Vec::len).collect();
    let (clustering, expansion) =
        expand_with_stats(dist, &profile, &found.seeds, ExecPolicy::default())?;
    Ok(MseRun {
        clustering,
        a: found.a,
        seed_sizes,
        probes: found.probes,
        candidates: found.candidates,
        expansion,
    })
}

pub fn mse_overlap(dataset: &Dataset, params: &OverlapParams) -> Result<MseRun> {
    let dist = DistanceMatrix::new(dataset);
    mse_overlap_on(&dist, params)
}

pub fn mse_overlap_on(dist: &DistanceMatrix, params: &OverlapParams) -> Result<MseRun> {
    check_np(params.n_p, dist.len())?;
    check_np(params.expansion_n_p, dist.len())?;
    let profile = SparsityProfile::compute(dist, params.n_p)?;
    let found = min_a_approx(
        dist,
        &profile,
        params.min_size,
        params.density_ratio,
        params.k,
        &params.ladder,
        Variant::Overlap(params.overlap),
    )?;
    let seed_sizes = found.seeds.clusters().iter().map(Vec::len).collect();
    let grow = if params.expansion_n_p == params.n_p {
        profile
    } else {
        SparsityProfile::compute(dist, params.expansion_n_p)?
    };
    let (clustering, expansion) =
        expand_with_stats(dist, &grow, &found.seeds, ExecPolicy::default())?;
    Ok(MseRun {
        clustering,
        a: found.a,
        seed_sizes,
        probes: found.probes,
        candidates: found.candidates,
        expansion,
    })
}

/// `⌈δ·n/k⌉` for `δ = 0.025, 0.05, …, 0.975`, deduplicated.
pub fn default_m_grid(n: usize, k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..40)
        .map(|i| ((i * n) as f64 / (40 * k.max(1)) as f64).ceil().max(1.0) as usize)
        .collect();
    out.dedup();
    out
}

pub const DEFAULT_D_GRID: [f64; 3] = [1.5, 2.0, 20.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScore {
    pub min_size: usize,
    pub density_ratio: f64,
    /// `None` when the run failed; `error` then holds the reason.
    pub score: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutoResult {
    pub best: OverlapParams,
    pub run: MseRun,
    pub score: f64,
    pub scores: Vec<GridScore>,
}

/// Run [`mse_overlap`] over every `(m, d)` grid point and keep the run with
/// the highest Calinski-Harabasz score. Ties go to the earliest grid point
/// (m-major order).
pub fn auto_select(
    dataset: &Dataset,
    base: &OverlapParams,
    m_grid: &[usize],
    d_grid: &[f64],
    policy: ExecPolicy,
) -> Result<AutoResult> {
    if m_grid.is_empty() || d_grid.is_empty() {
        return Err(Error::param("parameter grids must be non-empty"));
    }
    let dist = DistanceMatrix::with_policy(dataset, policy);
    let grid: Vec<(usize, f64)> = m_grid
        .iter()
        .flat_map(|&m| d_grid.iter().map(move |&d| (m, d)))
        .collect();
    let runs = policy.map_slice(&grid, |&(m, d)| {
        let params = OverlapParams {
            min_size: m,
            density_ratio: d,
            ..*base
        };
        mse_overlap_on(&dist, &params).and_then(|run| {
            let score = calinski_harabasz(dataset, run.clustering.labels())?;
            Ok((params, run, score))
        })
    });

    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(OverlapParams, MseRun, f64)> = None;
    let mut failures = Vec::new();
    for (&(m, d), r) in grid.iter().zip(runs) {
        match r {
            Ok((params, run, score)) => {
                scores.push(GridScore {
                    min_size: m,
                    density_ratio: d,
                    score: Some(score),
                    error: None,
                });
                if best.as_ref().is_none_or(|b| score > b.2) {
                    best = Some((params, run, score));
                }
            }
            Err(e) => {
                let msg = format!("m={m}, d={d}: {e}");
                scores.push(GridScore {
                    min_size: m,
                    density_ratio: d,
                    score: None,
                    error: Some(e.to_string()),
                });
                failures.push(msg);
            }
        }
    }
    match best {
        Some((best, run, score)) => Ok(AutoResult {
            best,
            run,
            score,
            scores,
        }),
        None => Err(Error::AllRunsFailed { failures }),
    }
}
