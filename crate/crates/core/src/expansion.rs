//! Greedy expansion of seeds into a full clustering.
//!
//! At each step the unclustered point nearest to some cluster in ε-distance
//! joins that cluster. The minimiser can be found through the one-hop bound
//! `ε!(x, c) = min over y ∈ c of max(d(x, y), ε(x), ε(y))`: the pair
//! minimising `ε!` also minimises the true ε-distance. Each point caches its
//! best `(ε!, cluster)` and the cache is refreshed against the newly
//! attached point only, so a step is O(n) and the whole expansion O(n²).

use serde::Serialize;

use crate::clustering::{Clustering, PartialClustering};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::metric::DistanceMatrix;
use crate::sparsity::SparsityProfile;

/// Work counters for one expansion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExpansionStats {
    /// (unclustered, clustered) pairs scanned to initialise the cache.
    pub init_pairs: usize,
    /// Attachment steps.
    pub steps: usize,
    /// Cache entries examined after attachments.
    pub updates: usize,
}

impl ExpansionStats {
    pub fn total_work(&self) -> usize {
        self.init_pairs + self.updates
    }
}

fn validate(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    seeds: &PartialClustering,
) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::param("expansion needs at least one seed"));
    }
    if seeds.universe() != dist.len() || profile.len() != dist.len() {
        return Err(Error::param(
            "seeds, profile and distances disagree on the number of points",
        ));
    }
    Ok(())
}

/// Expand `seeds` until every point is clustered. Cluster `i` of the result
/// grows from seed `i`.
pub fn expand(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    seeds: &PartialClustering,
) -> Result<Clustering> {
    expand_with_stats(dist, profile, seeds, ExecPolicy::default()).map(|(c, _)| c)
}

pub fn expand_with_stats(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    seeds: &PartialClustering,
    policy: ExecPolicy,
) -> Result<(Clustering, ExpansionStats)> {
    validate(dist, profile, seeds)?;
    let n = dist.len();
    let mut labels = seeds.labels();
    let clustered: Vec<usize> = (0..n).filter(|&x| labels[x].is_some()).collect();
    let mut pending: Vec<usize> = (0..n).filter(|&x| labels[x].is_none()).collect();
    let mut stats = ExpansionStats {
        init_pairs: pending.len() * clustered.len(),
        ..Default::default()
    };

    let label_of = &labels;
    let mut cache: Vec<(f64, usize)> = policy.map_slice(&pending, |&x| {
        let ex = profile.get(x);
        let mut best = (f64::INFINITY, usize::MAX);
        for &y in &clustered {
            let v = dist.get(x, y).max(ex).max(profile.get(y));
            let c = label_of[y].unwrap();
            if v < best.0 || (v == best.0 && c < best.1) {
                best = (v, c);
            }
        }
        best
    });

    while !pending.is_empty() {
        // pending stays in ascending id order, so the first strict minimum
        // is the lowest id among ties
        let mut pick = 0;
        for i in 1..pending.len() {
            if cache[i].0 < cache[pick].0 {
                pick = i;
            }
        }
        let x = pending.remove(pick);
        let (_, c) = cache.remove(pick);
        labels[x] = Some(c);
        stats.steps += 1;

        let ex = profile.get(x);
        for (i, &y) in pending.iter().enumerate() {
            let v = dist.get(x, y).max(ex).max(profile.get(y));
            let entry = &mut cache[i];
            if v < entry.0 || (v == entry.0 && c < entry.1) {
                *entry = (v, c);
            }
        }
        stats.updates += pending.len();
    }

    let labels = labels.into_iter().map(|l| l.unwrap()).collect();
    Ok((Clustering::from_labels(labels)?, stats))
}
