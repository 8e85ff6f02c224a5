//! Per-point sparsity: the distance to the `(n_p - 1)`-th nearest neighbour,
//! counting the point itself as the 0-th.

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::metric::DistanceMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityProfile {
    n_p: usize,
    eps: Vec<f64>,
}

impl SparsityProfile {
    pub fn compute(dist: &DistanceMatrix, n_p: usize) -> Result<Self> {
        Self::with_policy(dist, n_p, ExecPolicy::default())
    }

    pub fn with_policy(dist: &DistanceMatrix, n_p: usize, policy: ExecPolicy) -> Result<Self> {
        let n = dist.len();
        validate_n_p(n_p, n)?;
        let eps = policy.map_range(n, |x| {
            if n_p == 1 {
                return 0.0;
            }
            let mut row = dist.row(x);
            let (_, kth, _) = row.select_nth_unstable_by(n_p - 1, f64::total_cmp);
            *kth
        });
        Ok(SparsityProfile { n_p, eps })
    }

    /// Sparsities computed within `members` only. Entries for non-members
    /// are `+inf`.
    pub fn on_subset(dist: &DistanceMatrix, n_p: usize, members: &[usize]) -> Result<Self> {
        validate_n_p(n_p, members.len())?;
        let mut eps = vec![f64::INFINITY; dist.len()];
        let mut buf = Vec::with_capacity(members.len());
        for &x in members {
            if n_p == 1 {
                eps[x] = 0.0;
                continue;
            }
            buf.clear();
            buf.extend(members.iter().map(|&y| dist.get(x, y)));
            let (_, kth, _) = buf.select_nth_unstable_by(n_p - 1, f64::total_cmp);
            eps[x] = *kth;
        }
        Ok(SparsityProfile { n_p, eps })
    }

    /// Wrap externally computed values.
    pub fn from_values(n_p: usize, eps: Vec<f64>) -> Result<Self> {
        if n_p == 0 {
            return Err(Error::param("n_p must be at least 1"));
        }
        if eps.iter().any(|e| e.is_nan() || *e < 0.0) {
            return Err(Error::param("sparsity values must be non-negative"));
        }
        Ok(SparsityProfile { n_p, eps })
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize) -> f64 {
        self.eps[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }

    /// Ids sorted by ascending sparsity, ties broken by lower id.
    pub fn density_order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.eps.len()).collect();
        ids.sort_by(|&a, &b| self.eps[a].total_cmp(&self.eps[b]).then(a.cmp(&b)));
        ids
    }

    pub fn first_zero(&self) -> Option<usize> {
        self.eps.iter().position(|&e| e == 0.0)
    }
}

fn validate_n_p(n_p: usize, n: usize) -> Result<()> {
    if n_p < 1 {
        return Err(Error::param("n_p must be at least 1"));
    }
    if n_p > n {
        return Err(Error::param(format!(
            "n_p = {n_p} exceeds the number of points ({n})"
        )));
    }
    Ok(())
}
