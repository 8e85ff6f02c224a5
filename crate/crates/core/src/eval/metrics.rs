//! External agreement (ARI, NMI) and internal quality (Calinski-Harabasz).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::metric::Dataset;

struct Contingency {
    n: usize,
    cells: HashMap<(usize, usize), usize>,
    rows: HashMap<usize, usize>,
    cols: HashMap<usize, usize>,
}

fn contingency(a: &[usize], b: &[usize]) -> Result<Contingency> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut t = Contingency {
        n: a.len(),
        cells: HashMap::new(),
        rows: HashMap::new(),
        cols: HashMap::new(),
    };
    for (&x, &y) in a.iter().zip(b) {
        *t.cells.entry((x, y)).or_default() += 1;
        *t.rows.entry(x).or_default() += 1;
        *t.cols.entry(y).or_default() += 1;
    }
    Ok(t)
}

fn pairs(c: usize) -> f64 {
    let c = c as f64;
    c * (c - 1.0) / 2.0
}

/// Adjusted Rand index. When both labelings are trivially identical in
/// structure (expected and maximal index coincide) the result is 1.
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = contingency(pred, truth)?;
    if t.n < 2 {
        return Err(Error::param("ARI needs at least two points"));
    }
    let index: f64 = t.cells.values().map(|&c| pairs(c)).sum();
    let a: f64 = t.rows.values().map(|&c| pairs(c)).sum();
    let b: f64 = t.cols.values().map(|&c| pairs(c)).sum();
    let expected = a * b / pairs(t.n);
    let max = 0.5 * (a + b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

fn entropy(counts: &HashMap<usize, usize>, n: f64) -> f64 {
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information, normalized by the arithmetic mean of the
/// two entropies. Two constant labelings score 1; exactly one constant
/// labeling scores 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = contingency(pred, truth)?;
    if t.n == 0 {
        return Err(Error::param("NMI needs at least one point"));
    }
    let (r, c) = (t.rows.len(), t.cols.len());
    if r == 1 && c == 1 {
        return Ok(1.0);
    }
    if r == 1 || c == 1 {
        return Ok(0.0);
    }
    let n = t.n as f64;
    let mi: f64 = t
        .cells
        .iter()
        .map(|(&(x, y), &nxy)| {
            let nxy = nxy as f64;
            let nx = t.rows[&x] as f64;
            let ny = t.cols[&y] as f64;
            nxy / n * (n * nxy / (nx * ny)).ln()
        })
        .sum();
    let h = 0.5 * (entropy(&t.rows, n) + entropy(&t.cols, n));
    Ok((mi / h).clamp(0.0, 1.0))
}

/// Calinski-Harabasz score with Euclidean centroids. Returns `+inf` when
/// every cluster is a single repeated point.
pub fn calinski_harabasz(dataset: &Dataset, labels: &[usize]) -> Result<f64> {
    let n = dataset.len();
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: n,
        });
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for &l in labels {
        let next = ids.len();
        ids.entry(l).or_insert(next);
    }
    let k = ids.len();
    if k < 2 {
        return Err(Error::param(
            "Calinski-Harabasz needs at least two clusters",
        ));
    }
    if n <= k {
        return Err(Error::param(
            "Calinski-Harabasz needs more points than clusters",
        ));
    }
    let dim = dataset.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut sizes = vec![0usize; k];
    let mut mean = vec![0.0; dim];
    for (i, p) in dataset.points().enumerate() {
        let c = ids[&labels[i]];
        sizes[c] += 1;
        for j in 0..dim {
            sums[c][j] += p[j];
            mean[j] += p[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centroids: Vec<Vec<f64>> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &sz)| s.iter().map(|v| v / sz as f64).collect())
        .collect();
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let between: f64 = centroids
        .iter()
        .zip(&sizes)
        .map(|(c, &sz)| sz as f64 * sq(c, &mean))
        .sum();
    let within: f64 = dataset
        .points()
        .enumerate()
        .map(|(i, p)| sq(p, &centroids[ids[&labels[i]]]))
        .sum();
    if within == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(between * (n - k) as f64 / (within * (k - 1) as f64))
}
