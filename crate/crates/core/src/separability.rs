//! Certificates for weak, local-maximum (LM) and strong separability of a
//! clustering, with the quantities behind each verdict.
//!
//! All inequalities are strict and, by default, compared exactly. A relative
//! tolerance can be set for noisy external data: `a < b` then becomes
//! `a < b − tol·max(|a|, |b|)`.

use serde::Serialize;

use crate::clustering::Clustering;
use crate::connectivity::{ClusterSummary, ReachabilityMst};
use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::sparsity::SparsityProfile;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SeparabilityOptions {
    pub rel_tol: f64,
    /// Qualify LM partners by `ε(y) < ε(x)` instead of `ε(y) ≤ ε(x)`.
    pub strict_lm_partner: bool,
}

#[inline]
fn lt(a: f64, b: f64, tol: f64) -> bool {
    if tol == 0.0 || !b.is_finite() {
        a < b
    } else {
        a < b - tol * a.abs().max(b.abs())
    }
}

/// `ε / e` with the degenerate cases pinned: `+inf` when `e = 0 < ε`,
/// `1` when both are zero.
#[inline]
pub fn ratio(eps_distance: f64, e: f64) -> f64 {
    if e > 0.0 {
        eps_distance / e
    } else if eps_distance > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Points whose closed sparsity ball holds no strictly denser point.
pub fn local_maxima(dist: &DistanceMatrix, profile: &SparsityProfile) -> Vec<usize> {
    let n = dist.len();
    (0..n)
        .filter(|&x| {
            let ex = profile.get(x);
            (0..n).all(|y| dist.get(x, y) > ex || profile.get(y) >= ex)
        })
        .collect()
}

/// The minimum-sparsity members of `c` (all ties).
pub fn densest_points(c: &[usize], profile: &SparsityProfile) -> Result<Vec<usize>> {
    if c.is_empty() {
        return Err(Error::param("cluster is empty"));
    }
    let min = c
        .iter()
        .map(|&x| profile.get(x))
        .fold(f64::INFINITY, f64::min);
    let mut out: Vec<usize> = c
        .iter()
        .copied()
        .filter(|&x| profile.get(x) == min)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// A(x, target) = ε(x, target) / ε(x).
pub fn relative_separability(mst: &ReachabilityMst, x: usize, target: &[usize]) -> Result<f64> {
    Ok(ratio(mst.point_to_set(x, target)?, mst.sparsity(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakWitness {
    pub cluster: usize,
    /// ε*(c) of the violating cluster.
    pub cluster_sparsity: f64,
    /// The cluster it reaches no later than it becomes connected.
    pub other: usize,
    /// ε(c, other).
    pub cross: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakReport {
    pub verdict: bool,
    pub cluster_sparsity: Vec<f64>,
    pub nearest_other: Vec<f64>,
    pub witness: Option<WeakWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LmWitness {
    /// Local maximum attaining `a_ell` and its partner. Absent when no
    /// partner qualifies and `a_ell` sits at its floor of 1.
    pub local_max: Option<usize>,
    pub partner: Option<usize>,
    pub a_ell: f64,
    /// Densest point and cluster pair attaining `rhs`. Absent for `k = 1`.
    pub densest: Option<usize>,
    pub from_cluster: Option<usize>,
    pub to_cluster: Option<usize>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LmReport {
    pub verdict: bool,
    pub a_ell: f64,
    pub rhs: f64,
    pub witness: Option<LmWitness>,
}

/// Feasible `A` for one densest point: `[lower, upper)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterInterval {
    pub cluster: usize,
    pub point: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongReport {
    pub verdict: bool,
    pub a_star: Option<f64>,
    pub intervals: Vec<ClusterInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityReport {
    pub n_p: usize,
    pub k: usize,
    pub weak: WeakReport,
    pub lm: LmReport,
    pub strong: StrongReport,
    pub alpha: bool,
    pub local_maxima: Vec<usize>,
    pub densest: Vec<Vec<usize>>,
}

/// Shared state for certifying clusterings of one dataset.
#[derive(Debug, Clone)]
pub struct Certifier<'a> {
    dist: &'a DistanceMatrix,
    profile: &'a SparsityProfile,
    mst: ReachabilityMst,
    opts: SeparabilityOptions,
}

impl<'a> Certifier<'a> {
    pub fn new(dist: &'a DistanceMatrix, profile: &'a SparsityProfile) -> Self {
        Certifier {
            dist,
            profile,
            mst: ReachabilityMst::build(dist, profile),
            opts: SeparabilityOptions::default(),
        }
    }

    pub fn with_options(mut self, opts: SeparabilityOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn mst(&self) -> &ReachabilityMst {
        &self.mst
    }

    fn check_size(&self, c: &Clustering) -> Result<()> {
        if c.len() != self.dist.len() {
            return Err(Error::LengthMismatch {
                left: c.len(),
                right: self.dist.len(),
            });
        }
        Ok(())
    }

    fn summary(&self, c: &Clustering) -> ClusterSummary {
        self.mst.cluster_summary(c.labels(), c.k())
    }

    pub fn weak(&self, c: &Clustering) -> Result<WeakReport> {
        self.check_size(c)?;
        let s = self.summary(c);
        Ok(self.weak_from(&s))
    }

    fn weak_from(&self, s: &ClusterSummary) -> WeakReport {
        let k = s.sparsity.len();
        let nearest: Vec<f64> = (0..k).map(|c| s.nearest_other(c)).collect();
        let witness = (0..k)
            .find(|&c| !lt(s.sparsity[c], nearest[c], self.opts.rel_tol))
            .map(|c| {
                let other = (0..k)
                    .filter(|&o| o != c)
                    .min_by(|&a, &b| s.cross[c][a].total_cmp(&s.cross[c][b]).then(a.cmp(&b)))
                    .unwrap();
                WeakWitness {
                    cluster: c,
                    cluster_sparsity: s.sparsity[c],
                    other,
                    cross: s.cross[c][other],
                }
            });
        WeakReport {
            verdict: witness.is_none(),
            cluster_sparsity: s.sparsity.clone(),
            nearest_other: nearest,
            witness,
        }
    }

    pub fn local_maxima(&self) -> Vec<usize> {
        local_maxima(self.dist, self.profile)
    }

    pub fn lm(&self, c: &Clustering) -> Result<LmReport> {
        self.check_size(c)?;
        Ok(self.lm_with(c, &self.local_maxima()))
    }

    fn lm_with(&self, c: &Clustering, maxima: &[usize]) -> LmReport {
        let clusters = c.clusters();
        let mut a_ell = 1.0;
        let mut best_lm: Option<(usize, usize)> = None;
        let mut nontrivial = false;
        for &x in maxima {
            let ex = self.profile.get(x);
            let row = self.mst.minimax_from(x);
            for &y in &clusters[c.label(x)] {
                let ey = self.profile.get(y);
                let qualifies = if self.opts.strict_lm_partner {
                    ey < ex
                } else {
                    ey <= ex
                };
                if !qualifies {
                    continue;
                }
                nontrivial |= y != x;
                let a = ratio(row[y], ex);
                if a > a_ell || best_lm.is_none() && a >= a_ell {
                    a_ell = a;
                    best_lm = Some((x, y));
                }
            }
        }

        let mut rhs = f64::INFINITY;
        let mut best_rhs: Option<(usize, usize, usize)> = None;
        for (ci, members) in clusters.iter().enumerate() {
            for z in densest_points(members, self.profile).unwrap() {
                let ez = self.profile.get(z);
                let row = self.mst.minimax_from(z);
                for (cj, other) in clusters.iter().enumerate() {
                    if cj == ci {
                        continue;
                    }
                    let to = other.iter().map(|&y| row[y]).fold(f64::INFINITY, f64::min);
                    let a = ratio(to, ez);
                    if a < rhs || best_rhs.is_none() {
                        rhs = a;
                        best_rhs = Some((z, ci, cj));
                    }
                }
            }
        }

        // with no partner other than the local maxima themselves the
        // clustering is LM-separable by definition
        let verdict = !nontrivial || lt(a_ell, rhs, self.opts.rel_tol);
        let witness = (!verdict).then(|| LmWitness {
            local_max: best_lm.map(|p| p.0),
            partner: best_lm.map(|p| p.1),
            a_ell,
            densest: best_rhs.map(|p| p.0),
            from_cluster: best_rhs.map(|p| p.1),
            to_cluster: best_rhs.map(|p| p.2),
            rhs,
        });
        LmReport {
            verdict,
            a_ell,
            rhs,
            witness,
        }
    }

    /// Strong separability via per-densest-point intervals: `A` works for
    /// `z ∈ X_c*` exactly when `c*(z, A·ε(z)) = c`.
    pub fn strong(&self, c: &Clustering) -> Result<StrongReport> {
        self.check_size(c)?;
        let clusters = c.clusters();
        let mut intervals = Vec::new();
        for (ci, members) in clusters.iter().enumerate() {
            for z in densest_points(members, self.profile)? {
                let ez = self.profile.get(z);
                let row = self.mst.minimax_from(z);
                let mut inner = f64::NEG_INFINITY;
                let mut outer = f64::INFINITY;
                for (y, &eps) in row.iter().enumerate() {
                    if c.label(y) == ci {
                        inner = inner.max(eps);
                    } else {
                        outer = outer.min(eps);
                    }
                }
                intervals.push(ClusterInterval {
                    cluster: ci,
                    point: z,
                    lower: ratio(inner, ez),
                    upper: ratio(outer, ez),
                });
            }
        }
        Ok(strong_from_intervals(intervals, self.opts.rel_tol))
    }

    /// Strong separability via cluster-level bounds: `c` must be
    /// `A·min ε`-connected and `A·min ε` must stay below every ε(c, c').
    pub fn strong_by_cluster(&self, c: &Clustering) -> Result<StrongReport> {
        self.check_size(c)?;
        let s = self.summary(c);
        let clusters = c.clusters();
        let intervals = clusters
            .iter()
            .enumerate()
            .map(|(ci, members)| {
                let z = densest_points(members, self.profile).unwrap()[0];
                let m = self.profile.get(z);
                ClusterInterval {
                    cluster: ci,
                    point: z,
                    lower: ratio(s.sparsity[ci], m),
                    upper: ratio(s.nearest_other(ci), m),
                }
            })
            .collect();
        Ok(strong_from_intervals(intervals, self.opts.rel_tol))
    }

    /// Sufficient condition for strong separability from the within-cluster
    /// sparsity spread `α(c) = max ε / min ε`.
    pub fn alpha_condition(&self, c: &Clustering) -> Result<bool> {
        self.check_size(c)?;
        let s = self.summary(c);
        Ok(self.alpha_from(c, &s))
    }

    fn alpha_from(&self, c: &Clustering, s: &ClusterSummary) -> bool {
        let mut max_alpha = f64::NEG_INFINITY;
        let mut min_rhs = f64::INFINITY;
        for (ci, members) in c.clusters().iter().enumerate() {
            let (lo, hi) =
                members
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                        let e = self.profile.get(x);
                        (lo.min(e), hi.max(e))
                    });
            if s.sparsity[ci] > hi {
                return false;
            }
            max_alpha = max_alpha.max(ratio(hi, lo));
            min_rhs = min_rhs.min(ratio(s.nearest_other(ci), lo));
        }
        lt(max_alpha, min_rhs, self.opts.rel_tol)
    }

    pub fn report(&self, c: &Clustering) -> Result<SeparabilityReport> {
        self.check_size(c)?;
        let s = self.summary(c);
        let maxima = self.local_maxima();
        let densest = c
            .clusters()
            .iter()
            .map(|m| densest_points(m, self.profile))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparabilityReport {
            n_p: self.profile.n_p(),
            k: c.k(),
            weak: self.weak_from(&s),
            lm: self.lm_with(c, &maxima),
            strong: self.strong(c)?,
            alpha: self.alpha_from(c, &s),
            local_maxima: maxima,
            densest,
        })
    }
}

fn strong_from_intervals(intervals: Vec<ClusterInterval>, tol: f64) -> StrongReport {
    let lower = intervals
        .iter()
        .map(|i| i.lower)
        .fold(f64::NEG_INFINITY, f64::max);
    let upper = intervals
        .iter()
        .map(|i| i.upper)
        .fold(f64::INFINITY, f64::min);
    let verdict = lt(lower, upper, tol);
    StrongReport {
        verdict,
        a_star: verdict.then_some(lower),
        intervals,
    }
}

pub fn check_weak(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    c: &Clustering,
) -> Result<WeakReport> {
    Certifier::new(dist, profile).weak(c)
}

pub fn check_lm(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    c: &Clustering,
) -> Result<LmReport> {
    Certifier::new(dist, profile).lm(c)
}

pub fn check_strong(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    c: &Clustering,
) -> Result<StrongReport> {
    Certifier::new(dist, profile).strong(c)
}

pub fn check_alpha_condition(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    c: &Clustering,
) -> Result<bool> {
    Certifier::new(dist, profile).alpha_condition(c)
}

pub fn certify(
    dist: &DistanceMatrix,
    profile: &SparsityProfile,
    c: &Clustering,
) -> Result<SeparabilityReport> {
    Certifier::new(dist, profile).report(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Dataset;

    fn setup(values: &[f64], n_p: usize) -> (DistanceMatrix, SparsityProfile) {
        let d = DistanceMatrix::new(&Dataset::from_values(values).unwrap());
        let p = SparsityProfile::compute(&d, n_p).unwrap();
        (d, p)
    }

    fn clustering_of(values: &[f64], groups: &[&[f64]]) -> Clustering {
        let labels = values
            .iter()
            .map(|v| groups.iter().position(|g| g.contains(v)).unwrap())
            .collect();
        Clustering::from_labels(labels).unwrap()
    }

    #[test]
    fn local_maxima_fixtures() {
        let x = [7.0, 8.0, 10.0, 13.0, 21.0, 17.0, 25.0, 27.0];
        let (d, p) = setup(&x, 2);
        let got: Vec<f64> = local_maxima(&d, &p).into_iter().map(|i| x[i]).collect();
        assert_eq!(got, vec![7.0, 8.0, 25.0, 27.0]);

        let x = [7.0, 8.0, 10.0, 13.0, 17.0, 19.0, 21.0];
        let (d, p) = setup(&x, 2);
        let got: Vec<f64> = local_maxima(&d, &p).into_iter().map(|i| x[i]).collect();
        assert_eq!(got, vec![7.0, 8.0, 17.0, 19.0, 21.0]);

        let grid: Vec<f64> = (0..6).map(f64::from).collect();
        let (d, p) = setup(&grid, 1);
        assert_eq!(local_maxima(&d, &p), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn densest_point_sets() {
        let x = [17.0, 18.0, 19.0, 20.0];
        let (_, p) = setup(&x, 3);
        assert_eq!(densest_points(&[0, 1, 2, 3], &p).unwrap(), vec![1, 2]);
        assert_eq!(densest_points(&[3], &p).unwrap(), vec![3]);
        assert!(densest_points(&[], &p).is_err());
        let (_, p) = setup(&[0.0, 1.0, 2.0], 1);
        assert_eq!(densest_points(&[0, 1, 2], &p).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn ratio_degenerate_cases() {
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(2.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(3.0, 2.0), 1.5);
    }

    #[test]
    fn self_relative_separability_is_one() {
        let x = [0.0, 0.4, 1.5, 2.0, 7.0];
        let (d, p) = setup(&x, 2);
        let t = ReachabilityMst::build(&d, &p);
        for i in 0..x.len() {
            assert_eq!(relative_separability(&t, i, &[i]).unwrap(), 1.0);
        }
    }

    #[test]
    fn lm_without_weak() {
        let x = [7.0, 8.0, 10.0, 13.0, 21.0, 17.0, 25.0, 27.0];
        let (d, p) = setup(&x, 2);
        let c = clustering_of(&x, &[&[7.0, 8.0, 10.0, 13.0, 21.0], &[17.0, 25.0, 27.0]]);
        let r = certify(&d, &p, &c).unwrap();
        assert!(!r.weak.verdict);
        assert!(r.weak.witness.is_some());
        assert!(r.lm.verdict);
        assert_eq!(r.lm.a_ell, 1.0);
        assert_eq!(r.lm.rhs, 2.0);
    }

    #[test]
    fn weak_without_strong() {
        let x = [1.0, 3.0, 5.0, 8.0, 10.0, 11.0, 13.0];
        let (d, p) = setup(&x, 2);
        let c = clustering_of(&x, &[&[1.0, 3.0, 5.0], &[8.0, 10.0, 11.0, 13.0]]);
        let cert = Certifier::new(&d, &p);
        assert!(cert.weak(&c).unwrap().verdict);
        let s = cert.strong(&c).unwrap();
        assert!(!s.verdict);
        assert_eq!(s.a_star, None);
        // the second cluster forces A ≥ 2
        assert!(s.intervals.iter().any(|i| i.cluster == 1 && i.lower >= 2.0));
        assert!(!cert.strong_by_cluster(&c).unwrap().verdict);
        // A(3, second cluster) uses ε(3) = 2 as denominator
        let t = cert.mst();
        assert_eq!(
            relative_separability(t, 1, &[3, 4, 5, 6]).unwrap(),
            t.point_to_set(1, &[3, 4, 5, 6]).unwrap() / 2.0
        );
    }

    #[test]
    fn weak_and_lm_without_strong() {
        let x = [7.0, 8.0, 10.0, 13.0, 17.0, 19.0, 21.0];
        let (d, p) = setup(&x, 2);
        let c = clustering_of(&x, &[&[7.0, 8.0, 10.0, 13.0], &[17.0, 19.0, 21.0]]);
        let r = certify(&d, &p, &c).unwrap();
        assert!(r.weak.verdict);
        assert!(r.lm.verdict);
        assert!(!r.strong.verdict);
        let first = r
            .strong
            .intervals
            .iter()
            .filter(|i| i.cluster == 0)
            .map(|i| i.lower);
        assert_eq!(first.fold(0.0, f64::max), 3.0);
    }

    #[test]
    fn zero_sparsity_makes_a_ell_infinite() {
        let x = [0.0, 1.0, 2.0, 3.0, 20.0, 22.0, 24.0, 26.0];
        let (d, p) = setup(&x, 1);
        let c = clustering_of(&x, &[&[0.0, 1.0, 2.0, 3.0], &[20.0, 22.0, 24.0, 26.0]]);
        let r = check_lm(&d, &p, &c).unwrap();
        assert_eq!(r.a_ell, f64::INFINITY);
        assert!(!r.verdict);
        assert!(r.witness.is_some());
    }

    #[test]
    fn one_local_maximum_per_cluster_is_trivially_lm() {
        let x = [0.0, 1.0, 3.0, 7.0, 100.0, 101.0, 103.0, 107.0];
        let (d, p) = setup(&x, 3);
        assert_eq!(local_maxima(&d, &p), vec![1, 5]);
        let c = Clustering::from_labels(vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        let r = check_lm(&d, &p, &c).unwrap();
        assert!(r.verdict);
        assert_eq!(r.a_ell, 1.0);
    }

    #[test]
    fn lm_on_two_tight_groups() {
        let (d, p) = setup(&[0.0, 1.0, 3.0, 30.0, 31.0, 33.0], 2);
        let c = Clustering::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let maxima = local_maxima(&d, &p);
        assert_eq!(maxima, vec![0, 1, 3, 4]);
        let r = check_lm(&d, &p, &c).unwrap();
        assert!(r.verdict);
        assert_eq!(r.a_ell, 1.0);
    }

    #[test]
    fn alpha_condition_cases() {
        let x = [0.0, 1.0, 2.0, 100.0, 101.0, 102.0];
        let (d, p) = setup(&x, 2);
        let c = Clustering::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert!(check_alpha_condition(&d, &p, &c).unwrap());
        assert!(check_strong(&d, &p, &c).unwrap().verdict);
        // one cluster spanning the gap is not connected at its own max sparsity
        let one = Clustering::from_labels(vec![0; 6]).unwrap();
        assert!(!check_alpha_condition(&d, &p, &one).unwrap());
        assert!(check_strong(&d, &p, &one).unwrap().verdict);
    }

    #[test]
    fn size_mismatch_is_reported() {
        let (d, p) = setup(&[0.0, 1.0, 2.0], 1);
        let c = Clustering::from_labels(vec![0, 1]).unwrap();
        assert!(matches!(
            check_weak(&d, &p, &c),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn tolerance_loosens_strictness() {
        let (d, p) = setup(&[0.0, 1.0, 2.0, 3.0], 1);
        let c = Clustering::from_labels(vec![0, 0, 1, 1]).unwrap();
        // ε*(c) = 1 = ε(c, c'): not weakly separable, at any tolerance
        let cert = Certifier::new(&d, &p).with_options(SeparabilityOptions {
            rel_tol: 0.1,
            ..Default::default()
        });
        assert!(!cert.weak(&c).unwrap().verdict);
        assert!(!check_weak(&d, &p, &c).unwrap().verdict);
    }
}
