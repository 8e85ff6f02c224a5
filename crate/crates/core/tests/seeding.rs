mod common;

use common::*;
use mse_core::eval::generate::Rng;
use mse_core::seeding::{
    candidate_a_values, greedy_partial_clusters, greedy_partial_clusters_overlap, min_a_approx,
    min_a_exact, Ladder, OverlapOptions, SeedParams, Variant,
};
use mse_core::Error;
use proptest::prelude::*;

const THREE_GROUPS: [f64; 14] = [
    1.0, 3.0, 5.0, 7.02, 9.02, 11.02, 17.0, 18.0, 19.0, 20.0, 22.01, 23.01, 24.01, 25.01,
];

fn distinct_instance(rng: &mut Rng, max_n: usize) -> Instance {
    let n = pick(rng, 2, max_n);
    let dim = pick(rng, 1, 2);
    let jitter = !rng.next_u64().is_multiple_of(3);
    let pts = random_points(rng, n, dim, 20, jitter);
    let n_p = pick(rng, 2, n.min(4));
    Instance::new(pts, n_p)
}

#[test]
fn greedy_matches_literal_replay() {
    let mut rng = Rng::new(21);
    for _ in 0..60 {
        let inst = distinct_instance(&mut rng, 14);
        let s = candidate_a_values(&inst.dist, &inst.profile).unwrap();
        for &a in s.iter().step_by(1 + s.len() / 25) {
            for m in 1..=3 {
                for d in [f64::INFINITY, 1.5, 3.0] {
                    let p = SeedParams::new(a, m, d).unwrap();
                    let got = greedy_partial_clusters(&inst.dist, &inst.profile, &p).unwrap();
                    assert_eq!(
                        got.clusters(),
                        replay_greedy(&inst, a, m, d, false),
                        "a={a} m={m} d={d}"
                    );
                    let got = greedy_partial_clusters_overlap(
                        &inst.dist,
                        &inst.profile,
                        &p,
                        &OverlapOptions::default(),
                    )
                    .unwrap();
                    assert_eq!(
                        got.clusters(),
                        replay_greedy(&inst, a, m, d, true),
                        "overlap a={a} m={m} d={d}"
                    );
                }
            }
        }
    }
}

#[test]
fn candidates_match_triple_loop() {
    let mut rng = Rng::new(22);
    for _ in 0..50 {
        let inst = distinct_instance(&mut rng, 12);
        assert_eq!(
            candidate_a_values(&inst.dist, &inst.profile).unwrap(),
            brute_candidates(&inst)
        );
    }
}

#[test]
fn zero_sparsity_is_degenerate() {
    let inst = Instance::line(&[0.0, 0.0, 1.0], 2);
    assert!(matches!(
        candidate_a_values(&inst.dist, &inst.profile),
        Err(Error::DegenerateDensity { point: 0 })
    ));
}

#[test]
fn seed_count_is_monotone_over_candidates() {
    let mut rng = Rng::new(23);
    for _ in 0..50 {
        let inst = distinct_instance(&mut rng, 14);
        let s = candidate_a_values(&inst.dist, &inst.profile).unwrap();
        let counts: Vec<usize> = s
            .iter()
            .map(|&a| seeds(&inst, a, 1, f64::INFINITY).len())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    }
}

#[test]
fn min_a_exact_matches_full_sweep() {
    let mut rng = Rng::new(24);
    for _ in 0..50 {
        let inst = distinct_instance(&mut rng, 12);
        for (m, d) in [(1, f64::INFINITY), (2, f64::INFINITY), (1, 2.0), (3, 1.5)] {
            for k in 1..=inst.n() {
                let got = min_a_exact(&inst.dist, &inst.profile, m, d, k);
                match sweep(&inst, m, d, k) {
                    Some((a, c)) => {
                        let got = got.unwrap_or_else(|e| panic!("k={k} m={m} d={d}: {e}"));
                        assert_eq!(got.a, a, "k={k} m={m} d={d}");
                        assert_eq!(got.seeds.clusters(), c.as_slice());
                    }
                    None => assert!(
                        matches!(got, Err(Error::KUnachievable { .. })),
                        "k={k} m={m} d={d}"
                    ),
                }
            }
        }
    }
}

#[test]
fn probe_count_is_logarithmic_for_unit_min_size() {
    let mut rng = Rng::new(25);
    for _ in 0..20 {
        let inst = distinct_instance(&mut rng, 14);
        let r = min_a_exact(&inst.dist, &inst.profile, 1, f64::INFINITY, 1).unwrap();
        let bound = (r.candidates as f64).log2().ceil() as usize + 2;
        assert!(
            r.probes <= bound,
            "{} probes for {} candidates",
            r.probes,
            r.candidates
        );
    }
}

#[test]
fn exact_and_approximate_agree_on_achievability() {
    let mut rng = Rng::new(26);
    for _ in 0..40 {
        let inst = distinct_instance(&mut rng, 12);
        for k in 1..=inst.n().min(5) {
            let exact = min_a_exact(&inst.dist, &inst.profile, 1, f64::INFINITY, k);
            let approx = min_a_approx(
                &inst.dist,
                &inst.profile,
                1,
                f64::INFINITY,
                k,
                &Ladder::default(),
                Variant::Original,
            );
            assert_eq!(exact.is_ok(), approx.is_ok(), "k={k}");
            if let Ok(r) = approx {
                assert_eq!(r.seeds.len(), k);
            }
        }
    }
}

#[test]
fn three_groups_dataset_seeds_at_two() {
    let inst = Instance::line(&THREE_GROUPS, 3);
    let got = seeds(&inst, 2.0, 1, f64::INFINITY);
    assert_eq!(got.len(), 3);
    // 18 and 23.01 tie at sparsity 1; the lower id roots the first seed
    assert!(got[0].contains(&7));
    let truth = [0..6, 6..10, 10..14];
    for s in &got {
        assert!(
            truth.iter().any(|r| s.iter().all(|x| r.contains(x))),
            "{s:?} crosses clusters"
        );
    }
    let overlap = greedy_partial_clusters_overlap(
        &inst.dist,
        &inst.profile,
        &SeedParams::new(2.0, 1, f64::INFINITY).unwrap(),
        &OverlapOptions::default(),
    )
    .unwrap();
    assert_eq!(overlap.clusters(), got.as_slice());
}

#[test]
fn trivial_greedy_cases() {
    let mut rng = Rng::new(27);
    for _ in 0..20 {
        let inst = distinct_instance(&mut rng, 12);
        let n = inst.n();
        assert!(seeds(&inst, 1.0, n + 1, f64::INFINITY).is_empty());
        let first = inst.profile.density_order()[0];
        let got = seeds(&inst, 1.0, 1, f64::INFINITY);
        assert_eq!(got[0], bfs_ball(&inst, first, inst.eps(first)));
        let p = SeedParams::new(1.5, n, f64::INFINITY).unwrap();
        let o = greedy_partial_clusters_overlap(
            &inst.dist,
            &inst.profile,
            &p,
            &OverlapOptions::default(),
        )
        .unwrap();
        assert!(o.len() <= 1);
    }
}

#[test]
fn parameter_validation() {
    assert!(SeedParams::new(0.5, 1, 2.0).is_err());
    assert!(SeedParams::new(1.0, 0, 2.0).is_err());
    assert!(SeedParams::new(1.0, 1, 0.5).is_err());
    assert!(SeedParams::new(1.0, 1, f64::INFINITY).is_ok());
}

proptest! {
    #[test]
    fn candidates_sorted_and_at_least_one(values in prop::collection::btree_set(-1000i32..1000, 3..25)) {
        let v: Vec<f64> = values.into_iter().map(|x| x as f64 / 10.0).collect();
        let inst = Instance::line(&v, 2);
        let s = candidate_a_values(&inst.dist, &inst.profile).unwrap();
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.iter().all(|&a| a >= 1.0));
        prop_assert_eq!(s[0], 1.0);
    }

    #[test]
    fn seeds_are_disjoint_and_large_enough(values in prop::collection::btree_set(0i32..500, 2..30), m in 1usize..4, a in 1.0f64..4.0) {
        let v: Vec<f64> = values.into_iter().map(f64::from).collect();
        let inst = Instance::line(&v, 2);
        let got = seeds(&inst, a, m, f64::INFINITY);
        let mut seen = vec![false; v.len()];
        for s in &got {
            prop_assert!(s.len() >= m);
            for &x in s {
                prop_assert!(!seen[x]);
                seen[x] = true;
            }
        }
    }
}
