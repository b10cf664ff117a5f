//! Property tests for the spec-level invariants: payoff structure, interval
//! behavior, best-response exactness, scalarization inclusion, and the
//! nondominance flags against an independent pairwise oracle.

use nsn_ddu_core::gen::{random_positive_weights, random_spec, GenOptions};
use nsn_ddu_core::{
    build_reaction_map, check_leader_optimality, check_strong_pareto, check_weak_pareto,
    eval_payoff, follower_reaction, leader_best_response, pareto_front, scalarized_worst_case,
    uncertainty_interval, BrMode, LeaderProfile, LqGameSpec, Tiebreak,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample_profile(spec: &LqGameSpec, rng: &mut ChaCha8Rng) -> LeaderProfile {
    LeaderProfile::new(
        spec.leaders
            .iter()
            .map(|l| {
                (0..l.dim())
                    .map(|k| rng.random_range(l.box_lo[k]..=l.box_hi[k]))
                    .collect()
            })
            .collect(),
    )
}

/// Independent pairwise nondominance oracle, written against the raw
/// definition: a point is dominated when some other point is no worse in
/// every component and strictly better in one.
fn oracle_nondominance(points: &[Vec<f64>], tol: f64) -> Vec<bool> {
    let mut flags = vec![true; points.len()];
    for k in 0..points.len() {
        'other: for k2 in 0..points.len() {
            if k2 == k {
                continue;
            }
            let mut strictly_better = false;
            for (p, q) in points[k2].iter().zip(&points[k]) {
                if *p > *q + tol {
                    continue 'other;
                }
                if *p < *q - tol {
                    strictly_better = true;
                }
            }
            if strictly_better {
                flags[k] = false;
                break;
            }
        }
    }
    flags
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The payoff is exactly linear in the leader's own block and in the
    /// follower outputs.
    #[test]
    fn payoff_linear_in_strategy_and_outputs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let x1 = sample_profile(&spec, &mut rng);
        let x2 = sample_profile(&spec, &mut rng);
        let y1: Vec<f64> = (0..spec.n_followers()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y2: Vec<f64> = (0..spec.n_followers()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w = rng.random_range(spec.w_base_lo..=spec.w_base_hi);
        for i in 0..spec.n_leaders() {
            let mut xm = x1.clone();
            xm.x[i] = x1.x[i].iter().zip(&x2.x[i]).map(|(a, b)| 0.5 * (a + b)).collect();
            let ym: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| 0.5 * (a + b)).collect();
            let mut x2i = x1.clone();
            x2i.x[i] = x2.x[i].clone();
            let f1 = eval_payoff(&spec, i, &x1, &y1, w).unwrap();
            let f2 = eval_payoff(&spec, i, &x2i, &y2, w).unwrap();
            let fm = eval_payoff(&spec, i, &xm, &ym, w).unwrap();
            prop_assert!((fm - 0.5 * (f1 + f2)).abs() < 1e-9);
        }
    }

    /// Interval width follows the shrink identity and never grows in any
    /// coordinate with nonnegative sigma.
    #[test]
    fn interval_width_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let x = sample_profile(&spec, &mut rng);
        let int = uncertainty_interval(&spec, &x).unwrap();
        let shrink: f64 = spec
            .leaders
            .iter()
            .zip(&x.x)
            .map(|(l, xi)| l.sigma.iter().zip(xi).map(|(s, v)| s * v).sum::<f64>())
            .sum();
        let expect = (spec.w_base_hi - spec.w_base_lo) - 2.0 * shrink;
        prop_assert!((int.width() - expect).abs() < 1e-9);

        // Bump one coordinate upward: nonnegative sigma cannot widen.
        let mut bumped = x.clone();
        let i = rng.random_range(0..spec.n_leaders());
        let k = rng.random_range(0..spec.leaders[i].dim());
        bumped.x[i][k] = spec.leaders[i].box_hi[k];
        if bumped.x[i][k] >= x.x[i][k] {
            let int2 = uncertainty_interval(&spec, &bumped).unwrap();
            prop_assert!(int2.width() <= int.width() + 1e-12);
        }
    }

    /// Myopic best responses attain the grid-search maximum.
    #[test]
    fn myopic_best_response_beats_grid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let map = build_reaction_map(&spec).unwrap();
        let x = sample_profile(&spec, &mut rng);
        let w = rng.random_range(spec.w_base_lo..=spec.w_base_hi);
        for i in 0..spec.n_leaders() {
            let br = leader_best_response(&spec, &map, i, &x, w, BrMode::Myopic, &[0.5, 0.5], Tiebreak::LexLow)
                .unwrap();
            let mut at_br = x.clone();
            at_br.x[i] = br.x_i.clone();
            let check = check_leader_optimality(&spec, &map, i, &at_br, w, 41, 1e-9).unwrap();
            prop_assert!(check.pass, "leader {i} improvable by {}", check.margin);
        }
    }

    /// The anticipating value dominates the myopic choice re-evaluated at
    /// its own worst case.
    #[test]
    fn anticipating_dominates_composed_myopic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let map = build_reaction_map(&spec).unwrap();
        let x = sample_profile(&spec, &mut rng);
        let weights = random_positive_weights(&mut rng, spec.n_leaders());
        let Ok(base) = scalarized_worst_case(&spec, &map, &x, &weights) else {
            return Ok(());
        };
        for i in 0..spec.n_leaders() {
            let anti = leader_best_response(&spec, &map, i, &x, base.w_star, BrMode::Anticipating, &weights, Tiebreak::LexLow)
                .unwrap();
            let myo = leader_best_response(&spec, &map, i, &x, base.w_star, BrMode::Myopic, &weights, Tiebreak::LexLow)
                .unwrap();
            let mut at_myo = x.clone();
            at_myo.x[i] = myo.x_i.clone();
            let Ok(wc) = scalarized_worst_case(&spec, &map, &at_myo, &weights) else {
                continue;
            };
            let composed = eval_payoff(&spec, i, &at_myo, &wc.y_star, wc.w_star).unwrap();
            prop_assert!(anti.value >= composed - 1e-9,
                "leader {i}: anticipating {} vs composed myopic {composed}", anti.value);
        }
    }

    /// Scalarized minimizers are weakly Pareto optimal; with strictly
    /// positive weights they are Pareto optimal.
    #[test]
    fn scalarization_inclusion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let map = build_reaction_map(&spec).unwrap();
        let x = sample_profile(&spec, &mut rng);
        let weights = random_positive_weights(&mut rng, spec.n_leaders());
        let Ok(wc) = scalarized_worst_case(&spec, &map, &x, &weights) else {
            return Ok(());
        };
        let weak = check_weak_pareto(&spec, &map, &x, wc.w_star, &wc.y_star, 2001, 1e-6).unwrap();
        prop_assert!(weak.pass, "witness {:?}", weak.witness);
        let strong = check_strong_pareto(&spec, &map, &x, wc.w_star, &wc.y_star, 2001, 1e-6).unwrap();
        prop_assert!(strong.pass, "witness {:?}", strong.witness);
    }

    /// Nondominance flags agree exactly with the independent oracle.
    #[test]
    fn nondominance_matches_oracle(seed in any::<u64>(), grid in 2usize..160) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let map = build_reaction_map(&spec).unwrap();
        let x = sample_profile(&spec, &mut rng);
        let front = pareto_front(&spec, &map, &x, grid).unwrap();
        let points: Vec<Vec<f64>> = front.iter().map(|p| p.f.clone()).collect();
        let expect = oracle_nondominance(&points, 1e-9);
        let got: Vec<bool> = front.iter().map(|p| p.nondominated).collect();
        prop_assert_eq!(got, expect);
    }

    /// A strong membership pass implies a weak membership pass.
    #[test]
    fn strong_pass_implies_weak(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, &GenOptions::default());
        let map = build_reaction_map(&spec).unwrap();
        let x = sample_profile(&spec, &mut rng);
        let Ok(int) = uncertainty_interval(&spec, &x) else {
            return Ok(());
        };
        let w = rng.random_range(int.lo..=int.hi);
        let y = follower_reaction(&map, &x, w);
        let strong = check_strong_pareto(&spec, &map, &x, w, &y, 801, 1e-6).unwrap();
        let weak = check_weak_pareto(&spec, &map, &x, w, &y, 801, 1e-6).unwrap();
        if strong.pass {
            prop_assert!(weak.pass);
        }
    }

    /// Sampled concavity membership agrees with the sign of the quadratic
    /// weight for this family.
    #[test]
    fn concavity_membership_matches_sign(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opts = GenOptions { nonnegative_c: false, ..GenOptions::default() };
        let spec = random_spec(&mut rng, &opts);
        let map = build_reaction_map(&spec).unwrap();
        let report = nsn_ddu_core::audit_assumptions(&spec, &map, 2000, 1e-9, seed);
        for (i, l) in spec.leaders.iter().enumerate() {
            let expect = l.c >= 0.0;
            prop_assert_eq!(report.a2b_concave[i].pass, expect,
                "leader {} with c = {}", i, l.c);
        }
    }
}
