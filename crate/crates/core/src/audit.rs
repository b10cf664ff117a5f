//! Sampling-based numerical checks of the existence assumptions, producing
//! an equilibrium-existence verdict.
//!
//! Every checked function in this family is a polynomial of total degree at
//! most two, so a midpoint violation on a random segment is either
//! identically zero or bounded away from zero on a dense sample; a failure
//! witness is always exact. Continuity and semicontinuity of the set-valued
//! data are not sampled: for boxes, intervals, and an affine reaction map
//! they hold structurally, and the report states them as such.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::followers::{follower_reaction, ReactionMap};
use crate::model::{eval_payoff, uncertainty_interval, LeaderProfile, LqGameSpec};

/// Result of one sampled assumption check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCheck {
    pub pass: bool,
    pub worst_violation: f64,
}

impl SampledCheck {
    fn from_worst(worst: f64, tol: f64) -> Self {
        SampledCheck {
            pass: worst <= tol,
            worst_violation: worst,
        }
    }
}

/// Existence verdict assembled from the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditVerdict {
    StrongExists,
    WeakExists,
    Inconclusive,
}

/// Which existence clause a report instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceClause {
    /// Every leader's negated payoff is concave in the follower outputs and
    /// the uncertainty: a strong equilibrium exists.
    StrongAllConcave,
    /// A nonempty subset of leaders has that concavity: a weak equilibrium
    /// exists.
    WeakConcaveSubset,
    /// Only the relaxed quasi-concave variant holds on a nonempty subset: a
    /// weak equilibrium exists.
    WeakQuasiconcaveSubset,
    /// Some check failed; no existence conclusion.
    NotEstablished,
}

/// Full audit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Strategy boxes are nonempty, compact, convex (structural).
    pub a1a_box: bool,
    /// Affine consistency of the reaction map on random graph midpoints.
    pub a1b_graph_convex: SampledCheck,
    /// Interval construction succeeds on sampled feasible profiles.
    pub a1c_w_interval: SampledCheck,
    /// Per-leader quasi-concavity in (own strategy, follower outputs).
    pub a2a_quasiconcave: Vec<SampledCheck>,
    /// Per-leader concavity of the negated payoff in (outputs, uncertainty).
    pub a2b_concave: Vec<SampledCheck>,
    /// Per-leader quasi-concavity of the negated payoff in the same block.
    pub a3_quasiconcave: Vec<SampledCheck>,
    pub structural_notes: Vec<String>,
    pub sample_count: usize,
    pub seed: u64,
    pub tol: f64,
    pub verdict: AuditVerdict,
}

impl AuditReport {
    /// Leaders whose negated payoff passed the concavity check.
    pub fn concave_set(&self) -> Vec<usize> {
        self.a2b_concave
            .iter()
            .enumerate()
            .filter(|(_, c)| c.pass)
            .map(|(i, _)| i)
            .collect()
    }

    /// Leaders passing the relaxed quasi-concavity check.
    pub fn quasiconcave_set(&self) -> Vec<usize> {
        self.a3_quasiconcave
            .iter()
            .enumerate()
            .filter(|(_, c)| c.pass)
            .map(|(i, _)| i)
            .collect()
    }

    fn base_checks_pass(&self) -> bool {
        self.a1a_box
            && self.a1b_graph_convex.pass
            && self.a1c_w_interval.pass
            && self.a2a_quasiconcave.iter().all(|c| c.pass)
    }
}

fn sample_profile(spec: &LqGameSpec, rng: &mut ChaCha8Rng) -> LeaderProfile {
    LeaderProfile::new(
        spec.leaders
            .iter()
            .map(|l| {
                (0..l.dim())
                    .map(|k| {
                        if l.box_hi[k] > l.box_lo[k] {
                            rng.random_range(l.box_lo[k]..=l.box_hi[k])
                        } else {
                            l.box_lo[k]
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

fn sample_w(spec: &LqGameSpec, rng: &mut ChaCha8Rng) -> f64 {
    if spec.w_base_hi > spec.w_base_lo {
        rng.random_range(spec.w_base_lo..=spec.w_base_hi)
    } else {
        spec.w_base_lo
    }
}

/// Bounding box for follower outputs, from interval arithmetic on the
/// affine map over the strategy boxes and the base interval, inflated by one.
fn output_box(spec: &LqGameSpec, map: &ReactionMap) -> Vec<(f64, f64)> {
    let flat_lo: Vec<f64> = spec.leaders.iter().flat_map(|l| l.box_lo.clone()).collect();
    let flat_hi: Vec<f64> = spec.leaders.iter().flat_map(|l| l.box_hi.clone()).collect();
    map.a
        .iter()
        .zip(&map.b)
        .zip(&map.c0)
        .map(|((row, bj), cj)| {
            let mut lo = *cj;
            let mut hi = *cj;
            for (k, &ajk) in row.iter().enumerate() {
                let (p, q) = (ajk * flat_lo[k], ajk * flat_hi[k]);
                lo += p.min(q);
                hi += p.max(q);
            }
            let (p, q) = (bj * spec.w_base_lo, bj * spec.w_base_hi);
            (lo + p.min(q) - 1.0, hi + p.max(q) + 1.0)
        })
        .collect()
}

fn sample_y(ybox: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Vec<f64> {
    ybox.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()
}

/// Runs every sampled check with a seeded generator and assembles the
/// existence verdict.
pub fn audit_assumptions(
    spec: &LqGameSpec,
    map: &ReactionMap,
    sample_count: usize,
    tol: f64,
    seed: u64,
) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n_leaders();
    let ybox = output_box(spec, map);

    // Graph convexity of the reaction map: midpoints of random graph pairs
    // stay on the graph.
    let mut a1b_worst = 0.0f64;
    for _ in 0..sample_count {
        let x1 = sample_profile(spec, &mut rng);
        let x2 = sample_profile(spec, &mut rng);
        let (w1, w2) = (sample_w(spec, &mut rng), sample_w(spec, &mut rng));
        let y1 = follower_reaction(map, &x1, w1);
        let y2 = follower_reaction(map, &x2, w2);
        let xm = LeaderProfile::new(
            x1.x.iter()
                .zip(&x2.x)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect())
                .collect(),
        );
        let ym = follower_reaction(map, &xm, 0.5 * (w1 + w2));
        for (j, yj) in ym.iter().enumerate() {
            a1b_worst = a1b_worst.max((yj - 0.5 * (y1[j] + y2[j])).abs());
        }
    }

    // The interval is nonempty at sampled feasible profiles.
    let mut a1c_worst = 0.0f64;
    for _ in 0..sample_count {
        let x = sample_profile(spec, &mut rng);
        match uncertainty_interval(spec, &x) {
            Ok(_) => {}
            Err(crate::error::Error::EmptyUncertaintySet { lo, hi }) => {
                a1c_worst = a1c_worst.max(lo - hi);
            }
            Err(_) => unreachable!("interval construction only fails on emptiness"),
        }
    }

    // Quasi-concavity in (own strategy, outputs) at fixed rivals and w.
    let mut a2a_worst = vec![0.0f64; n];
    // Midpoint concavity of the negated payoff in (outputs, uncertainty).
    let mut a2b_worst = vec![0.0f64; n];
    // Quasi-concavity of the negated payoff in the same block.
    let mut a3_worst = vec![0.0f64; n];
    for _ in 0..sample_count {
        let base = sample_profile(spec, &mut rng);
        let w_fix = sample_w(spec, &mut rng);
        for i in 0..n {
            let mut p1 = base.clone();
            let mut p2 = base.clone();
            p1.x[i] = sample_profile(spec, &mut rng).x[i].clone();
            p2.x[i] = sample_profile(spec, &mut rng).x[i].clone();
            let y1 = sample_y(&ybox, &mut rng);
            let y2 = sample_y(&ybox, &mut rng);
            let pm = {
                let mut m = p1.clone();
                m.x[i] = p1.x[i].iter().zip(&p2.x[i]).map(|(a, b)| 0.5 * (a + b)).collect();
                m
            };
            let ym: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| 0.5 * (a + b)).collect();
            let f1 = eval_payoff(spec, i, &p1, &y1, w_fix).expect("validated spec");
            let f2 = eval_payoff(spec, i, &p2, &y2, w_fix).expect("validated spec");
            let fm = eval_payoff(spec, i, &pm, &ym, w_fix).expect("validated spec");
            a2a_worst[i] = a2a_worst[i].max(f1.min(f2) - fm);
        }

        let x_fix = sample_profile(spec, &mut rng);
        for i in 0..n {
            let y1 = sample_y(&ybox, &mut rng);
            let y2 = sample_y(&ybox, &mut rng);
            let (w1, w2) = (sample_w(spec, &mut rng), sample_w(spec, &mut rng));
            let ym: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| 0.5 * (a + b)).collect();
            let wm = 0.5 * (w1 + w2);
            let f1 = eval_payoff(spec, i, &x_fix, &y1, w1).expect("validated spec");
            let f2 = eval_payoff(spec, i, &x_fix, &y2, w2).expect("validated spec");
            let fm = eval_payoff(spec, i, &x_fix, &ym, wm).expect("validated spec");
            // Concavity of -f: midpoint of -f above the chord, so f below it.
            a2b_worst[i] = a2b_worst[i].max(fm - 0.5 * (f1 + f2));
            // Quasi-concavity of -f: -f(mid) >= min endpoint.
            a3_worst[i] = a3_worst[i].max(fm - f1.max(f2));
        }
    }

    let a2b_concave: Vec<SampledCheck> = a2b_worst
        .iter()
        .map(|&v| SampledCheck::from_worst(v, tol))
        .collect();
    let a3_quasiconcave: Vec<SampledCheck> = a3_worst
        .iter()
        .map(|&v| SampledCheck::from_worst(v, tol))
        .collect();

    let report = AuditReport {
        a1a_box: true,
        a1b_graph_convex: SampledCheck::from_worst(a1b_worst, tol),
        a1c_w_interval: SampledCheck::from_worst(a1c_worst, tol),
        a2a_quasiconcave: a2a_worst
            .iter()
            .map(|&v| SampledCheck::from_worst(v, tol))
            .collect(),
        a2b_concave,
        a3_quasiconcave,
        structural_notes: vec![
            "strategy boxes are nonempty, compact, convex by construction".into(),
            "the reaction map is affine, hence continuous with a convex graph".into(),
            "the uncertainty map is a continuous interval-valued map with compact convex values wherever nonempty".into(),
        ],
        sample_count,
        seed,
        tol,
        verdict: AuditVerdict::Inconclusive,
    };

    let verdict = if report.base_checks_pass() {
        if report.concave_set().len() == n {
            AuditVerdict::StrongExists
        } else if !report.concave_set().is_empty() || !report.quasiconcave_set().is_empty() {
            AuditVerdict::WeakExists
        } else {
            AuditVerdict::Inconclusive
        }
    } else {
        AuditVerdict::Inconclusive
    };
    AuditReport { verdict, ..report }
}

/// Maps a report to the existence clause it instantiates, with a printable
/// statement of which assumption subset was verified.
pub fn existence_statement(report: &AuditReport) -> (ExistenceClause, String) {
    let concave = report.concave_set();
    let quasi = report.quasiconcave_set();
    let set_str = |s: &[usize]| {
        let inner: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", inner.join(", "))
    };
    match report.verdict {
        AuditVerdict::StrongExists => (
            ExistenceClause::StrongAllConcave,
            format!(
                "strong equilibrium existence is guaranteed: feasible-set checks and \
                 quasi-concavity in (own strategy, outputs) passed for every leader, and the \
                 negated payoff is concave in (outputs, uncertainty) for all leaders {}",
                set_str(&concave)
            ),
        ),
        AuditVerdict::WeakExists if !concave.is_empty() => (
            ExistenceClause::WeakConcaveSubset,
            format!(
                "weak equilibrium existence is guaranteed: the negated payoff is concave in \
                 (outputs, uncertainty) on the nonempty leader subset {}",
                set_str(&concave)
            ),
        ),
        AuditVerdict::WeakExists => (
            ExistenceClause::WeakQuasiconcaveSubset,
            format!(
                "weak equilibrium existence is guaranteed by the relaxed clause: the negated \
                 payoff is quasi-concave in (outputs, uncertainty) on the nonempty leader \
                 subset {}",
                set_str(&quasi)
            ),
        ),
        AuditVerdict::Inconclusive => {
            let mut failing = Vec::new();
            if !report.a1b_graph_convex.pass {
                failing.push("reaction-map graph convexity".to_string());
            }
            if !report.a1c_w_interval.pass {
                failing.push("uncertainty-interval nonemptiness".to_string());
            }
            for (i, c) in report.a2a_quasiconcave.iter().enumerate() {
                if !c.pass {
                    failing.push(format!("leader {} quasi-concavity in (strategy, outputs)", i + 1));
                }
            }
            if report.concave_set().is_empty() && report.quasiconcave_set().is_empty() {
                failing.push("every leader's (outputs, uncertainty) concavity and its relaxation".into());
            }
            (
                ExistenceClause::NotEstablished,
                format!(
                    "no existence conclusion: failing checks: {}",
                    if failing.is_empty() { "none identified".into() } else { failing.join("; ") }
                ),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::followers::build_reaction_map;
    use crate::scenario::paper_sec5;

    #[test]
    fn reference_instance_is_strong() {
        let spec = paper_sec5();
        let map = build_reaction_map(&spec).unwrap();
        let report = audit_assumptions(&spec, &map, 10_000, 1e-9, 7);
        assert!(report.a1a_box);
        assert!(report.a1b_graph_convex.pass);
        assert!(report.a1c_w_interval.pass);
        assert!(report.a2a_quasiconcave.iter().all(|c| c.pass));
        assert_eq!(report.concave_set(), vec![0, 1]);
        assert_eq!(report.verdict, AuditVerdict::StrongExists);
        let (clause, _) = existence_statement(&report);
        assert_eq!(clause, ExistenceClause::StrongAllConcave);
    }

    #[test]
    fn negative_quadratic_weight_downgrades_to_weak() {
        let mut spec = paper_sec5();
        spec.leaders[0].c = -0.2;
        let map = build_reaction_map(&spec).unwrap();
        let report = audit_assumptions(&spec, &map, 10_000, 1e-9, 7);
        assert_eq!(report.concave_set(), vec![1]);
        assert_eq!(report.verdict, AuditVerdict::WeakExists);
        let (clause, text) = existence_statement(&report);
        assert_eq!(clause, ExistenceClause::WeakConcaveSubset);
        assert!(text.contains("{2}"));
    }

    #[test]
    fn all_zero_coefficients_pass_trivially() {
        let mut spec = paper_sec5();
        for l in &mut spec.leaders {
            l.a = vec![0.0, 0.0];
            l.b = vec![0.0, 0.0];
            l.c = 0.0;
        }
        let map = build_reaction_map(&spec).unwrap();
        let report = audit_assumptions(&spec, &map, 2_000, 1e-9, 11);
        assert_eq!(report.verdict, AuditVerdict::StrongExists);
    }

    #[test]
    fn concavity_pass_implies_quasiconcavity_pass() {
        let spec = paper_sec5();
        let map = build_reaction_map(&spec).unwrap();
        for seed in 0..5 {
            let report = audit_assumptions(&spec, &map, 2_000, 1e-9, seed);
            for (c, q) in report.a2b_concave.iter().zip(&report.a3_quasiconcave) {
                if c.pass {
                    assert!(q.pass);
                }
            }
        }
    }

    #[test]
    fn verdicts_are_deterministic_given_the_seed() {
        let spec = paper_sec5();
        let map = build_reaction_map(&spec).unwrap();
        let a = audit_assumptions(&spec, &map, 3_000, 1e-9, 42);
        let b = audit_assumptions(&spec, &map, 3_000, 1e-9, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn quasiconcave_only_report_cites_the_relaxed_clause() {
        let spec = paper_sec5();
        let map = build_reaction_map(&spec).unwrap();
        let mut report = audit_assumptions(&spec, &map, 100, 1e-9, 0);
        report.a2b_concave = vec![
            SampledCheck { pass: false, worst_violation: 0.5 },
            SampledCheck { pass: false, worst_violation: 0.5 },
        ];
        report.a3_quasiconcave = vec![
            SampledCheck { pass: true, worst_violation: 0.0 },
            SampledCheck { pass: false, worst_violation: 0.5 },
        ];
        report.verdict = AuditVerdict::WeakExists;
        let (clause, text) = existence_statement(&report);
        assert_eq!(clause, ExistenceClause::WeakQuasiconcaveSubset);
        assert!(text.contains("{1}"));
    }
}
