//! Fixed-point iteration over joint best responses and the independent
//! equilibrium certifier.
//!
//! One outer iteration computes every leader's best response simultaneously
//! from the previous profile (Jacobi), then re-solves the virtual player's
//! scalarized worst case at the new profile. Convergence is the max-norm
//! displacement of the concatenated `(x, w)` state; the follower outputs are
//! excluded because they are a function of that state. Iterates are
//! quantized and hashed so that revisiting a profile without convergence is
//! reported as cycling rather than running the iteration out.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::followers::{follower_reaction, ReactionMap};
use crate::leaders::{
    check_leader_optimality, leader_best_response_with, BrMode, BrOptions, Tiebreak,
};
use crate::model::{
    check_profile_feasible, uncertainty_interval, LeaderProfile, LqGameSpec,
};
use crate::worstcase::{
    check_strong_pareto, check_weak_pareto, payoff_vector, scalarized_worst_case, ParetoCheck,
};

/// A candidate equilibrium: profile, uncertainty value, and the collection
/// of anticipated follower responses (one per leader plus the virtual
/// player's).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCandidate {
    pub x: LeaderProfile,
    pub w: f64,
    pub y_anticipations: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub mode: BrMode,
    pub tiebreak: Tiebreak,
    pub iterations: usize,
    pub converged: bool,
}

impl EquilibriumCandidate {
    /// The virtual player's anticipation, the one used by the Pareto checks.
    pub fn y_virtual(&self) -> &[f64] {
        self.y_anticipations.last().expect("candidate holds n+1 anticipations")
    }
}

/// How a solve ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SolveStatus {
    Converged,
    MaxIterExhausted,
    /// A previously visited iterate recurred without convergence.
    CycleDetected { at_iter: usize },
    /// A hard error interrupted the iteration; the trace is kept.
    Failed { at_iter: usize, message: String },
}

/// One recorded iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub x: Vec<f64>,
    pub w: f64,
    /// Max-norm displacement from the previous iterate; absent on the
    /// initial row.
    pub displacement: Option<f64>,
}

/// Result of a Jacobi solve: last candidate, how it ended, full trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiOutcome {
    pub candidate: EquilibriumCandidate,
    pub status: SolveStatus,
    pub trace: Vec<TraceRow>,
}

/// Solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiConfig {
    pub mode: BrMode,
    pub tiebreak: Tiebreak,
    pub max_iter: usize,
    pub conv_tol: f64,
    pub br: BrOptions,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        JacobiConfig {
            mode: BrMode::Anticipating,
            tiebreak: Tiebreak::LexLow,
            max_iter: 200,
            conv_tol: 1e-8,
            br: BrOptions::default(),
        }
    }
}

/// Quantizes a state to 1e-10 for cycle detection.
fn state_key(x: &[f64], w: f64) -> Vec<i64> {
    x.iter()
        .chain(std::iter::once(&w))
        .map(|v| (v * 1e10).round() as i64)
        .collect()
}

fn max_norm_displacement(a: &[f64], wa: f64, b: &[f64], wb: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold((wa - wb).abs(), f64::max)
}

/// One Jacobi round: all leaders respond to the previous profile, then the
/// virtual player is re-solved at the new one.
fn jacobi_step(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    w: f64,
    weights: &[f64],
    cfg: &JacobiConfig,
) -> Result<(LeaderProfile, f64)> {
    let mut next = x.clone();
    for i in 0..spec.n_leaders() {
        let br =
            leader_best_response_with(spec, map, i, x, w, cfg.mode, weights, cfg.tiebreak, &cfg.br)?;
        next.x[i] = br.x_i;
    }
    let w_next = scalarized_worst_case(spec, map, &next, weights)?.w_star;
    Ok((next, w_next))
}

/// Best-response-of-best-response iteration from a feasible initial profile.
pub fn jacobi_solve(
    spec: &LqGameSpec,
    map: &ReactionMap,
    weights: &[f64],
    init: &LeaderProfile,
    cfg: &JacobiConfig,
) -> Result<JacobiOutcome> {
    if cfg.max_iter == 0 {
        return Err(Error::InvalidValue {
            path: "max_iter".into(),
            message: "must be at least 1".into(),
        });
    }
    let feas = check_profile_feasible(spec, init);
    if !feas.all_feasible() {
        let worst = feas
            .per_leader
            .iter()
            .max_by(|a, b| a.worst_violation.total_cmp(&b.worst_violation))
            .expect("at least one leader");
        return Err(Error::InfeasibleProfile {
            leader: worst.leader,
            violation: worst.worst_violation,
        });
    }

    let mut x = init.clone();
    let mut w = scalarized_worst_case(spec, map, &x, weights)?.w_star;

    let mut trace = vec![TraceRow {
        iter: 0,
        x: x.flat(),
        w,
        displacement: None,
    }];
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(state_key(&trace[0].x, w));

    let candidate_at = |x: &LeaderProfile, w: f64, iterations: usize, converged: bool| {
        let y = follower_reaction(map, x, w);
        EquilibriumCandidate {
            x: x.clone(),
            w,
            y_anticipations: vec![y; spec.n_leaders() + 1],
            weights: weights.to_vec(),
            mode: cfg.mode,
            tiebreak: cfg.tiebreak,
            iterations,
            converged,
        }
    };

    for iter in 1..=cfg.max_iter {
        let (next, w_next) = match jacobi_step(spec, map, &x, w, weights, cfg) {
            Ok(s) => s,
            Err(e) => {
                return Ok(JacobiOutcome {
                    candidate: candidate_at(&x, w, iter - 1, false),
                    status: SolveStatus::Failed {
                        at_iter: iter,
                        message: e.to_string(),
                    },
                    trace,
                });
            }
        };

        let next_flat = next.flat();
        let disp = max_norm_displacement(&next_flat, w_next, &x.flat(), w);
        trace.push(TraceRow {
            iter,
            x: next_flat.clone(),
            w: w_next,
            displacement: Some(disp),
        });

        if disp < cfg.conv_tol {
            return Ok(JacobiOutcome {
                candidate: candidate_at(&next, w_next, iter, true),
                status: SolveStatus::Converged,
                trace,
            });
        }
        if !seen.insert(state_key(&next_flat, w_next)) {
            return Ok(JacobiOutcome {
                candidate: candidate_at(&next, w_next, iter, false),
                status: SolveStatus::CycleDetected { at_iter: iter },
                trace,
            });
        }
        x = next;
        w = w_next;
    }
    Ok(JacobiOutcome {
        candidate: candidate_at(&x, w, cfg.max_iter, false),
        status: SolveStatus::MaxIterExhausted,
        trace,
    })
}

/// Pass/fail with a margin for one equilibrium condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondCheck {
    pub pass: bool,
    pub margin: f64,
}

/// Leader-optimality condition for one leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondLeader {
    pub leader: usize,
    pub pass: bool,
    /// Largest payoff improvement found on the verification grid.
    pub margin: f64,
    pub witness: Option<Vec<f64>>,
}

/// Certified verdict for a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotEquilibrium,
    Weak,
    Strong,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::NotEquilibrium => "not_equilibrium",
            Verdict::Weak => "weak",
            Verdict::Strong => "strong",
        })
    }
}

/// A candidate together with machine-checked margins for every condition of
/// the equilibrium definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub candidate: EquilibriumCandidate,
    /// Profile feasibility (box membership).
    pub cond_a: CondCheck,
    /// Uncertainty-value membership in the interval at the profile.
    pub cond_b: CondCheck,
    /// Leader optimality with the uncertainty fixed, one entry per leader.
    pub cond_c: Vec<CondLeader>,
    /// Weak Pareto optimality of the virtual player's move.
    pub cond_d1: ParetoCheck,
    /// Strong Pareto optimality of the virtual player's move.
    pub cond_d2: ParetoCheck,
    /// Per-leader payoffs at the candidate state.
    pub payoffs: Vec<f64>,
    pub verdict: Verdict,
    /// True when a single follower anticipation serves every condition.
    pub reduced_outcome: bool,
}

/// Verifies a candidate against every equilibrium condition on grids of the
/// given resolution. Infeasible candidates are verified meaningfully: the
/// feasibility conditions fail and the verdict is `NotEquilibrium`.
pub fn verify_equilibrium(
    spec: &LqGameSpec,
    map: &ReactionMap,
    candidate: &EquilibriumCandidate,
    grid_n_x: usize,
    grid_n_w: usize,
    tol: f64,
) -> Result<EquilibriumCertificate> {
    if !candidate.x.dims_match(spec) {
        return Err(Error::DimensionMismatch {
            path: "candidate.x".into(),
            message: "profile blocks do not match the spec".into(),
        });
    }

    let feas = check_profile_feasible(spec, &candidate.x);
    let cond_a = CondCheck {
        pass: feas.worst_violation() <= tol,
        margin: feas.worst_violation(),
    };

    let (cond_b, interval_ok) = match uncertainty_interval(spec, &candidate.x) {
        Ok(int) => {
            let margin = (int.lo - candidate.w).max(candidate.w - int.hi);
            (
                CondCheck {
                    pass: margin <= tol,
                    margin,
                },
                true,
            )
        }
        Err(_) => (
            CondCheck {
                pass: false,
                margin: f64::INFINITY,
            },
            false,
        ),
    };

    let mut cond_c = Vec::with_capacity(spec.n_leaders());
    for i in 0..spec.n_leaders() {
        let check = check_leader_optimality(spec, map, i, &candidate.x, candidate.w, grid_n_x, tol)?;
        cond_c.push(CondLeader {
            leader: i,
            pass: check.pass,
            margin: check.margin,
            witness: check.witness,
        });
    }

    // With an empty interval the universally quantified Pareto conditions
    // hold vacuously; membership has already failed above.
    let (cond_d1, cond_d2) = if interval_ok {
        (
            check_weak_pareto(spec, map, &candidate.x, candidate.w, candidate.y_virtual(), grid_n_w, tol)?,
            check_strong_pareto(spec, map, &candidate.x, candidate.w, candidate.y_virtual(), grid_n_w, tol)?,
        )
    } else {
        let vacuous = ParetoCheck {
            pass: true,
            margin: f64::NEG_INFINITY,
            witness: None,
        };
        (vacuous.clone(), vacuous)
    };

    let feasible_and_stable = cond_a.pass && cond_b.pass && cond_c.iter().all(|c| c.pass);
    let verdict = if feasible_and_stable && cond_d2.pass {
        Verdict::Strong
    } else if feasible_and_stable && cond_d1.pass {
        Verdict::Weak
    } else {
        Verdict::NotEquilibrium
    };

    let reduced_outcome = candidate.y_anticipations.windows(2).all(|pair| {
        pair[0]
            .iter()
            .zip(&pair[1])
            .all(|(p, q)| (p - q).abs() <= 1e-9)
    });

    let payoffs = (0..spec.n_leaders())
        .map(|i| crate::model::eval_payoff(spec, i, &candidate.x, candidate.y_virtual(), candidate.w))
        .collect::<Result<Vec<f64>>>()?;

    Ok(EquilibriumCertificate {
        candidate: candidate.clone(),
        cond_a,
        cond_b,
        cond_c,
        cond_d1,
        cond_d2,
        payoffs,
        verdict,
        reduced_outcome,
    })
}

/// Uncertainty regime of a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Ddu,
    Diu,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Ddu => "ddu",
            Regime::Diu => "diu",
        })
    }
}

/// Solved row of a scalarization-weight sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSolution {
    pub x: Vec<f64>,
    pub w: f64,
    pub y: Vec<f64>,
    pub payoffs: Vec<f64>,
    pub weighted: f64,
    pub verdict: Verdict,
    pub iterations: usize,
}

/// One row of a sweep; solver failures are recorded, not raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub regime: Regime,
    pub solution: Option<SweepSolution>,
    pub error: Option<String>,
}

/// Sweep configuration: solver settings plus verification grids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub jacobi: JacobiConfig,
    /// Initial profile; all-zeros when absent.
    pub init: Option<LeaderProfile>,
    pub grid_n_x: usize,
    pub grid_n_w: usize,
    pub tol: f64,
}

impl SweepConfig {
    pub fn with_defaults(jacobi: JacobiConfig) -> Self {
        SweepConfig {
            jacobi,
            init: None,
            grid_n_x: 101,
            grid_n_w: 4001,
            tol: 1e-6,
        }
    }
}

/// Solves one sweep cell, folding solver failures into the row.
pub fn sweep_cell(
    spec: &LqGameSpec,
    map: &ReactionMap,
    lambda: f64,
    regime: Regime,
    cfg: &SweepConfig,
) -> SweepRow {
    let spec_r = match regime {
        Regime::Ddu => spec.clone(),
        Regime::Diu => spec.with_ddu(false),
    };
    let weights = [lambda, 1.0 - lambda];
    let init = cfg
        .init
        .clone()
        .unwrap_or_else(|| LeaderProfile::zeros(&spec_r));
    let outcome = match jacobi_solve(&spec_r, map, &weights, &init, &cfg.jacobi) {
        Ok(o) => o,
        Err(e) => {
            return SweepRow {
                lambda,
                regime,
                solution: None,
                error: Some(e.to_string()),
            }
        }
    };
    if outcome.status != SolveStatus::Converged {
        return SweepRow {
            lambda,
            regime,
            solution: None,
            error: Some(format!("solver did not converge: {:?}", outcome.status)),
        };
    }
    let cert = match verify_equilibrium(&spec_r, map, &outcome.candidate, cfg.grid_n_x, cfg.grid_n_w, cfg.tol) {
        Ok(c) => c,
        Err(e) => {
            return SweepRow {
                lambda,
                regime,
                solution: None,
                error: Some(e.to_string()),
            }
        }
    };
    let payoffs = payoff_vector(&spec_r, map, &outcome.candidate.x, outcome.candidate.w);
    let weighted = payoffs
        .iter()
        .zip(weights.iter())
        .map(|(f, l)| f * l)
        .sum();
    SweepRow {
        lambda,
        regime,
        solution: Some(SweepSolution {
            x: outcome.candidate.x.flat(),
            w: outcome.candidate.w,
            y: outcome.candidate.y_virtual().to_vec(),
            payoffs,
            weighted,
            verdict: cert.verdict,
            iterations: outcome.candidate.iterations,
        }),
        error: None,
    }
}

/// Runs the solver and certifier across scalarization weights, in one or
/// both uncertainty regimes. Two-leader games only: the weight vector is
/// `(lambda, 1 - lambda)`.
pub fn lambda_sweep(
    spec: &LqGameSpec,
    map: &ReactionMap,
    lambdas: &[f64],
    both_regimes: bool,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if spec.n_leaders() != 2 {
        return Err(Error::Unsupported(format!(
            "lambda sweep requires exactly two leaders, game has {}",
            spec.n_leaders()
        )));
    }
    for &l in lambdas {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidValue {
                path: "lambda".into(),
                message: format!("{l} outside [0, 1]"),
            });
        }
    }
    let mut rows = Vec::with_capacity(lambdas.len() * if both_regimes { 2 } else { 1 });
    for &lambda in lambdas {
        rows.push(sweep_cell(spec, map, lambda, Regime::Ddu, cfg));
        if both_regimes {
            rows.push(sweep_cell(spec, map, lambda, Regime::Diu, cfg));
        }
    }
    Ok(rows)
}
