//! The virtual player: scalarized worst-case solve over the uncertainty
//! interval, Pareto-front sweep, and weak/strong Pareto membership checks.
//!
//! After substituting the affine reaction map, the weighted objective
//! `J(w) = sum_i lambda_i f_i(x, y(x,w), w)` is a univariate quadratic with
//! leading coefficient `sum_i lambda_i c_i`, so the minimizer is computed in
//! closed form (stationary point clamped to the interval when strictly
//! convex, better endpoint otherwise). Grid evaluation is kept for the
//! membership checks and as the independent test oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::followers::ReactionMap;
use crate::model::{dot, eval_payoff, uncertainty_interval, LeaderProfile, LqGameSpec};

/// Coefficient magnitudes below this are treated as exactly zero when
/// classifying the scalarized quadratic.
const COEFF_TOL: f64 = 1e-12;

/// Default tolerance for nondominance flags.
pub const NONDOMINANCE_TOL: f64 = 1e-9;

/// Where the scalarized minimizer sits in the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Interior,
    AtLo,
    AtHi,
}

/// Scalarized worst-case solution at a fixed leader profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseResult {
    pub w_star: f64,
    pub y_star: Vec<f64>,
    /// Weighted-sum value at the minimizer.
    pub objective: f64,
    /// Per-leader payoffs at the minimizer.
    pub payoffs: Vec<f64>,
    pub boundary: Boundary,
    /// The objective was constant over the interval; `w_star` is the lower
    /// endpoint by convention.
    pub degenerate: bool,
}

/// One sampled point of the virtual player's multi-objective problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub w: f64,
    pub f: Vec<f64>,
    pub nondominated: bool,
}

/// Outcome of a weak or strong Pareto membership check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoCheck {
    pub pass: bool,
    /// Closest approach to a violation over the grid (equals the witness
    /// severity on failure).
    pub margin: f64,
    pub witness: Option<ParetoWitness>,
}

/// A dominating alternative found by a membership check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoWitness {
    pub w: f64,
    /// Componentwise payoff decrease achieved by the witness.
    pub margins: Vec<f64>,
}

pub(crate) fn validate_weights(spec: &LqGameSpec, weights: &[f64]) -> Result<()> {
    let n = spec.n_leaders();
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!(
            "expected {n} weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Quadratic and linear coefficients of the scalarized objective in `w`.
///
/// Both are independent of the leader profile: the profile only moves the
/// constant term and the interval.
pub(crate) fn scalar_quad_coeffs(spec: &LqGameSpec, map: &ReactionMap, weights: &[f64]) -> (f64, f64) {
    let mut quad = 0.0;
    let mut lin = 0.0;
    for (l, &lam) in spec.leaders.iter().zip(weights) {
        quad += lam * l.c;
        lin += lam * (dot(&l.b, &map.b) - 2.0 * l.c * l.d);
    }
    (quad, lin)
}

/// All leaders' payoffs at `(x, G(x, w), w)`.
pub fn payoff_vector(spec: &LqGameSpec, map: &ReactionMap, x: &LeaderProfile, w: f64) -> Vec<f64> {
    let y = map.eval_flat(&x.flat(), w);
    (0..spec.n_leaders())
        .map(|i| eval_payoff(spec, i, x, &y, w).expect("dimensions fixed by spec"))
        .collect()
}

fn weighted_objective(spec: &LqGameSpec, map: &ReactionMap, x: &LeaderProfile, w: f64, weights: &[f64]) -> f64 {
    dot(&payoff_vector(spec, map, x, w), weights)
}

/// Exact minimizer of the weighted worst case over the uncertainty interval.
pub fn scalarized_worst_case(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    weights: &[f64],
) -> Result<WorstCaseResult> {
    validate_weights(spec, weights)?;
    let int = uncertainty_interval(spec, x)?;
    let (quad, lin) = scalar_quad_coeffs(spec, map, weights);

    let mut degenerate = false;
    let w_star = if quad > COEFF_TOL {
        int.clamp(-lin / (2.0 * quad))
    } else if quad < -COEFF_TOL {
        // Concave: the minimum sits at an endpoint; ties go to the lower one.
        let at_lo = weighted_objective(spec, map, x, int.lo, weights);
        let at_hi = weighted_objective(spec, map, x, int.hi, weights);
        if at_lo <= at_hi {
            int.lo
        } else {
            int.hi
        }
    } else if lin > COEFF_TOL {
        int.lo
    } else if lin < -COEFF_TOL {
        int.hi
    } else {
        degenerate = true;
        int.lo
    };

    let y_star = map.eval_flat(&x.flat(), w_star);
    let payoffs: Vec<f64> = (0..spec.n_leaders())
        .map(|i| eval_payoff(spec, i, x, &y_star, w_star).expect("dimensions fixed by spec"))
        .collect();
    let boundary = if (w_star - int.lo).abs() <= 1e-12 {
        Boundary::AtLo
    } else if (int.hi - w_star).abs() <= 1e-12 {
        Boundary::AtHi
    } else {
        Boundary::Interior
    };
    Ok(WorstCaseResult {
        w_star,
        y_star,
        objective: dot(&payoffs, weights),
        payoffs,
        boundary,
        degenerate,
    })
}

/// `a` dominates `b` in the minimization sense, under tolerance `tol`.
pub(crate) fn dominates(a: &[f64], b: &[f64], tol: f64) -> bool {
    let mut differs = false;
    for (p, q) in a.iter().zip(b) {
        if *p > *q + tol {
            return false;
        }
        if (*p - *q).abs() > tol {
            differs = true;
        }
    }
    differs
}

/// Samples the virtual player's objective vectors over the interval and
/// flags nondominance by pairwise comparison.
pub fn pareto_front(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    grid_n: usize,
) -> Result<Vec<ParetoPoint>> {
    if grid_n < 2 {
        return Err(Error::InvalidGrid(format!("grid_n = {grid_n}, need at least 2")));
    }
    let int = uncertainty_interval(spec, x)?;
    let samples: Vec<(f64, Vec<f64>)> = int
        .grid(grid_n)
        .into_iter()
        .map(|w| (w, payoff_vector(spec, map, x, w)))
        .collect();
    Ok(samples
        .iter()
        .map(|(w, f)| {
            let dominated = samples.iter().any(|(_, g)| dominates(g, f, NONDOMINANCE_TOL));
            ParetoPoint {
                w: *w,
                f: f.clone(),
                nondominated: !dominated,
            }
        })
        .collect())
}

/// Payoff decreases `f(x, y*, w*) - f(x, G(x,w), w)` against every grid
/// alternative, driving both membership checks.
fn membership_scan(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    w_star: f64,
    y_star: &[f64],
    grid_n: usize,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<()> {
    if grid_n < 2 {
        return Err(Error::InvalidGrid(format!("grid_n = {grid_n}, need at least 2")));
    }
    let int = uncertainty_interval(spec, x)?;
    let f_star: Vec<f64> = (0..spec.n_leaders())
        .map(|i| eval_payoff(spec, i, x, y_star, w_star))
        .collect::<Result<_>>()?;
    let mut diffs = vec![0.0; f_star.len()];
    for w in int.grid(grid_n) {
        let f = payoff_vector(spec, map, x, w);
        for (d, (s, v)) in diffs.iter_mut().zip(f_star.iter().zip(&f)) {
            *d = s - v;
        }
        visit(w, &diffs);
    }
    Ok(())
}

/// Weak Pareto membership: passes unless some alternative strictly lowers
/// every leader's payoff by more than `tol`. The witness on failure is the
/// most robustly dominating grid point.
pub fn check_weak_pareto(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    w_star: f64,
    y_star: &[f64],
    grid_n: usize,
    tol: f64,
) -> Result<ParetoCheck> {
    let mut best: Option<ParetoWitness> = None;
    let mut closest = f64::NEG_INFINITY;
    membership_scan(spec, map, x, w_star, y_star, grid_n, |w, diffs| {
        let severity = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        closest = closest.max(severity);
        if diffs.iter().all(|&d| d > tol) {
            let better = best
                .as_ref()
                .map(|b| severity > b.margins.iter().copied().fold(f64::INFINITY, f64::min))
                .unwrap_or(true);
            if better {
                best = Some(ParetoWitness {
                    w,
                    margins: diffs.to_vec(),
                });
            }
        }
    })?;
    Ok(ParetoCheck {
        pass: best.is_none(),
        margin: closest,
        witness: best,
    })
}

/// Strong (non-weak) Pareto membership: passes unless some alternative
/// lowers a leader's payoff without raising any other's. Components within
/// `tol` of zero count as unchanged. The witness is the grid point with the
/// largest payoff decrease.
pub fn check_strong_pareto(
    spec: &LqGameSpec,
    map: &ReactionMap,
    x: &LeaderProfile,
    w_star: f64,
    y_star: &[f64],
    grid_n: usize,
    tol: f64,
) -> Result<ParetoCheck> {
    let mut best: Option<ParetoWitness> = None;
    let mut closest = f64::NEG_INFINITY;
    membership_scan(spec, map, x, w_star, y_star, grid_n, |w, diffs| {
        if diffs.iter().any(|&d| d < -tol) {
            return;
        }
        let severity = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        closest = closest.max(severity);
        if severity > tol {
            let better = best
                .as_ref()
                .map(|b| severity > b.margins.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .unwrap_or(true);
            if better {
                best = Some(ParetoWitness {
                    w,
                    margins: diffs.to_vec(),
                });
            }
        }
    })?;
    Ok(ParetoCheck {
        pass: best.is_none(),
        margin: closest,
        witness: best,
    })
}
