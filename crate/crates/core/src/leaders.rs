//! Leader best responses and grid verification of leader optimality.
//!
//! Two best-response modes are provided. The myopic mode holds the
//! uncertainty fixed; after substituting the affine reaction map the
//! objective is affine in the leader's own block, so the optimum is read off
//! coordinatewise from the sign of the reduced coefficient. The anticipating
//! mode re-solves the virtual player's worst case for every candidate
//! strategy, capturing the payoff effect of shrinking the uncertainty
//! interval; it searches the box-corner lattice and refines each coordinate
//! over the pieces of the clamped (piecewise quadratic) objective.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::followers::ReactionMap;
use crate::model::{dot, eval_payoff, LeaderProfile, LeaderSpec, LqGameSpec};
use crate::worstcase::{scalar_quad_coeffs, scalarized_worst_case, validate_weights};

/// Coefficients no larger than this count as payoff-flat.
const FLAT_TOL: f64 = 1e-12;
/// Value ties within this are resolved by the tie-break policy.
const TIE_TOL: f64 = 1e-12;
/// An interior refinement candidate must beat the incumbent by this much.
const REFINE_TOL: f64 = 1e-9;

/// Which leader subproblem a best response solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrMode {
    /// Uncertainty held fixed at the supplied value.
    Myopic,
    /// Worst case re-solved for every candidate strategy.
    Anticipating,
}

impl std::fmt::Display for BrMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BrMode::Myopic => "myopic",
            BrMode::Anticipating => "anticipating",
        })
    }
}

/// Resolution policy for payoff-flat coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tiebreak {
    /// Lower box endpoint (lexicographically smallest profile).
    LexLow,
    /// Maximize the interval shrink `sigma . x_i`.
    PreferRestrict,
    /// Minimize the interval shrink.
    PreferRelax,
}

impl std::fmt::Display for Tiebreak {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tiebreak::LexLow => "lex-low",
            Tiebreak::PreferRestrict => "prefer-restrict",
            Tiebreak::PreferRelax => "prefer-relax",
        })
    }
}

/// Search strategy for the anticipating mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrRefine {
    /// Corner lattice plus per-coordinate piecewise refinement (default).
    Lattice,
    /// Dense product grid, for audit runs.
    DenseGrid,
}

/// Knobs for the anticipating search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrOptions {
    pub refine: BrRefine,
    /// Points per coordinate when `refine` is the dense grid.
    pub dense_grid_points: usize,
}

impl Default for BrOptions {
    fn default() -> Self {
        BrOptions {
            refine: BrRefine::Lattice,
            dense_grid_points: 101,
        }
    }
}

/// A leader's best response together with its anticipation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseResult {
    pub x_i: Vec<f64>,
    /// Followers' response anticipated at the chosen strategy.
    pub y_anticipated: Vec<f64>,
    pub value: f64,
    /// Uncertainty value the payoff was evaluated at: the input in myopic
    /// mode, the inner minimizer in anticipating mode.
    pub w_used: f64,
    /// Coordinates where the payoff was flat.
    pub tie_coordinates: BTreeSet<usize>,
    pub mode: BrMode,
}

fn require_rivals_feasible(spec: &LqGameSpec, i: usize, x: &LeaderProfile) -> Result<()> {
    for (j, (l, xj)) in spec.leaders.iter().zip(&x.x).enumerate() {
        if j == i {
            continue;
        }
        for (k, &v) in xj.iter().enumerate() {
            let viol = (l.box_lo[k] - v).max(v - l.box_hi[k]);
            if viol > 1e-9 {
                return Err(Error::InfeasibleProfile {
                    leader: j,
                    violation: viol,
                });
            }
        }
    }
    Ok(())
}

fn tiebreak_endpoint(l: &LeaderSpec, k: usize, tiebreak: Tiebreak) -> f64 {
    match tiebreak {
        Tiebreak::LexLow => l.box_lo[k],
        Tiebreak::PreferRestrict if l.sigma[k] > 0.0 => l.box_hi[k],
        Tiebreak::PreferRestrict if l.sigma[k] < 0.0 => l.box_lo[k],
        Tiebreak::PreferRelax if l.sigma[k] < 0.0 => l.box_hi[k],
        _ => l.box_lo[k],
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (p, q) in a.iter().zip(b) {
        if p < q {
            return true;
        }
        if p > q {
            return false;
        }
    }
    false
}

/// Picks one strategy out of value-tied candidates according to the policy.
fn select_tied(mut tied: Vec<Vec<f64>>, l: &LeaderSpec, tiebreak: Tiebreak) -> Vec<f64> {
    debug_assert!(!tied.is_empty());
    match tiebreak {
        Tiebreak::LexLow => {}
        Tiebreak::PreferRestrict | Tiebreak::PreferRelax => {
            let score = |xi: &[f64]| dot(&l.sigma, xi);
            let best = tied
                .iter()
                .map(|xi| score(xi))
                .fold(f64::NEG_INFINITY, |acc, s| {
                    let s = if tiebreak == Tiebreak::PreferRelax { -s } else { s };
                    acc.max(s)
                });
            tied.retain(|xi| {
                let s = score(xi);
                let s = if tiebreak == Tiebreak::PreferRelax { -s } else { s };
                (s - best).abs() <= TIE_TOL
            });
        }
    }
    tied.into_iter()
        .reduce(|acc, xi| if lex_less(&xi, &acc) { xi } else { acc })
        .unwrap()
}

fn myopic_best_response(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    w: f64,
    tiebreak: Tiebreak,
) -> Result<BestResponseResult> {
    let l = &spec.leaders[i];
    let off = spec.leader_offsets()[i];
    let p = l.dim();

    // Reduced coefficient of the leader's own block after substituting the
    // reaction map: a_k + sum_j b_j A[j][off + k].
    let mut ties = BTreeSet::new();
    let mut x_i = Vec::with_capacity(p);
    for k in 0..p {
        let coupled: f64 = l.b.iter().zip(&map.a).map(|(bj, row)| bj * row[off + k]).sum();
        let r = l.a[k] + coupled;
        if r > FLAT_TOL {
            x_i.push(l.box_hi[k]);
        } else if r < -FLAT_TOL {
            x_i.push(l.box_lo[k]);
        } else {
            ties.insert(k);
            x_i.push(tiebreak_endpoint(l, k, tiebreak));
        }
    }

    let mut chosen = x.clone();
    chosen.x[i] = x_i.clone();
    let y = map.eval_flat(&chosen.flat(), w);
    let value = eval_payoff(spec, i, &chosen, &y, w)?;
    Ok(BestResponseResult {
        x_i,
        y_anticipated: y,
        value,
        w_used: w,
        tie_coordinates: ties,
        mode: BrMode::Myopic,
    })
}

/// Evaluates the anticipating objective at one candidate block. `None`
/// means the candidate empties the uncertainty set and is discarded.
fn anticipating_value(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    x_i: &[f64],
    weights: &[f64],
) -> Result<Option<(f64, f64)>> {
    let mut cand = x.clone();
    cand.x[i] = x_i.to_vec();
    match scalarized_worst_case(spec, map, &cand, weights) {
        Ok(wc) => {
            let value = eval_payoff(spec, i, &cand, &wc.y_star, wc.w_star)?;
            Ok(Some((value, wc.w_star)))
        }
        Err(Error::EmptyUncertaintySet { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Breakpoints of the clamped inner minimizer along one coordinate: points
/// where the interval degenerates and where the unconstrained stationary
/// point crosses an interval endpoint. Between consecutive breakpoints the
/// anticipating objective is one smooth quadratic.
fn coordinate_breakpoints(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    k: usize,
    x: &LeaderProfile,
    x_i: &[f64],
    weights: &[f64],
) -> Vec<f64> {
    let l = &spec.leaders[i];
    let sigma_k = l.sigma[k];
    if !spec.ddu_enabled || sigma_k == 0.0 {
        return Vec::new();
    }
    // Interval shrink contributed by everything except coordinate (i, k).
    let mut shrink_other = 0.0;
    for (j, (lj, xj)) in spec.leaders.iter().zip(&x.x).enumerate() {
        let block: &[f64] = if j == i { x_i } else { xj };
        for (kk, &v) in block.iter().enumerate() {
            if j == i && kk == k {
                continue;
            }
            shrink_other += lj.sigma[kk] * v;
        }
    }
    let (lo_k, hi_k) = (l.box_lo[k], l.box_hi[k]);
    let mut out = Vec::new();
    let mut push = |t: f64| {
        if t.is_finite() && t > lo_k && t < hi_k {
            out.push(t);
        }
    };
    // Interval width hits zero.
    push((spec.w_base_hi - spec.w_base_lo - 2.0 * shrink_other) / (2.0 * sigma_k));
    let (quad, lin) = scalar_quad_coeffs(spec, map, weights);
    if quad > FLAT_TOL {
        let w_inf = -lin / (2.0 * quad);
        // Stationary point meets the moving endpoints.
        push((w_inf - spec.w_base_lo - shrink_other) / sigma_k);
        push((spec.w_base_hi - shrink_other - w_inf) / sigma_k);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    out
}

/// Golden-section maximum of a unimodal-on-piece objective. Returns `None`
/// if the objective is undefined anywhere it is probed.
fn golden_max(phi: &mut impl FnMut(f64) -> Option<f64>, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if !(b - a).is_finite() || b <= a {
        return None;
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    for _ in 0..72 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d)?;
        }
    }
    let t = 0.5 * (a + b);
    phi(t).map(|v| (t, v))
}

fn anticipating_best_response(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    weights: &[f64],
    tiebreak: Tiebreak,
    opts: &BrOptions,
) -> Result<BestResponseResult> {
    let l = &spec.leaders[i];
    let p = l.dim();

    // Candidate strategies with their values, from the configured search.
    let candidates: Vec<(Vec<f64>, f64)> = match opts.refine {
        BrRefine::Lattice => {
            if p > 20 {
                return Err(Error::SearchSpaceTooLarge(format!(
                    "corner lattice has 2^{p} points"
                )));
            }
            let mut out = Vec::with_capacity(1 << p);
            for mask in 0u64..(1u64 << p) {
                let xi: Vec<f64> = (0..p)
                    .map(|k| if mask >> k & 1 == 1 { l.box_hi[k] } else { l.box_lo[k] })
                    .collect();
                if let Some((v, _)) = anticipating_value(spec, map, i, x, &xi, weights)? {
                    out.push((xi, v));
                }
            }
            out
        }
        BrRefine::DenseGrid => {
            let g = opts.dense_grid_points.max(2);
            let total = (g as f64).powi(p as i32);
            if total > 1e7 {
                return Err(Error::SearchSpaceTooLarge(format!(
                    "dense grid has {g}^{p} points"
                )));
            }
            let mut out = Vec::new();
            let mut idx = vec![0usize; p];
            loop {
                let xi: Vec<f64> = (0..p)
                    .map(|k| {
                        let frac = idx[k] as f64 / (g - 1) as f64;
                        l.box_lo[k] + frac * (l.box_hi[k] - l.box_lo[k])
                    })
                    .collect();
                if let Some((v, _)) = anticipating_value(spec, map, i, x, &xi, weights)? {
                    out.push((xi, v));
                }
                let mut k = 0;
                loop {
                    if k == p {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < g {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == p {
                    break;
                }
            }
            out
        }
    };
    if candidates.is_empty() {
        return Err(Error::AllCandidatesInfeasible { leader: i });
    }

    let mut best_value = candidates
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<Vec<f64>> = candidates
        .iter()
        .filter(|(_, v)| best_value - *v <= TIE_TOL)
        .map(|(xi, _)| xi.clone())
        .collect();
    let mut chosen = select_tied(tied, l, tiebreak);

    // One refinement pass per coordinate over the smooth pieces of the
    // clamped objective (lattice search only; the dense grid stands alone).
    if opts.refine == BrRefine::Lattice {
        for k in 0..p {
            let (lo_k, hi_k) = (l.box_lo[k], l.box_hi[k]);
            if hi_k - lo_k <= 1e-12 {
                continue;
            }
            let breaks = coordinate_breakpoints(spec, map, i, k, x, &chosen, weights);
            let mut knots = Vec::with_capacity(breaks.len() + 2);
            knots.push(lo_k);
            knots.extend(breaks);
            knots.push(hi_k);

            let mut improved: Option<(f64, f64)> = None;
            let consider = |t: f64, v: f64, improved: &mut Option<(f64, f64)>| {
                if improved.as_ref().map(|(_, bv)| v > *bv).unwrap_or(true) {
                    *improved = Some((t, v));
                }
            };
            let mut scratch = chosen.clone();
            for &t in &knots {
                scratch[k] = t;
                if let Some((v, _)) = anticipating_value(spec, map, i, x, &scratch, weights)? {
                    consider(t, v, &mut improved);
                }
            }
            for pair in knots.windows(2) {
                let mut probe = |t: f64| {
                    let mut xi = chosen.clone();
                    xi[k] = t;
                    anticipating_value(spec, map, i, x, &xi, weights)
                        .ok()
                        .flatten()
                        .map(|(v, _)| v)
                };
                if let Some((t, v)) = golden_max(&mut probe, pair[0], pair[1]) {
                    consider(t, v, &mut improved);
                }
            }
            if let Some((t, v)) = improved {
                if v > best_value + REFINE_TOL {
                    chosen[k] = t;
                    best_value = v;
                }
            }
        }
    }

    let (value, w_used) = anticipating_value(spec, map, i, x, &chosen, weights)?
        .ok_or(Error::AllCandidatesInfeasible { leader: i })?;

    // A coordinate is flat when swapping it to either box endpoint leaves
    // the anticipated value unchanged.
    let mut ties = BTreeSet::new();
    for k in 0..p {
        if l.box_hi[k] - l.box_lo[k] <= 1e-12 {
            continue;
        }
        let mut flat = true;
        for endpoint in [l.box_lo[k], l.box_hi[k]] {
            let mut xi = chosen.clone();
            xi[k] = endpoint;
            match anticipating_value(spec, map, i, x, &xi, weights)? {
                Some((v, _)) if (v - value).abs() <= TIE_TOL => {}
                _ => {
                    flat = false;
                    break;
                }
            }
        }
        if flat {
            ties.insert(k);
        }
    }

    let mut final_profile = x.clone();
    final_profile.x[i] = chosen.clone();
    let y = map.eval_flat(&final_profile.flat(), w_used);
    Ok(BestResponseResult {
        x_i: chosen,
        y_anticipated: y,
        value,
        w_used,
        tie_coordinates: ties,
        mode: BrMode::Anticipating,
    })
}

/// Best response of leader `i` against the other blocks of `x`.
///
/// In myopic mode the supplied `w` is held fixed and `weights` are unused;
/// in anticipating mode `w` is ignored and the inner worst case is solved
/// with `weights` for every candidate.
pub fn leader_best_response(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    w: f64,
    mode: BrMode,
    weights: &[f64],
    tiebreak: Tiebreak,
) -> Result<BestResponseResult> {
    leader_best_response_with(spec, map, i, x, w, mode, weights, tiebreak, &BrOptions::default())
}

/// [`leader_best_response`] with explicit search options.
#[allow(clippy::too_many_arguments)]
pub fn leader_best_response_with(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    w: f64,
    mode: BrMode,
    weights: &[f64],
    tiebreak: Tiebreak,
    opts: &BrOptions,
) -> Result<BestResponseResult> {
    let n = spec.n_leaders();
    if i >= n {
        return Err(Error::LeaderIndexOutOfRange { index: i, n });
    }
    if !x.dims_match(spec) {
        return Err(Error::DimensionMismatch {
            path: "profile".into(),
            message: "profile blocks do not match the spec".into(),
        });
    }
    require_rivals_feasible(spec, i, x)?;
    match mode {
        BrMode::Myopic => myopic_best_response(spec, map, i, x, w, tiebreak),
        BrMode::Anticipating => {
            validate_weights(spec, weights)?;
            anticipating_best_response(spec, map, i, x, weights, tiebreak, opts)
        }
    }
}

/// Outcome of the leader-optimality grid check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderOptimality {
    pub pass: bool,
    /// Largest payoff improvement found on the grid (may be negative).
    pub margin: f64,
    /// Improving strategy, present on failure.
    pub witness: Option<Vec<f64>>,
}

/// Grid search over leader `i`'s box with `w` fixed: passes when no
/// candidate improves the payoff by more than `tol`.
pub fn check_leader_optimality(
    spec: &LqGameSpec,
    map: &ReactionMap,
    i: usize,
    x: &LeaderProfile,
    w: f64,
    grid_n: usize,
    tol: f64,
) -> Result<LeaderOptimality> {
    let n = spec.n_leaders();
    if i >= n {
        return Err(Error::LeaderIndexOutOfRange { index: i, n });
    }
    if grid_n < 2 {
        return Err(Error::InvalidGrid(format!("grid_n = {grid_n}, need at least 2")));
    }
    let l = &spec.leaders[i];
    let p = l.dim();
    if (grid_n as f64).powi(p as i32) > 2e7 {
        return Err(Error::SearchSpaceTooLarge(format!(
            "leader grid has {grid_n}^{p} points"
        )));
    }

    let y0 = map.eval_flat(&x.flat(), w);
    let base = eval_payoff(spec, i, x, &y0, w)?;

    let mut cand = x.clone();
    let mut best_improvement = f64::NEG_INFINITY;
    let mut witness = None;
    let mut idx = vec![0usize; p];
    loop {
        for k in 0..p {
            let frac = idx[k] as f64 / (grid_n - 1) as f64;
            cand.x[i][k] = l.box_lo[k] + frac * (l.box_hi[k] - l.box_lo[k]);
        }
        let y = map.eval_flat(&cand.flat(), w);
        let value = eval_payoff(spec, i, &cand, &y, w)?;
        let improvement = value - base;
        if improvement > best_improvement {
            best_improvement = improvement;
            if improvement > tol {
                witness = Some(cand.x[i].clone());
            }
        }
        let mut k = 0;
        loop {
            if k == p {
                break;
            }
            idx[k] += 1;
            if idx[k] < grid_n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == p {
            break;
        }
    }
    Ok(LeaderOptimality {
        pass: best_improvement <= tol,
        margin: best_improvement,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::followers::build_reaction_map;
    use crate::scenario::paper_sec5;

    fn profile(a: [f64; 2], b: [f64; 2]) -> LeaderProfile {
        LeaderProfile::new(vec![a.to_vec(), b.to_vec()])
    }

    fn setup() -> (LqGameSpec, ReactionMap) {
        let spec = paper_sec5();
        let map = build_reaction_map(&spec).unwrap();
        (spec, map)
    }

    #[test]
    fn myopic_reduced_coefficients_and_tie() {
        let (spec, map) = setup();
        let x = profile([0.5, 0.5], [1.0, 1.0]);
        let br = leader_best_response(&spec, &map, 0, &x, 2.0, BrMode::Myopic, &[0.2, 0.8], Tiebreak::LexLow)
            .unwrap();
        // Reduced coefficient on the first coordinate is 1.3 - 4.8 = -3.5;
        // the second is exactly flat.
        assert_eq!(br.x_i, vec![0.0, 0.0]);
        assert_eq!(br.tie_coordinates, BTreeSet::from([1]));
        assert!((br.value - 4.8).abs() < 1e-12);
        assert_eq!(br.w_used, 2.0);
    }

    #[test]
    fn myopic_tiebreak_policies_move_flat_coordinates() {
        let (spec, map) = setup();
        let x = profile([0.0, 0.0], [1.0, 1.0]);
        let restrict =
            leader_best_response(&spec, &map, 0, &x, 2.0, BrMode::Myopic, &[0.2, 0.8], Tiebreak::PreferRestrict)
                .unwrap();
        assert_eq!(restrict.x_i, vec![0.0, 1.0]);
        assert!((restrict.value - 4.8).abs() < 1e-12);
        let relax =
            leader_best_response(&spec, &map, 0, &x, 2.0, BrMode::Myopic, &[0.2, 0.8], Tiebreak::PreferRelax)
                .unwrap();
        assert_eq!(relax.x_i, vec![0.0, 0.0]);
    }

    #[test]
    fn anticipating_first_leader_keeps_the_interval_wide() {
        let (spec, map) = setup();
        let x = profile([0.5, 0.5], [1.0, 1.0]);
        let br = leader_best_response(
            &spec,
            &map,
            0,
            &x,
            f64::NAN,
            BrMode::Anticipating,
            &[0.2, 0.8],
            Tiebreak::LexLow,
        )
        .unwrap();
        // Restricting with the second coordinate would collapse the interval
        // to the point 0 and drop the value to -4.
        assert_eq!(br.x_i, vec![0.0, 0.0]);
        assert!((br.value - 4.8).abs() < 1e-12);
        assert!(br.tie_coordinates.is_empty());
        assert!((br.w_used - 2.0).abs() < 1e-12);
    }

    #[test]
    fn anticipating_second_leader_restricts() {
        let (spec, map) = setup();
        let x = profile([0.0, 0.0], [0.5, 0.5]);
        let br = leader_best_response(
            &spec,
            &map,
            1,
            &x,
            f64::NAN,
            BrMode::Anticipating,
            &[0.2, 0.8],
            Tiebreak::LexLow,
        )
        .unwrap();
        assert_eq!(br.x_i, vec![1.0, 1.0]);
        assert!((br.value - (-0.3)).abs() < 1e-12);
        // Not restricting would leave the inner minimizer at 2.8 and the
        // value at -1.452.
        let alt = anticipating_value(&spec, &map, 1, &x, &[1.0, 0.0], &[0.2, 0.8])
            .unwrap()
            .unwrap();
        assert!((alt.0 - (-1.452)).abs() < 1e-12);
        assert!((alt.1 - 2.8).abs() < 1e-12);
    }

    #[test]
    fn anticipating_flat_coordinate_follows_tiebreak() {
        let (spec, map) = setup();
        // At lambda = 0.35 the inner minimizer stays interior for every
        // second-coordinate choice, so leader 2 is indifferent.
        let x = profile([0.0, 0.0], [0.0, 0.0]);
        let br = leader_best_response(
            &spec,
            &map,
            1,
            &x,
            f64::NAN,
            BrMode::Anticipating,
            &[0.35, 0.65],
            Tiebreak::LexLow,
        )
        .unwrap();
        assert_eq!(br.x_i, vec![1.0, 0.0]);
        assert_eq!(br.tie_coordinates, BTreeSet::from([1]));
        let br = leader_best_response(
            &spec,
            &map,
            1,
            &x,
            f64::NAN,
            BrMode::Anticipating,
            &[0.35, 0.65],
            Tiebreak::PreferRestrict,
        )
        .unwrap();
        assert_eq!(br.x_i, vec![1.0, 1.0]);
    }

    #[test]
    fn dense_grid_agrees_with_lattice_on_reference() {
        let (spec, map) = setup();
        let x = profile([0.0, 0.0], [0.5, 0.5]);
        let opts = BrOptions {
            refine: BrRefine::DenseGrid,
            dense_grid_points: 41,
        };
        let dense = leader_best_response_with(
            &spec,
            &map,
            1,
            &x,
            f64::NAN,
            BrMode::Anticipating,
            &[0.2, 0.8],
            Tiebreak::LexLow,
            &opts,
        )
        .unwrap();
        assert_eq!(dense.x_i, vec![1.0, 1.0]);
        assert!((dense.value - (-0.3)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_rivals_rejected() {
        let (spec, map) = setup();
        let x = profile([0.0, 0.0], [2.0, 0.0]);
        let err = leader_best_response(&spec, &map, 0, &x, 2.0, BrMode::Myopic, &[0.2, 0.8], Tiebreak::LexLow)
            .unwrap_err();
        assert!(matches!(err, Error::InfeasibleProfile { leader: 1, .. }));
    }

    #[test]
    fn optimality_check_passes_at_reference_equilibrium() {
        let (spec, map) = setup();
        let x = profile([0.0, 0.0], [1.0, 1.0]);
        for i in 0..2 {
            let check = check_leader_optimality(&spec, &map, i, &x, 2.0, 101, 1e-9).unwrap();
            assert!(check.pass, "leader {i} margin {}", check.margin);
        }
    }

    #[test]
    fn optimality_check_finds_the_reference_witness() {
        let (spec, map) = setup();
        let x = profile([1.0, 0.0], [1.0, 1.0]);
        let check = check_leader_optimality(&spec, &map, 0, &x, 2.0, 101, 1e-9).unwrap();
        assert!(!check.pass);
        assert!((check.margin - 3.5).abs() < 1e-9);
        let wit = check.witness.unwrap();
        assert!(wit[0].abs() < 1e-12);
    }
}
