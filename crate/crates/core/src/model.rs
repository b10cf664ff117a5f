//! Game instance data model: leaders' boxes and payoff coefficients, follower
//! LP data, and the decision-dependent uncertainty interval.
//!
//! The model is the linear-quadratic family: leader `i` maximizes
//! `a_i.x_i + b_i.y + c_i (d_i - w)^2` over a box `[box_lo, box_hi]`, and the
//! scalar uncertainty `w` lives in the interval
//! `[w_base_lo + sum_i sigma_i.x_i, w_base_hi - sum_i sigma_i.x_i]`
//! when decision dependence is enabled, or in the static base interval
//! otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval crossed by more than this is an empty uncertainty set.
pub const EMPTY_INTERVAL_TOL: f64 = 1e-12;

/// One leader: strategy box and payoff coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderSpec {
    /// Lower corner of the strategy box.
    pub box_lo: Vec<f64>,
    /// Upper corner of the strategy box.
    pub box_hi: Vec<f64>,
    /// Linear coefficient on the leader's own strategy.
    pub a: Vec<f64>,
    /// Coefficient coupling the leader's payoff to follower outputs, length m.
    pub b: Vec<f64>,
    /// Quadratic weight on the uncertainty deviation.
    pub c: f64,
    /// Uncertainty target: the payoff term is `c * (d - w)^2`.
    pub d: f64,
    /// Interval-restriction coefficient: each unit of strategy shrinks the
    /// uncertainty interval by `sigma` from both sides.
    pub sigma: Vec<f64>,
}

impl LeaderSpec {
    /// Strategy dimension of this leader.
    pub fn dim(&self) -> usize {
        self.box_lo.len()
    }
}

/// One follower: inner LP `max e.v  s.t. v_1 >= 0, g(x) + h.v = w + alpha.y_other`.
///
/// `g` holds one coupling vector per leader. `alpha` couples to the other
/// followers' outputs in index order with this follower skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FollowerSpec {
    pub e: [f64; 2],
    pub h: [f64; 2],
    pub g: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
}

/// A full game instance in the linear-quadratic family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqGameSpec {
    pub leaders: Vec<LeaderSpec>,
    pub followers: Vec<FollowerSpec>,
    /// Static base interval for the uncertainty.
    pub w_base_lo: f64,
    pub w_base_hi: f64,
    /// When false the interval is the static base set for every profile.
    pub ddu_enabled: bool,
}

impl LqGameSpec {
    pub fn n_leaders(&self) -> usize {
        self.leaders.len()
    }

    pub fn n_followers(&self) -> usize {
        self.followers.len()
    }

    /// Total strategy dimension over all leaders.
    pub fn strategy_dim(&self) -> usize {
        self.leaders.iter().map(LeaderSpec::dim).sum()
    }

    /// Offset of each leader's block in the concatenated strategy vector.
    pub fn leader_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.leaders.len());
        let mut acc = 0;
        for l in &self.leaders {
            offs.push(acc);
            acc += l.dim();
        }
        offs
    }

    /// Copy of this spec with decision dependence switched on or off.
    pub fn with_ddu(&self, enabled: bool) -> LqGameSpec {
        let mut spec = self.clone();
        spec.ddu_enabled = enabled;
        spec
    }

    /// Checks every structural invariant, reporting the offending field path.
    pub fn validate(&self) -> Result<()> {
        if self.leaders.is_empty() {
            return Err(Error::InvalidValue {
                path: "leaders".into(),
                message: "at least one leader is required".into(),
            });
        }
        if self.followers.is_empty() {
            return Err(Error::InvalidValue {
                path: "followers".into(),
                message: "at least one follower is required".into(),
            });
        }
        let n = self.n_leaders();
        let m = self.n_followers();
        for (i, l) in self.leaders.iter().enumerate() {
            let p = l.box_lo.len();
            if p == 0 {
                return Err(Error::InvalidValue {
                    path: format!("leaders[{i}].box_lo"),
                    message: "strategy dimension must be at least 1".into(),
                });
            }
            for (name, len) in [("box_hi", l.box_hi.len()), ("a", l.a.len()), ("sigma", l.sigma.len())] {
                if len != p {
                    return Err(Error::DimensionMismatch {
                        path: format!("leaders[{i}].{name}"),
                        message: format!("expected length {p} (the leader's strategy dimension), got {len}"),
                    });
                }
            }
            if l.b.len() != m {
                return Err(Error::DimensionMismatch {
                    path: format!("leaders[{i}].b"),
                    message: format!("expected length {m} (one entry per follower), got {}", l.b.len()),
                });
            }
            for k in 0..p {
                if l.box_lo[k] > l.box_hi[k] {
                    return Err(Error::InvalidValue {
                        path: format!("leaders[{i}].box_lo[{k}]"),
                        message: format!("box_lo = {} exceeds box_hi = {}", l.box_lo[k], l.box_hi[k]),
                    });
                }
            }
            let finite = l.box_lo.iter().chain(&l.box_hi).chain(&l.a).chain(&l.b).chain(&l.sigma).all(|v| v.is_finite())
                && l.c.is_finite()
                && l.d.is_finite();
            if !finite {
                return Err(Error::InvalidValue {
                    path: format!("leaders[{i}]"),
                    message: "all coefficients must be finite".into(),
                });
            }
        }
        for (j, f) in self.followers.iter().enumerate() {
            if f.g.len() != n {
                return Err(Error::DimensionMismatch {
                    path: format!("followers[{j}].g"),
                    message: format!("expected {n} coupling vectors (one per leader), got {}", f.g.len()),
                });
            }
            for (i, gi) in f.g.iter().enumerate() {
                let p = self.leaders[i].dim();
                if gi.len() != p {
                    return Err(Error::DimensionMismatch {
                        path: format!("followers[{j}].g[{i}]"),
                        message: format!("expected length {p} (leader {i} strategy dimension), got {}", gi.len()),
                    });
                }
            }
            if f.alpha.len() != m - 1 {
                return Err(Error::DimensionMismatch {
                    path: format!("followers[{j}].alpha"),
                    message: format!("expected length {} (one entry per other follower), got {}", m - 1, f.alpha.len()),
                });
            }
            let finite = f.e.iter().chain(&f.h).chain(f.alpha.iter()).all(|v| v.is_finite())
                && f.g.iter().flatten().all(|v| v.is_finite());
            if !finite {
                return Err(Error::InvalidValue {
                    path: format!("followers[{j}]"),
                    message: "all coefficients must be finite".into(),
                });
            }
        }
        if !(self.w_base_lo.is_finite() && self.w_base_hi.is_finite()) {
            return Err(Error::InvalidValue {
                path: "uncertainty".into(),
                message: "interval bounds must be finite".into(),
            });
        }
        if self.w_base_lo > self.w_base_hi {
            return Err(Error::InvalidValue {
                path: "uncertainty.lo".into(),
                message: format!("lo = {} exceeds hi = {}", self.w_base_lo, self.w_base_hi),
            });
        }
        Ok(())
    }
}

/// A joint strategy of all leaders, one block per leader.
///
/// Profiles are allowed to be infeasible so that verification workflows can
/// inspect out-of-box candidates; feasibility is an explicit check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderProfile {
    pub x: Vec<Vec<f64>>,
}

impl LeaderProfile {
    pub fn new(x: Vec<Vec<f64>>) -> Self {
        LeaderProfile { x }
    }

    /// All-zeros profile with the spec's block structure.
    pub fn zeros(spec: &LqGameSpec) -> Self {
        LeaderProfile {
            x: spec.leaders.iter().map(|l| vec![0.0; l.dim()]).collect(),
        }
    }

    /// Rebuilds a profile from a concatenated strategy vector.
    pub fn from_flat(spec: &LqGameSpec, flat: &[f64]) -> Result<Self> {
        if flat.len() != spec.strategy_dim() {
            return Err(Error::DimensionMismatch {
                path: "profile".into(),
                message: format!("expected {} components, got {}", spec.strategy_dim(), flat.len()),
            });
        }
        let mut x = Vec::with_capacity(spec.n_leaders());
        let mut pos = 0;
        for l in &spec.leaders {
            x.push(flat[pos..pos + l.dim()].to_vec());
            pos += l.dim();
        }
        Ok(LeaderProfile { x })
    }

    /// Concatenation of all blocks.
    pub fn flat(&self) -> Vec<f64> {
        self.x.iter().flatten().copied().collect()
    }

    pub fn dims_match(&self, spec: &LqGameSpec) -> bool {
        self.x.len() == spec.n_leaders()
            && self.x.iter().zip(&spec.leaders).all(|(xi, l)| xi.len() == l.dim())
    }
}

/// A closed interval for the uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, w: f64, tol: f64) -> bool {
        w >= self.lo - tol && w <= self.hi + tol
    }

    pub fn clamp(&self, w: f64) -> f64 {
        w.max(self.lo).min(self.hi)
    }

    /// Uniform grid over the interval, endpoints included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two points");
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|k| if k == n - 1 { self.hi } else { self.lo + k as f64 * step })
            .collect()
    }
}

/// Componentwise box membership of one leader's block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderFeasibility {
    pub leader: usize,
    /// Per-coordinate membership flags.
    pub inside: Vec<bool>,
    /// Largest box violation over the block, zero when feasible.
    pub worst_violation: f64,
}

impl LeaderFeasibility {
    pub fn feasible(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }
}

/// Feasibility of a full profile, one entry per leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub per_leader: Vec<LeaderFeasibility>,
}

impl FeasibilityReport {
    pub fn all_feasible(&self) -> bool {
        self.per_leader.iter().all(LeaderFeasibility::feasible)
    }

    pub fn worst_violation(&self) -> f64 {
        self.per_leader
            .iter()
            .map(|l| l.worst_violation)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Payoff of leader `i` at a joint state: `a_i.x_i + b_i.y + c_i (d_i - w)^2`.
pub fn eval_payoff(spec: &LqGameSpec, i: usize, x: &LeaderProfile, y: &[f64], w: f64) -> Result<f64> {
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
    if y.len() != spec.n_followers() {
        return Err(Error::DimensionMismatch {
            path: "y".into(),
            message: format!("expected {} follower outputs, got {}", spec.n_followers(), y.len()),
        });
    }
    let l = &spec.leaders[i];
    let dev = l.d - w;
    Ok(dot(&l.a, &x.x[i]) + dot(&l.b, y) + l.c * dev * dev)
}

/// Total interval shrink induced by a profile.
pub(crate) fn sigma_shrink(spec: &LqGameSpec, x: &LeaderProfile) -> f64 {
    spec.leaders
        .iter()
        .zip(&x.x)
        .map(|(l, xi)| dot(&l.sigma, xi))
        .sum()
}

/// Decision-dependent uncertainty interval at a profile.
///
/// With decision dependence off this is the static base interval for every
/// profile. A crossing within [`EMPTY_INTERVAL_TOL`] collapses to a point so
/// that `lo <= hi` holds on success; anything beyond is an empty-set error.
pub fn uncertainty_interval(spec: &LqGameSpec, x: &LeaderProfile) -> Result<Interval> {
    if !spec.ddu_enabled {
        return Ok(Interval {
            lo: spec.w_base_lo,
            hi: spec.w_base_hi,
        });
    }
    let shrink = sigma_shrink(spec, x);
    let lo = spec.w_base_lo + shrink;
    let hi = spec.w_base_hi - shrink;
    if lo > hi + EMPTY_INTERVAL_TOL {
        return Err(Error::EmptyUncertaintySet { lo, hi });
    }
    if lo > hi {
        let mid = 0.5 * (lo + hi);
        return Ok(Interval { lo: mid, hi: mid });
    }
    Ok(Interval { lo, hi })
}

/// Componentwise box membership per leader, with violation magnitudes.
pub fn check_profile_feasible(spec: &LqGameSpec, x: &LeaderProfile) -> FeasibilityReport {
    let per_leader = spec
        .leaders
        .iter()
        .zip(&x.x)
        .enumerate()
        .map(|(i, (l, xi))| {
            let mut inside = Vec::with_capacity(xi.len());
            let mut worst = 0.0f64;
            for (k, &v) in xi.iter().enumerate() {
                let viol = (l.box_lo[k] - v).max(v - l.box_hi[k]).max(0.0);
                inside.push(viol == 0.0);
                worst = worst.max(viol);
            }
            LeaderFeasibility {
                leader: i,
                inside,
                worst_violation: worst,
            }
        })
        .collect();
    FeasibilityReport { per_leader }
}
