//! Followers' equilibrium layer: closed-form construction of the reaction map
//! and independent per-follower best-response verification.
//!
//! Each follower's inner LP reduces to an affine best response
//! `y_j = theta_j (w + sum_{l != j} alpha_{j,l} y_l - gamma_j(x))` with gain
//! `theta_j = e_2 / h_2`. Stacking the best responses gives the linear system
//! `(I - T) y = diag(theta) (w 1 - gamma(x))`, solved symbolically in `(x, w)`
//! so the joint reaction map comes out affine. Iterating the best responses
//! instead can diverge (the reference instance has per-follower gain 2), so
//! the direct solve is the only construction route offered.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dot, LeaderProfile, LqGameSpec};

/// How a reaction map came to be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Solved symbolically from the follower LP data.
    Analytic,
    /// Analytic and additionally confirmed by a best-response sweep.
    Verified,
}

/// Affine representation of the followers' joint equilibrium:
/// `y(x, w) = A x + b w + c0` over the concatenated leader strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionMap {
    /// Sensitivity of each follower output to the leader strategies, one row
    /// per follower.
    pub a: Vec<Vec<f64>>,
    /// Sensitivity to the uncertainty.
    pub b: Vec<f64>,
    /// Constant term.
    pub c0: Vec<f64>,
    /// Per-follower best-response gain.
    pub theta: Vec<f64>,
    pub provenance: Provenance,
}

impl ReactionMap {
    pub fn n_followers(&self) -> usize {
        self.b.len()
    }

    /// Evaluates the map on a concatenated strategy vector.
    pub fn eval_flat(&self, flat: &[f64], w: f64) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .zip(&self.c0)
            .map(|((row, bj), cj)| dot(row, flat) + bj * w + cj)
            .collect()
    }

    pub fn mark_verified(&mut self) {
        self.provenance = Provenance::Verified;
    }
}

/// Coupling coefficient of follower `j` on follower `l`'s output.
fn alpha_of(spec: &LqGameSpec, j: usize, l: usize) -> f64 {
    debug_assert_ne!(j, l);
    let idx = if l < j { l } else { l - 1 };
    spec.followers[j].alpha[idx]
}

/// Checks that follower `j`'s inner LP has the closed-form optimum at the
/// constrained corner and returns its gain.
fn follower_gain(spec: &LqGameSpec, j: usize) -> Result<f64> {
    let f = &spec.followers[j];
    if f.h[1] == 0.0 {
        return Err(Error::IllPosedFollower { follower: j });
    }
    // Reduced cost of the sign-constrained direction after eliminating the
    // free one; strictly positive means the LP is unbounded above.
    let reduced = f.e[0] - f.e[1] * f.h[0] / f.h[1];
    if reduced > 1e-12 {
        return Err(Error::UnboundedFollower {
            follower: j,
            coeff: reduced,
        });
    }
    Ok(f.e[1] / f.h[1])
}

/// Leader-coupling term `gamma_j(x)` of follower `j`.
fn gamma(spec: &LqGameSpec, j: usize, x: &LeaderProfile) -> f64 {
    spec.followers[j]
        .g
        .iter()
        .zip(&x.x)
        .map(|(gi, xi)| dot(gi, xi))
        .sum()
}

/// Solves the coupled best-response system symbolically in `(x, w)`.
pub fn build_reaction_map(spec: &LqGameSpec) -> Result<ReactionMap> {
    let m = spec.n_followers();
    let dim = spec.strategy_dim();
    let offsets = spec.leader_offsets();

    let mut theta = Vec::with_capacity(m);
    for j in 0..m {
        theta.push(follower_gain(spec, j)?);
    }

    // M = I - T with T_{j,l} = theta_j alpha_{j,l} off the diagonal.
    let coupling = DMatrix::from_fn(m, m, |j, l| {
        if j == l {
            1.0
        } else {
            -theta[j] * alpha_of(spec, j, l)
        }
    });
    let det = coupling.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::SingularFollowerSystem { det });
    }

    // Right-hand side columns: the x coordinates followed by w.
    let mut rhs = DMatrix::zeros(m, dim + 1);
    for j in 0..m {
        for (i, gi) in spec.followers[j].g.iter().enumerate() {
            for (k, gk) in gi.iter().enumerate() {
                rhs[(j, offsets[i] + k)] = -theta[j] * gk;
            }
        }
        rhs[(j, dim)] = theta[j];
    }
    let sol = coupling
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularFollowerSystem { det })?;

    let a = (0..m)
        .map(|j| (0..dim).map(|k| sol[(j, k)]).collect())
        .collect();
    let b = (0..m).map(|j| sol[(j, dim)]).collect();
    Ok(ReactionMap {
        a,
        b,
        c0: vec![0.0; m],
        theta,
        provenance: Provenance::Analytic,
    })
}

/// Followers' joint equilibrium response at `(x, w)`.
pub fn follower_reaction(map: &ReactionMap, x: &LeaderProfile, w: f64) -> Vec<f64> {
    map.eval_flat(&x.flat(), w)
}

/// Per-follower suboptimality of a candidate `y` against the closed-form
/// best response with the other followers held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GneCheck {
    pub margins: Vec<f64>,
    pub worst: f64,
    pub pass: bool,
}

/// Re-solves each follower's inner LP with `y_{-j}` fixed and reports
/// `|y_j - best response|`; all margins within `tol` certify `y` as a
/// follower equilibrium at `(x, w)`.
pub fn verify_follower_gne(
    spec: &LqGameSpec,
    x: &LeaderProfile,
    w: f64,
    y: &[f64],
    tol: f64,
) -> Result<GneCheck> {
    let m = spec.n_followers();
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            path: "y".into(),
            message: format!("expected {m} follower outputs, got {}", y.len()),
        });
    }
    let mut margins = Vec::with_capacity(m);
    for j in 0..m {
        let gain = follower_gain(spec, j)?;
        let coupling: f64 = (0..m)
            .filter(|&l| l != j)
            .map(|l| alpha_of(spec, j, l) * y[l])
            .sum();
        let best = gain * (w + coupling - gamma(spec, j, x));
        margins.push((y[j] - best).abs());
    }
    let worst = margins.iter().copied().fold(0.0, f64::max);
    Ok(GneCheck {
        pass: worst <= tol,
        margins,
        worst,
    })
}
