//! Random instance generation for property tests and audit sweeps.
//!
//! Generated instances always validate, keep the follower layer well posed
//! (bounded inner LPs, diagonally dominant coupling), and keep the
//! uncertainty interval nonempty over the whole strategy box. Quadratic
//! weights are bounded away from zero so that sign-dependent checks have
//! exact witnesses.

use rand::Rng;

use crate::model::{FollowerSpec, LeaderSpec, LqGameSpec};

/// Shape and coefficient ranges for random instances.
#[derive(Debug, Clone)]
pub struct GenOptions {
    pub n_leaders: usize,
    pub m_followers: usize,
    /// Strategy dimension per leader.
    pub dim: usize,
    /// Draw quadratic weights from the nonnegative range only.
    pub nonnegative_c: bool,
    pub ddu_enabled: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            n_leaders: 2,
            m_followers: 2,
            dim: 2,
            nonnegative_c: true,
            ddu_enabled: true,
        }
    }
}

/// Draws a random linear-quadratic instance.
pub fn random_spec(rng: &mut impl Rng, opts: &GenOptions) -> LqGameSpec {
    let n = opts.n_leaders;
    let m = opts.m_followers;
    let p = opts.dim;

    let w_half = rng.random_range(2.0..5.0);

    let mut leaders = Vec::with_capacity(n);
    for _ in 0..n {
        let box_lo: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..0.5)).collect();
        let box_hi: Vec<f64> = box_lo.iter().map(|lo| lo + rng.random_range(0.3..1.2)).collect();
        // Quadratic weight bounded away from zero so concavity violations
        // are detectable.
        let mag = rng.random_range(0.05..0.8);
        let c = if opts.nonnegative_c || rng.random_bool(0.5) { mag } else { -mag };
        leaders.push(LeaderSpec {
            box_lo,
            box_hi,
            a: (0..p).map(|_| rng.random_range(-2.0..2.0)).collect(),
            b: (0..m).map(|_| rng.random_range(-2.0..2.0)).collect(),
            c,
            d: rng.random_range(-0.5 * w_half..0.5 * w_half),
            sigma: (0..p).map(|_| rng.random_range(0.0..0.2)).collect(),
        });
    }

    // Scale the shrink coefficients so the interval never empties: the
    // largest possible shrink stays below half the base width.
    let max_shrink: f64 = leaders
        .iter()
        .map(|l| {
            l.sigma
                .iter()
                .zip(l.box_lo.iter().zip(&l.box_hi))
                .map(|(s, (lo, hi))| s * lo.abs().max(hi.abs()))
                .sum::<f64>()
        })
        .sum();
    if max_shrink > 0.8 * w_half {
        let scale = 0.8 * w_half / max_shrink;
        for l in &mut leaders {
            for s in &mut l.sigma {
                *s *= scale;
            }
        }
    }

    let mut followers = Vec::with_capacity(m);
    for _ in 0..m {
        let h2_mag: f64 = rng.random_range(0.5..2.0);
        let h: [f64; 2] = [rng.random_range(-2.0..2.0), if rng.random_bool(0.5) { h2_mag } else { -h2_mag }];
        let e2: f64 = rng.random_range(-2.0..2.0);
        // Keep the inner LP bounded: reduced cost of the constrained
        // direction at most zero.
        let e1 = e2 * h[0] / h[1] - rng.random_range(0.0..1.5);
        let theta = (e2 / h[1]).abs().max(0.1_f64);
        // Diagonally dominant coupling keeps the joint system nonsingular.
        let alpha_cap = 0.8 / (theta * (m.max(2) - 1) as f64);
        followers.push(FollowerSpec {
            e: [e1, e2],
            h,
            g: (0..n).map(|i| (0..leaders[i].dim()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect(),
            alpha: (0..m - 1)
                .map(|_| rng.random_range(-alpha_cap..alpha_cap))
                .collect(),
        });
    }

    let spec = LqGameSpec {
        leaders,
        followers,
        w_base_lo: -w_half,
        w_base_hi: w_half,
        ddu_enabled: opts.ddu_enabled,
    };
    debug_assert!(spec.validate().is_ok());
    spec
}

/// Random weight vector: strictly positive entries summing to one.
pub fn random_positive_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::followers::build_reaction_map;
    use crate::model::{uncertainty_interval, LeaderProfile};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_specs_validate_and_build() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let spec = random_spec(&mut rng, &GenOptions::default());
            assert!(spec.validate().is_ok());
            assert!(build_reaction_map(&spec).is_ok());
        }
    }

    #[test]
    fn generated_intervals_never_empty_on_corners() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let spec = random_spec(&mut rng, &GenOptions::default());
            let hi_corner = LeaderProfile::new(spec.leaders.iter().map(|l| l.box_hi.clone()).collect());
            let lo_corner = LeaderProfile::new(spec.leaders.iter().map(|l| l.box_lo.clone()).collect());
            assert!(uncertainty_interval(&spec, &hi_corner).is_ok());
            assert!(uncertainty_interval(&spec, &lo_corner).is_ok());
        }
    }
}
