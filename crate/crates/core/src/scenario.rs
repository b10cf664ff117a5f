//! Scenario documents: the JSON schema, loader, and bundled instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leaders::{BrMode, BrRefine, Tiebreak};
use crate::model::{FollowerSpec, LeaderSpec, LqGameSpec};

/// The bundled two-leader, two-follower reference scenario.
pub const PAPER_SEC5_JSON: &str = include_str!("../scenarios/paper_sec5.json");

/// Solver defaults carried by a scenario document, all overridable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverDefaults {
    /// Scalarization weight on the first leader; the second gets `1 - lambda`.
    pub lambda: f64,
    pub mode: BrMode,
    pub tiebreak: Tiebreak,
    pub max_iter: usize,
    pub conv_tol: f64,
    /// Points per coordinate for the leader-optimality grid check.
    pub grid_x: usize,
    /// Points for the uncertainty-interval grid checks.
    pub grid_w: usize,
    pub tol: f64,
    pub seed: u64,
    /// Search strategy for the anticipating best response.
    pub br_refine: BrRefine,
    /// Points per coordinate when `br_refine` is the dense grid.
    pub br_grid: usize,
}

impl Default for SolverDefaults {
    fn default() -> Self {
        SolverDefaults {
            lambda: 0.5,
            mode: BrMode::Anticipating,
            tiebreak: Tiebreak::LexLow,
            max_iter: 200,
            conv_tol: 1e-8,
            grid_x: 101,
            grid_w: 4001,
            tol: 1e-6,
            seed: 0,
            br_refine: BrRefine::Lattice,
            br_grid: 101,
        }
    }
}

/// A parsed scenario: game spec plus solver defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: LqGameSpec,
    pub solver: SolverDefaults,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    leaders: Vec<LeaderSpec>,
    followers: Vec<FollowerSpec>,
    uncertainty: UncertaintyDoc,
    #[serde(default)]
    solver: SolverDefaults,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintyDoc {
    lo: f64,
    hi: f64,
    #[serde(default = "default_true")]
    ddu_enabled: bool,
}

fn default_true() -> bool {
    true
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let spec = LqGameSpec {
        leaders: doc.leaders,
        followers: doc.followers,
        w_base_lo: doc.uncertainty.lo,
        w_base_hi: doc.uncertainty.hi,
        ddu_enabled: doc.uncertainty.ddu_enabled,
    };
    spec.validate()?;
    Ok(Scenario {
        spec,
        solver: doc.solver,
    })
}

/// Parses a scenario document into a validated game spec.
pub fn load_scenario(text: &str) -> Result<LqGameSpec> {
    parse_scenario(text).map(|s| s.spec)
}

/// The bundled reference instance, already validated.
pub fn paper_sec5() -> LqGameSpec {
    load_scenario(PAPER_SEC5_JSON).expect("bundled scenario is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_matches_reference_values() {
        let spec = paper_sec5();
        assert_eq!(spec.n_leaders(), 2);
        assert_eq!(spec.n_followers(), 2);
        assert_eq!(spec.leaders[0].a, vec![1.3, 0.0]);
        assert_eq!(spec.leaders[1].a, vec![1.3, 0.0]);
        assert_eq!(spec.leaders[0].b, vec![-1.2, -1.2]);
        assert_eq!(spec.leaders[1].b, vec![0.4, 0.4]);
        for l in &spec.leaders {
            assert_eq!(l.c, 0.2);
            assert_eq!(l.d, 2.0);
            assert_eq!(l.sigma, vec![0.0, 2.0]);
            assert_eq!(l.box_lo, vec![0.0, 0.0]);
            assert_eq!(l.box_hi, vec![1.0, 1.0]);
        }
        assert_eq!((spec.w_base_lo, spec.w_base_hi), (-4.0, 4.0));
        assert!(spec.ddu_enabled);
    }

    #[test]
    fn bundled_solver_defaults() {
        let sc = parse_scenario(PAPER_SEC5_JSON).unwrap();
        assert_eq!(sc.solver.lambda, 0.2);
        assert_eq!(sc.solver.mode, BrMode::Anticipating);
        assert_eq!(sc.solver.tiebreak, Tiebreak::LexLow);
        assert_eq!(sc.solver.grid_w, 4001);
    }

    #[test]
    fn dimension_mismatch_names_the_field() {
        let mut doc: serde_json::Value = serde_json::from_str(PAPER_SEC5_JSON).unwrap();
        doc["leaders"][0]["b"] = serde_json::json!([1.0, 2.0, 3.0]);
        let err = load_scenario(&doc.to_string()).unwrap_err();
        match err {
            Error::DimensionMismatch { path, .. } => assert_eq!(path, "leaders[0].b"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_schema_error() {
        let err = load_scenario("{ not json").unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn empty_leader_list_rejected() {
        let mut doc: serde_json::Value = serde_json::from_str(PAPER_SEC5_JSON).unwrap();
        doc["leaders"] = serde_json::json!([]);
        let err = load_scenario(&doc.to_string()).unwrap_err();
        match err {
            Error::InvalidValue { path, .. } => assert_eq!(path, "leaders"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn crossed_base_interval_rejected() {
        let mut doc: serde_json::Value = serde_json::from_str(PAPER_SEC5_JSON).unwrap();
        doc["uncertainty"]["lo"] = serde_json::json!(5.0);
        let err = load_scenario(&doc.to_string()).unwrap_err();
        assert!(matches!(err, Error::InvalidValue { .. }));
    }
}
