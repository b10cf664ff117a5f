//! Solver, verifier, and assumption auditor for two-stage hierarchical games
//! under decision-dependent uncertainty.
//!
//! Leaders play a Nash game, the uncertainty is realized inside a
//! decision-dependent interval as an adversarial virtual player, and the
//! followers play a generalized Nash game observing both. The crate covers
//! the linear-quadratic family end to end:
//!
//! - [`model`]: game instances, payoffs, uncertainty intervals, feasibility;
//! - [`followers`]: closed-form reaction map with independent verification;
//! - [`worstcase`]: scalarized worst case, Pareto fronts, membership checks;
//! - [`leaders`]: myopic and anticipating best responses;
//! - [`engine`]: Jacobi fixed-point solver and equilibrium certifier;
//! - [`audit`]: sampling-based existence checks;
//! - [`scenario`]: JSON scenario documents plus the bundled instance;
//! - [`gen`]: random instances for property tests and audit sweeps.

pub mod audit;
pub mod engine;
pub mod error;
pub mod followers;
pub mod gen;
pub mod leaders;
pub mod model;
pub mod scenario;
pub mod worstcase;

pub use audit::{audit_assumptions, existence_statement, AuditReport, AuditVerdict, ExistenceClause};
pub use engine::{
    jacobi_solve, lambda_sweep, verify_equilibrium, EquilibriumCandidate, EquilibriumCertificate,
    JacobiConfig, JacobiOutcome, Regime, SolveStatus, SweepConfig, SweepRow, TraceRow, Verdict,
};
pub use error::{Error, Result};
pub use followers::{
    build_reaction_map, follower_reaction, verify_follower_gne, GneCheck, Provenance, ReactionMap,
};
pub use leaders::{
    check_leader_optimality, leader_best_response, leader_best_response_with, BestResponseResult,
    BrMode, BrOptions, BrRefine, LeaderOptimality, Tiebreak,
};
pub use model::{
    check_profile_feasible, eval_payoff, uncertainty_interval, FeasibilityReport, FollowerSpec,
    Interval, LeaderProfile, LeaderSpec, LqGameSpec,
};
pub use scenario::{load_scenario, parse_scenario, Scenario, SolverDefaults, PAPER_SEC5_JSON};
pub use worstcase::{
    check_strong_pareto, check_weak_pareto, pareto_front, payoff_vector, scalarized_worst_case,
    Boundary, ParetoCheck, ParetoPoint, ParetoWitness, WorstCaseResult,
};
