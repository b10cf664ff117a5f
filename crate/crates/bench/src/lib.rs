//! Shared fixtures for the benchmark targets.

use nsn_ddu_core::{build_reaction_map, scenario::paper_sec5, LqGameSpec, ReactionMap};

/// The bundled reference instance with its reaction map.
pub fn reference_instance() -> (LqGameSpec, ReactionMap) {
    let spec = paper_sec5();
    let map = build_reaction_map(&spec).expect("reference instance is well posed");
    (spec, map)
}
