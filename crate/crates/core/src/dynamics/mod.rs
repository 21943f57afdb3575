//! Round-by-round dissemination for the six models, tree and edge
//! adversaries, count-only fast-forward samplers and all-source tracking.

mod adversary;
mod dominance;
mod height2;
mod model;
mod runs;
mod scheme3;
mod state;
mod step;

pub use adversary::{
    correct_tree, merge_trees, optimal_sigma_eta, optimal_tree_forest, ErAdversary,
    FirstNonIncreasing, FnTreeAdversary, Fragment, MergeResult, OptimalTree, Strategy,
    TreeAdversary,
};
pub use dominance::{compare_strategies, correction_pair, merge_pair, DominanceCell, DominanceReport};
pub use height2::{height2_deterministic_lower_bound, height2_round_tree};
pub use model::{ModelKind, ModelSpec};
pub use runs::{
    run_all_sources, run_broadcast, run_er_coupled, run_er_scheme, step_with_strategy,
    AllSourcesRecord, Engine, RunOptions, TrialRecord,
};
pub use scheme3::{phase_bound, scheme3_edge_counter, scheme3_phases, Phase, PhaseCount, PhaseKind};
pub use state::{BroadcastState, ByzantineBehavior, CountState};
pub use step::{
    apply_edges, apply_tree, increment_law, sample_round_edges, sample_round_tree, step_fast,
    step_full_er, step_full_tree, ErAdvMode, ErScheme, FastStrategy, IncrementLaw, StepConfig,
};

/// Default round cap: `64 · (32c·ln n + 12c·max(ln n, k))`.
pub fn default_round_cap(spec: &ModelSpec, c: f64) -> usize {
    let ln = (spec.n.max(2) as f64).ln();
    (64.0 * (32.0 * c * ln + 12.0 * c * ln.max(spec.k as f64))).ceil() as usize
}
