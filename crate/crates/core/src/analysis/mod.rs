//! Exact informed-count chain, the deterministic predictor, TP2 and
//! unimodality checks, and closed-form bound evaluators.

mod bounds;
mod budget;
mod matrix;
mod predictor;
mod scalar;
mod tp2;

pub use bounds::{
    binomial_tail_at_mean, binomial_tail_at_mean_exact, greenberg_mohri, hoeffding, small_p,
    BoundCheck,
};
pub use budget::{
    adversarial_lower_bound, clique_round_length, consensus_lower_bound_rounds,
    er_lower_bound_rounds, er_round_budget, predicted_round_budget, tau, urt_lower_bound_rounds,
    RoundBudget,
};
pub use matrix::{
    broadcast_time_distribution, build_transition_matrix, expected_counts, state_distributions,
    transition_matrix_for, TransitionMatrix,
};
pub use predictor::{
    predictor_dominates, predictor_exact, predictor_exact_recursion, predictor_states,
    predictor_step, predictor_value, PredictorState,
};
pub use scalar::Scalar;
pub use tp2::{
    build_q, build_q_inverse, conjugate, is_unimodal, mat_mul, tp2_check, unimodality_preserved,
    Tp2Report, UnimodalityVerdict,
};
