//! Exact small-n analysis: optimal online values, the adversarial recursion,
//! the auxiliary-game bound for pairs, the filter event and the attack on
//! deterministic policies.

mod attack;
mod auxiliary;
mod dp;
mod good_event;
mod recursion;

pub use attack::{attack_permutation, deterministic_adversary_attack, find_t_star, AttackOutcome};
pub use auxiliary::{
    auxiliary_game_bound, auxiliary_game_optimal, binomial, event_probabilities, play_auxiliary_game,
    stirling_estimate, AuxiliaryBound, AuxiliaryOptimum, AUXILIARY_CAP,
};
pub use dp::{
    estimated_nodes, optimal_online_value, DpCriterion, DpDistribution, DpResult, ADVERSARIAL_CAP,
    UNIFORM_CAP,
};
pub use good_event::{
    asymptotic_anchor, good_event_exact, good_event_probability, tail_probability, GoodEventEstimate,
    GoodEventMode,
};
pub use recursion::{adversarial_recursion, AdversarialRecursion, RecursionStep, RECURSION_CAP};
