//! Adaptive adversary against deterministic policies on balanced instances.
//!
//! Feed the policy ever better boys until it first skips one or gives one the
//! least preferred girl (time `t*`). Making that boy the best overall and every
//! later boy worse leaves at most one satisfied girl.

use alloc::vec::Vec;

use crate::model::{satisfaction, Instance};
use crate::online::{run_online, Action, PolicyFactory, RunTrace};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AttackOutcome {
    pub t_star: usize,
    pub permutation: Vec<usize>,
    pub trace: RunTrace,
    pub satisfied_girls: usize,
}

/// `[t*, t* - 1, ..., 1, t* + 1, ..., n]`: increasing up to `t*`, worse afterwards.
pub fn attack_permutation(n: usize, t_star: usize) -> Vec<usize> {
    (1..=t_star).rev().chain(t_star + 1..=n).collect()
}

/// First time the policy skips or hands out girl `n` on an all-improving stream.
pub fn find_t_star(instance: &Instance, factory: &dyn PolicyFactory, seed: u64) -> Result<usize> {
    let n = instance.num_girls();
    let ascending: Vec<usize> = (1..=n).rev().collect();
    let trace = run_online(instance, &ascending, factory, seed)?;
    Ok(trace
        .decisions
        .iter()
        .find(|d| matches!(d.action, Action::Skip) || d.action == Action::Match(n))
        .map_or(n, |d| d.time))
}

/// Builds the attack for the policy `factory` seeded with `seed` and replays it.
pub fn deterministic_adversary_attack(
    instance: &Instance,
    factory: &dyn PolicyFactory,
    seed: u64,
) -> Result<AttackOutcome> {
    if !instance.is_balanced() || instance.num_boys() == 0 {
        return Err(Error::Unbalanced { girls: instance.num_girls(), boys: instance.num_boys() });
    }
    let n = instance.num_boys();
    let t_star = find_t_star(instance, factory, seed)?;
    let permutation = attack_permutation(n, t_star);
    let trace = run_online(instance, &permutation, factory, seed)?;
    let satisfied_girls = satisfaction(instance, &trace.final_matching)?.satisfied_girls.len();
    Ok(AttackOutcome { t_star, permutation, trace, satisfied_girls })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_shape() {
        assert_eq!(attack_permutation(5, 3), [3, 2, 1, 4, 5]);
        assert_eq!(attack_permutation(2, 2), [2, 1]);
        assert_eq!(attack_permutation(2, 1), [1, 2]);
    }
}
