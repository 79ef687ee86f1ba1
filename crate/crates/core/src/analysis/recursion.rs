//! The adversarial recursion `p_{k+1} = 1 / (1 + v_k)` for satisfied girls.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::dp::{optimal_online_value, DpCriterion, DpDistribution, ADVERSARIAL_CAP};
use crate::{Error, Result};

/// Largest `n` for which the recursion is carried out in exact arithmetic.
pub const RECURSION_CAP: usize = 20;

/// Inequalities checked at one `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionStep {
    pub k: usize,
    /// `v_k` comes from the exact game tree, not from the step bound.
    pub exact: bool,
    /// `v_k <= v_{k-1} + 1 / (1 + v_{k-1})` (vacuous at `k = 1`).
    pub step_bound: bool,
    /// `1 + v_k < sqrt(2k) + sqrt(2/k)`.
    pub chain_bound: bool,
    /// `v_k < sqrt(2k)`.
    pub sqrt_bound: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialRecursion {
    /// `p[j - 2] = p_j` for `j = 2..=n`.
    pub p: Vec<BigRational>,
    /// `v[k - 1] = v_k`.
    pub v: Vec<BigRational>,
    /// `increments[k - 1] = 1 + sum_{j < k} 1 / (1 + v_j)`, the bound chain on `v_k`.
    pub increments: Vec<BigRational>,
    pub steps: Vec<RecursionStep>,
}

impl AdversarialRecursion {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.step_bound && s.chain_bound && s.sqrt_bound)
    }
}

/// Builds `p_2..p_n`, taking `v_k` from the exact game tree for `k <= dp_cap`
/// and from the step bound `v_k + 1/(1 + v_k)` beyond it.
pub fn adversarial_recursion(n: usize, dp_cap: Option<usize>) -> Result<AdversarialRecursion> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive"));
    }
    if n > RECURSION_CAP {
        return Err(Error::TooLarge {
            n,
            cap: RECURSION_CAP,
            // numerators roughly double in length per step
            estimated_nodes: 1u128 << n.min(127),
        });
    }
    let dp_cap = dp_cap.unwrap_or(ADVERSARIAL_CAP);
    let one = BigRational::one();
    let mut p: Vec<BigRational> = Vec::new();
    let mut v: Vec<BigRational> = Vec::new();
    let mut increments = Vec::new();
    let mut steps = Vec::new();
    for k in 1..=n {
        let exact = k <= dp_cap;
        let vk = if exact {
            let dist = DpDistribution::Adversarial(p.clone());
            optimal_online_value(k, &dist, DpCriterion::Girls, Some(dp_cap))?.value
        } else {
            let prev = &v[k - 2];
            prev + &one / (&one + prev)
        };
        let inc = match v.last() {
            None => one.clone(),
            Some(prev) => &increments[k - 2] + &one / (&one + prev),
        };
        let step_bound = v.last().is_none_or(|prev| vk <= prev + &one / (&one + prev));
        let kk = BigRational::from_integer(BigInt::from(k));
        let one_plus = &one + &vk;
        let two = BigRational::from_integer(BigInt::from(2));
        let chain_bound = &one_plus * &one_plus < &two * (&kk + &one) * (&kk + &one) / &kk;
        let sqrt_bound = &vk * &vk < &two * &kk;
        steps.push(RecursionStep { k, exact, step_bound, chain_bound, sqrt_bound });
        if k < n {
            p.push(&one / &one_plus);
        }
        v.push(vk);
        increments.push(inc);
    }
    Ok(AdversarialRecursion { p, v, increments, steps })
}
