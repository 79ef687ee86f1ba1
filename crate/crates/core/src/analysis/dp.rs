//! Optimal online values by backward induction over the full game tree.
//!
//! Under `D(p_2, ..., p_n)` the decision maker commits at time `k` before the
//! chance bit (top or bottom of the remaining boys) is drawn; the observed
//! relative rank does not depend on that bit. Under uniform arrivals the
//! relative rank is drawn first and the decision follows it.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::model::Criterion;
use crate::online::Action;
use crate::{Error, Result};

/// Default largest `n` for the adversarial tree.
pub const ADVERSARIAL_CAP: usize = 7;
/// Default largest `n` for the uniform tree.
pub const UNIFORM_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum DpDistribution {
    Uniform,
    /// `top_probabilities[j - 2] = p_j` for `j = 2..=n`.
    Adversarial(Vec<BigRational>),
}

impl DpDistribution {
    /// `D(1/2, ..., 1/2)` for `n` boys.
    pub fn half(n: usize) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        DpDistribution::Adversarial(vec![half; n.saturating_sub(1)])
    }

    fn default_cap(&self) -> usize {
        match self {
            DpDistribution::Uniform => UNIFORM_CAP,
            DpDistribution::Adversarial(_) => ADVERSARIAL_CAP,
        }
    }
}

impl fmt::Display for DpDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DpDistribution::Uniform => f.write_str("uniform"),
            DpDistribution::Adversarial(p) => {
                f.write_str("D(")?;
                for (i, x) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpCriterion {
    Girls,
    Boys,
    Pairs,
}

impl DpCriterion {
    pub fn name(self) -> &'static str {
        Criterion::from(self).name()
    }
}

impl From<DpCriterion> for Criterion {
    fn from(c: DpCriterion) -> Self {
        match c {
            DpCriterion::Girls => Criterion::Girls,
            DpCriterion::Boys => Criterion::Boys,
            DpCriterion::Pairs => Criterion::Pairs,
        }
    }
}

impl TryFrom<Criterion> for DpCriterion {
    type Error = Error;

    fn try_from(c: Criterion) -> Result<Self> {
        match c {
            Criterion::Girls => Ok(DpCriterion::Girls),
            Criterion::Boys => Ok(DpCriterion::Boys),
            Criterion::Pairs => Ok(DpCriterion::Pairs),
            _ => Err(Error::Weighted),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpResult {
    pub n: usize,
    pub criterion: DpCriterion,
    pub distribution: DpDistribution,
    /// Expected payoff of an optimal deterministic online strategy.
    pub value: BigRational,
    /// Optimal action for every reachable observation history (relative ranks so far).
    pub strategy: BTreeMap<Vec<usize>, Action>,
    /// Total probability of the leaves reached by `strategy`.
    pub leaf_mass: BigRational,
    /// Expected payoff of `strategy`, recomputed leaf by leaf.
    pub strategy_value: BigRational,
}

impl DpResult {
    /// Longest observation history in the strategy.
    pub fn depth(&self) -> usize {
        self.strategy.keys().map(Vec::len).max().unwrap_or(0)
    }
}

/// Rough number of tree states for `n`: `(n + 1) * sum_j C(n, j) * n! / (n - j)!`.
pub fn estimated_nodes(n: usize) -> u128 {
    let n128 = n as u128;
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut falling: u128 = 1;
    for j in 0..=n128 {
        total = total.saturating_add(binom.saturating_mul(falling));
        binom = binom.saturating_mul(n128 - j) / (j + 1);
        falling = falling.saturating_mul(n128 - j);
    }
    total.saturating_mul(n128 + 1)
}

/// Exact optimal online value for `n` boys and `n` girls.
///
/// `cap` overrides the default size limit (7 for `D`, 6 for uniform).
pub fn optimal_online_value(
    n: usize,
    distribution: &DpDistribution,
    criterion: DpCriterion,
    cap: Option<usize>,
) -> Result<DpResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive"));
    }
    if n > u8::MAX as usize - 1 {
        return Err(Error::TooLarge { n, cap: u8::MAX as usize - 1, estimated_nodes: estimated_nodes(n) });
    }
    let cap = cap.unwrap_or_else(|| distribution.default_cap());
    if n > cap {
        return Err(Error::TooLarge { n, cap, estimated_nodes: estimated_nodes(n) });
    }
    let (value, walk) = match distribution {
        DpDistribution::Uniform => {
            let mut dp = UniformDp { n, criterion, memo: BTreeMap::new() };
            let value = dp.value(&[]);
            let mut walk = Walk::new();
            dp.walk(&mut Vec::new(), &mut Vec::new(), &BigRational::one(), &mut walk);
            (value, walk)
        }
        DpDistribution::Adversarial(p) => {
            if p.len() != n - 1 {
                return Err(Error::InvalidParameter("need p_2..p_n"));
            }
            if p.iter().any(|x| *x < BigRational::zero() || *x > BigRational::one()) {
                return Err(Error::InvalidParameter("probabilities must lie in [0, 1]"));
            }
            let mut dp = AdversarialDp { n, criterion, p, memo: BTreeMap::new() };
            let mut start = vec![0u8; n];
            let value = dp.value(&mut start, 1, n);
            let mut walk = Walk::new();
            dp.walk(&mut start, 1, n, &mut Vec::new(), &BigRational::one(), &mut walk);
            (value, walk)
        }
    };
    Ok(DpResult {
        n,
        criterion,
        distribution: distribution.clone(),
        value,
        strategy: walk.strategy,
        leaf_mass: walk.mass,
        strategy_value: walk.value,
    })
}

/// Payoff of a complete matching, `girl_of_boy[b - 1]` being 0 for unmatched.
fn payoff(girl_of_boy: &[u8], criterion: DpCriterion) -> u32 {
    let n = girl_of_boy.len();
    let mut boy_of_girl = vec![0u8; n];
    for (b, &g) in girl_of_boy.iter().enumerate() {
        if g > 0 {
            boy_of_girl[g as usize - 1] = b as u8 + 1;
        }
    }
    let worst = |x: u8| if x == 0 { u8::MAX } else { x };
    // girl g with boy b is satisfied iff every better boy holds a better girl
    let mut girl_ok = vec![false; n];
    let mut worst_girl = 0u8;
    for &g in girl_of_boy {
        if g > 0 {
            girl_ok[g as usize - 1] = worst_girl < g;
        }
        worst_girl = worst_girl.max(worst(g));
    }
    let mut boy_ok = vec![false; n];
    let mut worst_boy = 0u8;
    for &b in &boy_of_girl {
        if b > 0 {
            boy_ok[b as usize - 1] = worst_boy < b;
        }
        worst_boy = worst_boy.max(worst(b));
    }
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count() as u32;
    match criterion {
        DpCriterion::Girls => count(&girl_ok),
        DpCriterion::Boys => count(&boy_ok),
        DpCriterion::Pairs => girl_of_boy
            .iter()
            .enumerate()
            .filter(|&(b, &g)| g > 0 && boy_ok[b] && girl_ok[g as usize - 1])
            .count() as u32,
    }
}

fn int(x: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

struct Walk {
    strategy: BTreeMap<Vec<usize>, Action>,
    mass: BigRational,
    value: BigRational,
}

impl Walk {
    fn new() -> Self {
        Walk { strategy: BTreeMap::new(), mass: BigRational::zero(), value: BigRational::zero() }
    }

    fn leaf(&mut self, prob: &BigRational, payoff: u32) {
        self.mass += prob;
        self.value += prob * int(payoff);
    }
}

fn free_girls(n: usize, taken: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut used = vec![false; n + 1];
    for g in taken {
        used[g as usize] = true;
    }
    (1..=n as u8).filter(|&g| !used[g as usize]).collect()
}

/// Girls in order, then skip; the first maximizer wins.
fn candidates(free: &[u8]) -> impl Iterator<Item = u8> + '_ {
    free.iter().copied().chain(core::iter::once(0))
}

fn action_of(choice: u8) -> Action {
    if choice == 0 {
        Action::Skip
    } else {
        Action::Match(choice as usize)
    }
}

/// State: `slots[b - 1]` is 0 before boy `b` arrives, 1 if he was skipped and
/// `g + 1` if he holds girl `g`. The boys still to come are `lo..=hi`.
struct AdversarialDp<'a> {
    n: usize,
    criterion: DpCriterion,
    p: &'a [BigRational],
    memo: BTreeMap<Vec<u8>, BigRational>,
}

impl AdversarialDp<'_> {
    fn top_probability(&self, lo: usize, hi: usize) -> Option<&BigRational> {
        let remaining = hi + 1 - lo;
        // time k = n + 1 - remaining draws p_{remaining}
        (remaining >= 2).then(|| &self.p[remaining - 2])
    }

    fn leaf_payoff(&self, slots: &[u8]) -> u32 {
        let matching: Vec<u8> = slots.iter().map(|&s| s.saturating_sub(1)).collect();
        payoff(&matching, self.criterion)
    }

    fn free(&self, slots: &[u8]) -> Vec<u8> {
        free_girls(self.n, slots.iter().filter(|&&s| s > 1).map(|&s| s - 1))
    }

    fn value(&mut self, slots: &mut Vec<u8>, lo: usize, hi: usize) -> BigRational {
        if lo > hi {
            return int(self.leaf_payoff(slots));
        }
        if let Some(v) = self.memo.get(slots.as_slice()) {
            return v.clone();
        }
        let free = self.free(slots);
        let mut best: Option<BigRational> = None;
        for choice in candidates(&free) {
            let v = self.action_value(slots, lo, hi, choice);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        let best = best.unwrap_or_else(BigRational::zero);
        self.memo.insert(slots.clone(), best.clone());
        best
    }

    fn action_value(&mut self, slots: &mut Vec<u8>, lo: usize, hi: usize, choice: u8) -> BigRational {
        let slot = choice + 1;
        let Some(p) = self.top_probability(lo, hi).cloned() else {
            slots[lo - 1] = slot;
            let v = self.value(slots, lo + 1, hi);
            slots[lo - 1] = 0;
            return v;
        };
        let mut total = BigRational::zero();
        if !p.is_zero() {
            slots[lo - 1] = slot;
            total += &p * self.value(slots, lo + 1, hi);
            slots[lo - 1] = 0;
        }
        let q = BigRational::one() - &p;
        if !q.is_zero() {
            slots[hi - 1] = slot;
            total += q * self.value(slots, lo, hi - 1);
            slots[hi - 1] = 0;
        }
        total
    }

    fn walk(
        &mut self,
        slots: &mut Vec<u8>,
        lo: usize,
        hi: usize,
        history: &mut Vec<usize>,
        prob: &BigRational,
        out: &mut Walk,
    ) {
        if lo > hi {
            out.leaf(prob, self.leaf_payoff(slots));
            return;
        }
        // the arrival sits just below the lo - 1 earlier top boys
        history.push(lo);
        let free = self.free(slots);
        let mut best: Option<(BigRational, u8)> = None;
        for choice in candidates(&free) {
            let v = self.action_value(slots, lo, hi, choice);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, choice));
            }
        }
        let choice = best.map_or(0, |(_, c)| c);
        out.strategy.insert(history.clone(), action_of(choice));
        let slot = choice + 1;
        match self.top_probability(lo, hi).cloned() {
            None => {
                slots[lo - 1] = slot;
                self.walk(slots, lo + 1, hi, history, prob, out);
                slots[lo - 1] = 0;
            }
            Some(p) => {
                let q = BigRational::one() - &p;
                if !p.is_zero() {
                    slots[lo - 1] = slot;
                    self.walk(slots, lo + 1, hi, history, &(prob * &p), out);
                    slots[lo - 1] = 0;
                }
                if !q.is_zero() {
                    slots[hi - 1] = slot;
                    self.walk(slots, lo, hi - 1, history, &(prob * &q), out);
                    slots[hi - 1] = 0;
                }
            }
        }
        history.pop();
    }
}

/// State: the arrived boys sorted best first, each holding a girl or 0.
struct UniformDp {
    n: usize,
    criterion: DpCriterion,
    memo: BTreeMap<Vec<u8>, BigRational>,
}

impl UniformDp {
    fn value(&mut self, order: &[u8]) -> BigRational {
        if order.len() == self.n {
            return int(payoff(order, self.criterion));
        }
        if let Some(v) = self.memo.get(order) {
            return v.clone();
        }
        let free = free_girls(self.n, order.iter().copied().filter(|&g| g > 0));
        let k = order.len();
        let mut total = BigRational::zero();
        let mut next = Vec::with_capacity(k + 1);
        for pos in 0..=k {
            let mut best: Option<BigRational> = None;
            for choice in candidates(&free) {
                insert_at(&mut next, order, pos, choice);
                let v = self.value(&next);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
            total += best.unwrap_or_else(BigRational::zero);
        }
        let v = total / int(k as u32 + 1);
        self.memo.insert(order.to_vec(), v.clone());
        v
    }

    fn walk(&mut self, order: &mut Vec<u8>, history: &mut Vec<usize>, prob: &BigRational, out: &mut Walk) {
        let k = order.len();
        if k == self.n {
            out.leaf(prob, payoff(order, self.criterion));
            return;
        }
        let free = free_girls(self.n, order.iter().copied().filter(|&g| g > 0));
        let branch = prob / int(k as u32 + 1);
        let mut next = Vec::with_capacity(k + 1);
        for pos in 0..=k {
            let mut best: Option<(BigRational, u8)> = None;
            for choice in candidates(&free) {
                insert_at(&mut next, order, pos, choice);
                let v = self.value(&next);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, choice));
                }
            }
            let choice = best.map_or(0, |(_, c)| c);
            history.push(pos + 1);
            out.strategy.insert(history.clone(), action_of(choice));
            order.insert(pos, choice);
            self.walk(order, history, &branch, out);
            order.remove(pos);
            history.pop();
        }
    }
}

fn insert_at(out: &mut Vec<u8>, order: &[u8], pos: usize, choice: u8) {
    out.clear();
    out.extend_from_slice(&order[..pos]);
    out.push(choice);
    out.extend_from_slice(&order[pos..]);
}
