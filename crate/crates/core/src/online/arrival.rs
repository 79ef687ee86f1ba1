use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// How the hidden arrival permutation is drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum ArrivalProcess {
    /// Every permutation of the boys equally likely.
    Uniform { boys: usize },
    /// A fixed order: entry `t - 1` is the true index of the boy arriving at time `t`.
    Explicit(Vec<usize>),
    /// `D(p_2, ..., p_n)`: the boy arriving at time `k < n` is the best remaining
    /// boy with probability `p_{n+1-k}` and the worst remaining one otherwise.
    /// `top_probabilities[j - 2]` holds `p_j`.
    Adversarial { top_probabilities: Vec<f64> },
}

impl ArrivalProcess {
    pub fn uniform(boys: usize) -> Result<Self> {
        if boys == 0 {
            return Err(Error::InvalidArrival("need at least one boy"));
        }
        Ok(ArrivalProcess::Uniform { boys })
    }

    pub fn explicit(permutation: Vec<usize>) -> Result<Self> {
        if permutation.is_empty() {
            return Err(Error::InvalidArrival("need at least one boy"));
        }
        check_permutation(&permutation)?;
        Ok(ArrivalProcess::Explicit(permutation))
    }

    pub fn adversarial(top_probabilities: Vec<f64>) -> Result<Self> {
        if top_probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArrival("probabilities must lie in [0, 1]"));
        }
        Ok(ArrivalProcess::Adversarial { top_probabilities })
    }

    /// `D(1/2, ..., 1/2)` over `boys` boys.
    pub fn adversarial_half(boys: usize) -> Result<Self> {
        Self::adversarial(alloc::vec![0.5; boys.saturating_sub(1)])
    }

    pub fn boy_count(&self) -> usize {
        match self {
            ArrivalProcess::Uniform { boys } => *boys,
            ArrivalProcess::Explicit(p) => p.len(),
            ArrivalProcess::Adversarial { top_probabilities } => top_probabilities.len() + 1,
        }
    }
}

pub(crate) fn check_permutation(permutation: &[usize]) -> Result<()> {
    let n = permutation.len();
    let mut seen = alloc::vec![false; n];
    for &b in permutation {
        if b == 0 || b > n || core::mem::replace(&mut seen[b - 1], true) {
            return Err(Error::InvalidPermutation);
        }
    }
    Ok(())
}

/// Draws an arrival order. Entry `t - 1` is the true index of the boy
/// arriving at time `t`.
pub fn sample_arrival<R: Rng + ?Sized>(process: &ArrivalProcess, rng: &mut R) -> Vec<usize> {
    match process {
        ArrivalProcess::Uniform { boys } => {
            let mut perm: Vec<usize> = (1..=*boys).collect();
            perm.shuffle(rng);
            perm
        }
        ArrivalProcess::Explicit(p) => p.clone(),
        ArrivalProcess::Adversarial { top_probabilities } => {
            let n = top_probabilities.len() + 1;
            let (mut best, mut worst) = (1, n);
            let mut perm = Vec::with_capacity(n);
            for k in 1..n {
                // p_{n+1-k} lives at index n + 1 - k - 2
                if rng.random_bool(top_probabilities[n - 1 - k]) {
                    perm.push(best);
                    best += 1;
                } else {
                    perm.push(worst);
                    worst -= 1;
                }
            }
            perm.push(best);
            perm
        }
    }
}
