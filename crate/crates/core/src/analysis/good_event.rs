//! Probability that the best of the first `q = ceil(k / l)` arrivals in a
//! uniformly random order over `[k]` has rank `R` with `l/5 < R <= l`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::RngCore;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GoodEventMode {
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodEventEstimate {
    pub probability: f64,
    /// Standard error; zero in exact mode.
    pub std_error: f64,
}

fn check(k: usize, l: usize) -> Result<usize> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter("k and l must be positive"));
    }
    Ok(k.div_ceil(l))
}

/// `Pr(R > r) = prod_{j < r} (k - q - j) / (k - j)`.
pub fn tail_probability(k: usize, q: usize, r: usize) -> BigRational {
    if q + r > k {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..r {
        num *= k - q - j;
        den *= k - j;
    }
    BigRational::new(num, den)
}

/// Exact `Pr(l/5 < R <= l)`.
pub fn good_event_exact(k: usize, l: usize) -> Result<BigRational> {
    let q = check(k, l)?;
    Ok(tail_probability(k, q, l / 5) - tail_probability(k, q, l))
}

pub fn good_event_probability(
    k: usize,
    l: usize,
    mode: GoodEventMode,
    rng: &mut dyn RngCore,
) -> Result<GoodEventEstimate> {
    match mode {
        GoodEventMode::Exact => Ok(GoodEventEstimate {
            probability: good_event_exact(k, l)?.to_f64().unwrap_or(f64::NAN),
            std_error: 0.0,
        }),
        GoodEventMode::MonteCarlo { trials } => {
            let q = check(k, l)?;
            if trials == 0 {
                return Err(Error::InvalidParameter("trials must be positive"));
            }
            let mut hits = 0u64;
            for _ in 0..trials {
                // ranks of the first q arrivals form a uniform q-subset of [k]
                let r = index::sample(rng, k, q).iter().min().map_or(0, |x| x + 1);
                if 5 * r > l && r <= l {
                    hits += 1;
                }
            }
            let p = hits as f64 / trials as f64;
            Ok(GoodEventEstimate { probability: p, std_error: libm::sqrt(p * (1.0 - p) / trials as f64) })
        }
    }
}

/// `e^{-4/5} - e^{-1}`.
pub fn asymptotic_anchor() -> f64 {
    libm::exp(-0.8) - libm::exp(-1.0)
}
