//! The two-stage auxiliary game for satisfied pairs.
//!
//! A uniformly random half `R` of the boys (the red boys) is matched first to
//! a fixed girl set `A`, the other half to the rest, both in preference order.
//! Girl `g_i` ends up in a satisfied pair exactly when
//! `|R ∩ [i-1]| = |A ∩ [i-1]|` and `|R \ [i]| = |A \ [i]|` (event `E_i`).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rand::RngCore;

use crate::model::{satisfaction, Instance, Matching};
use crate::{Error, Result};

/// Largest `n` for the exhaustive search over girl sets.
pub const AUXILIARY_CAP: usize = 12;

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// `c[m] = C(m, ceil(m / 2))` for `m = 0..=n`.
fn central_binomials(n: usize) -> Vec<BigUint> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(BigUint::from(1u32));
    for m in 0..n {
        let next = if m % 2 == 0 {
            // C(2j+1, j+1) = C(2j, j) (2j+1) / (j+1)
            let j = m / 2;
            &c[m] * (2 * j + 1) / (j + 1)
        } else {
            // C(2j+2, j+1) = 2 C(2j+1, j+1)
            &c[m] * 2u32
        };
        c.push(next);
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryBound {
    pub n: usize,
    /// `sum_i C(i-1, ceil((i-1)/2)) C(n-i, ceil((n-i)/2)) / C(n, n/2)`.
    pub value: BigRational,
    /// `value / sqrt(n pi / 2)`.
    pub ratio: f64,
}

impl AuxiliaryBound {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn stirling_estimate(n: usize) -> f64 {
    libm::sqrt(n as f64 * core::f64::consts::PI / 2.0)
}

fn require_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter("n must be even and positive"));
    }
    Ok(())
}

/// Upper bound on the value of the auxiliary game, in exact arithmetic.
pub fn auxiliary_game_bound(n: usize) -> Result<AuxiliaryBound> {
    require_even(n)?;
    let c = central_binomials(n);
    let mut sum = BigUint::zero();
    for i in 1..=n {
        sum += &c[i - 1] * &c[n - i];
    }
    let value = BigRational::new(BigInt::from(sum), BigInt::from(binomial(n, n / 2)));
    let ratio = value.to_f64().unwrap_or(f64::NAN) / stirling_estimate(n);
    Ok(AuxiliaryBound { n, value, ratio })
}

/// `Pr(E_i)` for `i = 1..=n` given the red girl set `in_a[i - 1]`.
pub fn event_probabilities(in_a: &[bool]) -> Result<Vec<BigRational>> {
    let n = in_a.len();
    require_even(n)?;
    if in_a.iter().filter(|&&x| x).count() != n / 2 {
        return Err(Error::InvalidParameter("A must hold n/2 girls"));
    }
    let total = BigInt::from(binomial(n, n / 2));
    let mut before = 0;
    let mut after = n / 2;
    let mut out = Vec::with_capacity(n);
    for (i, &red) in in_a.iter().enumerate() {
        if red {
            after -= 1;
        }
        let ways = binomial(i, before) * binomial(n - i - 1, after);
        out.push(BigRational::new(BigInt::from(ways), total.clone()));
        if red {
            before += 1;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryOptimum {
    pub n: usize,
    /// `max_A sum_i Pr(E_i)`.
    pub value: BigRational,
    /// The lexicographically first optimal `A`, as girl indices.
    pub best: Vec<usize>,
    pub probabilities: Vec<BigRational>,
}

/// Best simple strategy by exhaustive search over all `C(n, n/2)` girl sets.
pub fn auxiliary_game_optimal(n: usize, cap: Option<usize>) -> Result<AuxiliaryOptimum> {
    require_even(n)?;
    let cap = cap.unwrap_or(AUXILIARY_CAP);
    if n > cap {
        let estimated_nodes = binomial(n, n / 2).to_u128().unwrap_or(u128::MAX);
        return Err(Error::TooLarge { n, cap, estimated_nodes });
    }
    let mut best: Option<AuxiliaryOptimum> = None;
    let mut a: Vec<usize> = (1..=n / 2).collect();
    loop {
        let mut in_a = vec![false; n];
        for &g in &a {
            in_a[g - 1] = true;
        }
        let probabilities = event_probabilities(&in_a)?;
        let value: BigRational = probabilities.iter().sum();
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(AuxiliaryOptimum { n, value, best: a.clone(), probabilities });
        }
        if !next_combination(&mut a, n) {
            break;
        }
    }
    best.ok_or(Error::InvalidParameter("n must be even and positive"))
}

/// Advances a sorted `k`-subset of `1..=n` in lexicographic order.
fn next_combination(a: &mut [usize], n: usize) -> bool {
    let k = a.len();
    for i in (0..k).rev() {
        if a[i] < n - (k - 1 - i) {
            a[i] += 1;
            for j in i + 1..k {
                a[j] = a[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Plays the auxiliary game with girl set `a` once and counts satisfied pairs.
pub fn play_auxiliary_game(n: usize, a: &[usize], rng: &mut dyn RngCore) -> Result<usize> {
    require_even(n)?;
    let mut in_a = vec![false; n];
    for &g in a {
        if g == 0 || g > n || in_a[g - 1] {
            return Err(Error::InvalidParameter("A must hold n/2 distinct girls"));
        }
        in_a[g - 1] = true;
    }
    if a.len() != n / 2 {
        return Err(Error::InvalidParameter("A must hold n/2 distinct girls"));
    }
    let mut red = vec![false; n];
    for b in index::sample(rng, n, n / 2) {
        red[b] = true;
    }
    let mut red_girls = (1..=n).filter(|&g| in_a[g - 1]);
    let mut white_girls = (1..=n).filter(|&g| !in_a[g - 1]);
    let mut pairs = Vec::with_capacity(n);
    for b in 1..=n {
        let g = if red[b - 1] { red_girls.next() } else { white_girls.next() };
        pairs.push((b, g.expect("halves have equal size")));
    }
    let instance = Instance::balanced(n)?;
    let matching = Matching::from_pairs(n, n, &pairs)?;
    Ok(satisfaction(&instance, &matching)?.satisfied_pairs.len())
}
