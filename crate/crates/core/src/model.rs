//! Instances, matchings and the blocking-pair / satisfaction criteria.
//!
//! All indices are 1-based and double as the true preference rank: girl `1`
//! is the most preferred girl, boy `1` the most preferred boy. An unmatched
//! individual is worse than any partner.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    num_girls: usize,
    num_boys: usize,
    girl_weights: Option<Vec<f64>>,
    boy_weights: Option<Vec<f64>>,
}

fn check_weights(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::InvalidInstance("weight vector length differs from count"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::InvalidInstance("weights must be finite and strictly positive"));
    }
    Ok(())
}

impl Instance {
    pub fn new(num_girls: usize, num_boys: usize) -> Result<Self> {
        if num_girls == 0 || num_boys == 0 {
            return Err(Error::InvalidInstance("counts must be positive"));
        }
        Ok(Instance { num_girls, num_boys, girl_weights: None, boy_weights: None })
    }

    pub fn balanced(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn with_girl_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.num_girls)?;
        self.girl_weights = Some(weights);
        Ok(self)
    }

    pub fn with_boy_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.num_boys)?;
        self.boy_weights = Some(weights);
        Ok(self)
    }

    pub fn num_girls(&self) -> usize {
        self.num_girls
    }

    pub fn num_boys(&self) -> usize {
        self.num_boys
    }

    /// Size of a stable matching, `min(|G|, |B|)`.
    pub fn n(&self) -> usize {
        self.num_girls.min(self.num_boys)
    }

    pub fn is_balanced(&self) -> bool {
        self.num_girls == self.num_boys
    }

    pub fn girl_weights(&self) -> Option<&[f64]> {
        self.girl_weights.as_deref()
    }

    pub fn boy_weights(&self) -> Option<&[f64]> {
        self.boy_weights.as_deref()
    }

    /// Weight of girl `g`, or 1 when the instance has no girl weights.
    pub fn girl_weight(&self, g: usize) -> f64 {
        self.girl_weights.as_ref().map_or(1.0, |w| w[g - 1])
    }

    pub fn boy_weight(&self, b: usize) -> f64 {
        self.boy_weights.as_ref().map_or(1.0, |w| w[b - 1])
    }

    /// `H_G`: indices of the `n` heaviest girls, ties going to the more preferred one.
    pub fn heaviest_girls(&self) -> Vec<usize> {
        heaviest(self.girl_weights.as_deref(), self.num_girls, self.n())
    }

    /// `H_B`, with the same tie rule as [`Instance::heaviest_girls`].
    pub fn heaviest_boys(&self) -> Vec<usize> {
        heaviest(self.boy_weights.as_deref(), self.num_boys, self.n())
    }
}

fn heaviest(weights: Option<&[f64]>, count: usize, take: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=count).collect();
    if let Some(w) = weights {
        // stable sort keeps lower indices first among equal weights
        idx.sort_by(|&a, &b| w[b - 1].total_cmp(&w[a - 1]));
    }
    idx.truncate(take);
    idx
}

/// A partial injective assignment of boys to girls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    girl_of_boy: Vec<Option<usize>>,
    boy_of_girl: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_girls: usize, num_boys: usize) -> Self {
        Matching { girl_of_boy: vec![None; num_boys], boy_of_girl: vec![None; num_girls] }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::empty(instance.num_girls, instance.num_boys)
    }

    /// Builds a matching from `(boy, girl)` pairs.
    pub fn from_pairs(num_girls: usize, num_boys: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(num_girls, num_boys);
        for &(boy, girl) in pairs {
            m.assign(boy, girl)?;
        }
        Ok(m)
    }

    /// Matches `boy` to `girl`; both must be in range and currently unmatched.
    pub fn assign(&mut self, boy: usize, girl: usize) -> Result<()> {
        let bad = Error::InvalidMatching { boy, girl };
        if boy == 0 || boy > self.girl_of_boy.len() || girl == 0 || girl > self.boy_of_girl.len() {
            return Err(bad);
        }
        if self.girl_of_boy[boy - 1].is_some() || self.boy_of_girl[girl - 1].is_some() {
            return Err(bad);
        }
        self.girl_of_boy[boy - 1] = Some(girl);
        self.boy_of_girl[girl - 1] = Some(boy);
        Ok(())
    }

    pub fn num_girls(&self) -> usize {
        self.boy_of_girl.len()
    }

    pub fn num_boys(&self) -> usize {
        self.girl_of_boy.len()
    }

    pub fn girl_of(&self, boy: usize) -> Option<usize> {
        self.girl_of_boy[boy - 1]
    }

    pub fn boy_of(&self, girl: usize) -> Option<usize> {
        self.boy_of_girl[girl - 1]
    }

    pub fn len(&self) -> usize {
        self.girl_of_boy.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(boy, girl)` pairs ordered by boy.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.girl_of_boy.iter().enumerate().filter_map(|(b, g)| g.map(|g| (b + 1, g)))
    }

    fn check_fits(&self, instance: &Instance) -> Result<()> {
        if self.num_girls() != instance.num_girls || self.num_boys() != instance.num_boys {
            return Err(Error::DimensionMismatch);
        }
        Ok(())
    }
}

/// Satisfied individuals and pairs of one matching.
#[derive(Clone, Debug, PartialEq)]
pub struct Satisfaction {
    pub satisfied_girls: Vec<usize>,
    pub satisfied_boys: Vec<usize>,
    /// `(girl, boy)` pairs whose both members are satisfied.
    pub satisfied_pairs: Vec<(usize, usize)>,
    pub satisfied_girl_weight: f64,
    pub satisfied_boy_weight: f64,
}

impl Satisfaction {
    /// The value this outcome scores under `criterion`.
    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Girls => self.satisfied_girls.len() as f64,
            Criterion::Boys => self.satisfied_boys.len() as f64,
            Criterion::Pairs => self.satisfied_pairs.len() as f64,
            Criterion::GirlWeight => self.satisfied_girl_weight,
            Criterion::BoyWeight => self.satisfied_boy_weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SatisfactionReport {
    /// All `(girl, boy)` blocking pairs, ordered by girl then boy.
    pub blocking_pairs: Vec<(usize, usize)>,
    pub satisfaction: Satisfaction,
}

/// Enumerates every blocking pair. Quadratic; use [`satisfaction`] when only
/// satisfied sets are needed.
pub fn blocking_pairs(instance: &Instance, matching: &Matching) -> Result<Vec<(usize, usize)>> {
    matching.check_fits(instance)?;
    let mut out = Vec::new();
    for g in 1..=instance.num_girls {
        let boy_limit = matching.boy_of(g).unwrap_or(instance.num_boys + 1);
        for b in 1..boy_limit {
            if matching.girl_of(b).is_none_or(|gb| g < gb) {
                out.push((g, b));
            }
        }
    }
    Ok(out)
}

/// Satisfied girls, boys and pairs in `O(|G| + |B|)`.
///
/// A matched girl `g` is satisfied iff every boy better than her partner is
/// matched to a girl better than `g`; symmetrically for boys.
pub fn satisfaction(instance: &Instance, matching: &Matching) -> Result<Satisfaction> {
    matching.check_fits(instance)?;
    let worst_girl_above = prefix_worst(&matching.girl_of_boy);
    let worst_boy_above = prefix_worst(&matching.boy_of_girl);

    let mut girls = Vec::new();
    let mut girl_weight = 0.0;
    for (gi, partner) in matching.boy_of_girl.iter().enumerate() {
        let g = gi + 1;
        if let Some(b) = *partner {
            if worst_girl_above[b - 1] < g {
                girls.push(g);
                girl_weight += instance.girl_weight(g);
            }
        }
    }
    let mut boys = Vec::new();
    let mut boy_weight = 0.0;
    let mut boy_ok = vec![false; instance.num_boys];
    for (bi, partner) in matching.girl_of_boy.iter().enumerate() {
        let b = bi + 1;
        if let Some(g) = *partner {
            if worst_boy_above[g - 1] < b {
                boys.push(b);
                boy_ok[bi] = true;
                boy_weight += instance.boy_weight(b);
            }
        }
    }
    let pairs = girls
        .iter()
        .filter_map(|&g| {
            let b = matching.boy_of(g)?;
            boy_ok[b - 1].then_some((g, b))
        })
        .collect();
    Ok(Satisfaction {
        satisfied_girls: girls,
        satisfied_boys: boys,
        satisfied_pairs: pairs,
        satisfied_girl_weight: girl_weight,
        satisfied_boy_weight: boy_weight,
    })
}

/// `out[i]` is the worst partner index among entries `0..i`, with unmatched
/// entries counting as infinitely bad.
fn prefix_worst(partners: &[Option<usize>]) -> Vec<usize> {
    let mut out = Vec::with_capacity(partners.len());
    let mut worst = 0usize;
    for p in partners {
        out.push(worst);
        worst = worst.max(p.unwrap_or(usize::MAX));
    }
    out
}

/// Full report: the blocking pairs plus the satisfied sets.
pub fn evaluate_satisfaction(instance: &Instance, matching: &Matching) -> Result<SatisfactionReport> {
    Ok(SatisfactionReport {
        blocking_pairs: blocking_pairs(instance, matching)?,
        satisfaction: satisfaction(instance, matching)?,
    })
}

/// The assortative matching `b_i <-> g_i` for `i <= min(|G|, |B|)`.
pub fn stable_matching(instance: &Instance) -> Matching {
    let mut m = Matching::for_instance(instance);
    for i in 1..=instance.n() {
        m.girl_of_boy[i - 1] = Some(i);
        m.boy_of_girl[i - 1] = Some(i);
    }
    m
}

/// Optimization criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    Girls,
    Boys,
    Pairs,
    GirlWeight,
    BoyWeight,
}

impl Criterion {
    pub const ALL: [Criterion; 5] =
        [Criterion::Girls, Criterion::Boys, Criterion::Pairs, Criterion::GirlWeight, Criterion::BoyWeight];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Girls => "Cg",
            Criterion::Boys => "Cb",
            Criterion::Pairs => "Cp",
            Criterion::GirlWeight => "CgW",
            Criterion::BoyWeight => "CbW",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Cg" | "cg" | "girls" => Criterion::Girls,
            "Cb" | "cb" | "boys" => Criterion::Boys,
            "Cp" | "cp" | "pairs" => Criterion::Pairs,
            "CgW" | "cgw" | "girl-weight" => Criterion::GirlWeight,
            "CbW" | "cbw" | "boy-weight" => Criterion::BoyWeight,
            _ => return Err(Error::InvalidParameter("unknown criterion")),
        })
    }
}

/// Benchmark value of a stable matching under `criterion`: `n` for the
/// counting criteria, `w(H_G)` or `w(H_B)` for the weighted ones.
pub fn optimum_value(instance: &Instance, criterion: Criterion) -> Result<f64> {
    match criterion {
        Criterion::Girls | Criterion::Boys | Criterion::Pairs => Ok(instance.n() as f64),
        Criterion::GirlWeight => {
            if instance.girl_weights.is_none() {
                return Err(Error::MissingWeights("girl"));
            }
            Ok(instance.heaviest_girls().iter().map(|&g| instance.girl_weight(g)).sum())
        }
        Criterion::BoyWeight => {
            if instance.boy_weights.is_none() {
                return Err(Error::MissingWeights("boy"));
            }
            Ok(instance.heaviest_boys().iter().map(|&b| instance.boy_weight(b)).sum())
        }
    }
}

fn check_transposable(instance: &Instance) -> Result<()> {
    if !instance.is_balanced() {
        return Err(Error::Unbalanced { girls: instance.num_girls, boys: instance.num_boys });
    }
    if instance.girl_weights.is_some() || instance.boy_weights.is_some() {
        return Err(Error::Weighted);
    }
    Ok(())
}

/// The instance with both preference orders reversed. For the implicit
/// index representation this is the same shape; the reversal lives in
/// [`transpose_matching`].
pub fn transpose_instance(instance: &Instance) -> Result<Instance> {
    check_transposable(instance)?;
    Ok(instance.clone())
}

/// Maps every pair `(b, g)` to `(n + 1 - b, n + 1 - g)`.
pub fn transpose_matching(matching: &Matching, instance: &Instance) -> Result<Matching> {
    check_transposable(instance)?;
    matching.check_fits(instance)?;
    let n = instance.num_boys;
    let mut out = Matching::for_instance(instance);
    for (b, g) in matching.pairs() {
        out.assign(n + 1 - b, n + 1 - g)?;
    }
    Ok(out)
}
