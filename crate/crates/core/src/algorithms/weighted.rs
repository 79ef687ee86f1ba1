use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::reduction::GirlsReduction;
use crate::online::{
    Action, ArrivalEvent, FreeGirls, OnlinePolicy, PolicyDiagnostics, PolicyFactory, PublicInfo,
    WeightClassStats,
};
use crate::{Error, Result};

/// Partition of the `n` heaviest girls into classes
/// `C_i = { g : w* / 2^i < w(g) <= w* / 2^(i-1) }` for `i = 1..=k`,
/// `k = ceil(log2 n) + 1`. Girls lighter than `w* / 2^k` fall outside every class.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightClasses {
    /// Members of each class in preference order; `classes[i - 1]` is `C_i`.
    pub classes: Vec<Vec<usize>>,
    pub class_weights: Vec<f64>,
    pub heaviest_weight: f64,
    /// `w(H_G)`.
    pub total_weight: f64,
}

impl WeightClasses {
    /// `weights[g - 1]` is the weight of girl `g`; `n` is the size of `H_G`.
    pub fn new(weights: &[f64], n: usize) -> Self {
        let mut by_weight: Vec<usize> = (1..=weights.len()).collect();
        by_weight.sort_by(|&a, &b| weights[b - 1].total_cmp(&weights[a - 1]));
        by_weight.truncate(n);
        let w_star = by_weight.first().map_or(0.0, |&g| weights[g - 1]);
        let k = class_count(n);
        let mut classes = vec![Vec::new(); k];
        let mut class_weights = vec![0.0; k];
        let mut total = 0.0;
        for &g in &by_weight {
            let w = weights[g - 1];
            total += w;
            let mut i = 1;
            let mut bound = w_star / 2.0;
            while w <= bound && i <= k {
                i += 1;
                bound /= 2.0;
            }
            if i <= k {
                classes[i - 1].push(g);
                class_weights[i - 1] += w;
            }
        }
        for c in &mut classes {
            c.sort_unstable();
        }
        WeightClasses { classes, class_weights, heaviest_weight: w_star, total_weight: total }
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// Index `i*` (1-based) of the heaviest class, the lowest index on ties.
    pub fn best_class(&self) -> usize {
        let mut best = 0;
        for i in 1..self.class_weights.len() {
            if self.class_weights[i] > self.class_weights[best] {
                best = i;
            }
        }
        best + 1
    }

    /// `w(C_1 ∪ ... ∪ C_k)`.
    pub fn covered_weight(&self) -> f64 {
        self.class_weights.iter().sum()
    }
}

/// `ceil(log2 n) + 1`.
pub fn class_count(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k + 1
}

/// Weighted-girls policy: satisfy girls of the heaviest weight class.
///
/// The girls of `C_{i*}` (in preference order) face all boys through the
/// girl-side reduction with `inner` as the balanced policy. Boys the reduction
/// leaves unmatched take the most preferred free girl outside the class.
pub struct WeightedGirls {
    class: Vec<usize>,
    pool: FreeGirls,
    inner: Box<dyn OnlinePolicy>,
    others: Vec<usize>,
    next_other: usize,
    stats: WeightClassStats,
}

impl WeightedGirls {
    pub fn build(
        info: &PublicInfo,
        inner: &dyn PolicyFactory,
        rng: &mut dyn RngCore,
    ) -> Result<Box<dyn OnlinePolicy>> {
        let weights = info.girl_weights.as_deref().ok_or(Error::MissingWeights("girl"))?;
        let n = info.num_girls.min(info.num_boys);
        let wc = WeightClasses::new(weights, n);
        let best = wc.best_class();
        let class = wc.classes[best - 1].clone();
        let sub = PublicInfo::plain(class.len(), info.num_boys);
        let policy = GirlsReduction::build(&sub, inner, rng)?;
        let mut in_class = vec![false; info.num_girls];
        for &g in &class {
            in_class[g - 1] = true;
        }
        let others = (1..=info.num_girls).filter(|&g| !in_class[g - 1]).collect();
        Ok(Box::new(WeightedGirls {
            pool: FreeGirls::all(class.len()),
            stats: WeightClassStats {
                class_index: best,
                class_size: class.len(),
                class_weight: wc.class_weights[best - 1],
                covered_weight: wc.covered_weight(),
            },
            class,
            inner: policy,
            others,
            next_other: 0,
        }))
    }
}

impl OnlinePolicy for WeightedGirls {
    fn decide(&mut self, event: &ArrivalEvent, _: &FreeGirls, rng: &mut dyn RngCore) -> Action {
        match self.inner.decide(event, &self.pool, rng) {
            Action::Match(i) if self.pool.take(i) => Action::Match(self.class[i - 1]),
            Action::Match(_) => Action::Match(0),
            Action::Skip => match self.others.get(self.next_other) {
                Some(&g) => {
                    self.next_other += 1;
                    Action::Match(g)
                }
                None => Action::Skip,
            },
        }
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics { weight_class: Some(self.stats), ..Default::default() }
            .or(self.inner.diagnostics())
    }
}
