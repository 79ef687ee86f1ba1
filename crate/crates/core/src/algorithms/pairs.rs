use rand::RngCore;

use super::classic::secretary_threshold;
use crate::online::{Action, ArrivalEvent, FreeGirls, OnlinePolicy};

/// Satisfied-pairs policy: two secretary rules running side by side.
///
/// The most and least preferred girls are reserved. After the first
/// `floor(n / e)` arrivals, the first best-so-far boy gets `g_1` and the
/// first worst-so-far boy gets `g_n`. Everyone else takes the most preferred
/// free middle girl; once those run out (only at the very end) any free girl.
#[derive(Clone, Debug)]
pub struct PairsPolicy {
    n: usize,
    threshold: usize,
}

impl PairsPolicy {
    pub fn new(n: usize) -> Self {
        PairsPolicy { n, threshold: secretary_threshold(n) }
    }
}

impl OnlinePolicy for PairsPolicy {
    fn decide(&mut self, event: &ArrivalEvent, free: &FreeGirls, _: &mut dyn RngCore) -> Action {
        let n = self.n;
        if event.time > self.threshold {
            if event.relative_rank == 1 && free.is_free(1) {
                return Action::Match(1);
            }
            if event.relative_rank == event.time && free.is_free(n) {
                return Action::Match(n);
            }
        }
        free.most_preferred_within(2, n - 1)
            .or_else(|| free.most_preferred())
            .map_or(Action::Skip, Action::Match)
    }
}
