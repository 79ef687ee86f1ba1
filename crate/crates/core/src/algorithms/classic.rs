use rand::RngCore;

use crate::online::{Action, ArrivalEvent, FreeGirls, OnlinePolicy};

/// `floor(n / e)`, the observation window of the classic stopping rule.
pub fn secretary_threshold(n: usize) -> usize {
    libm::floor(n as f64 / core::f64::consts::E) as usize
}

/// Classic secretary rule for a single designated girl: watch the first
/// `floor(n / e)` boys, then give her to the first boy who beats all of them.
#[derive(Clone, Debug)]
pub struct ClassicSecretary {
    boys: usize,
    threshold: usize,
    girl: usize,
    force_last: bool,
    done: bool,
}

impl ClassicSecretary {
    pub fn new(boys: usize, girl: usize) -> Self {
        ClassicSecretary { boys, threshold: secretary_threshold(boys), girl, force_last: false, done: false }
    }

    /// If nobody qualified, hand the girl to the last boy.
    pub fn force_last(mut self, yes: bool) -> Self {
        self.force_last = yes;
        self
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }
}

impl OnlinePolicy for ClassicSecretary {
    fn decide(&mut self, event: &ArrivalEvent, free: &FreeGirls, _: &mut dyn RngCore) -> Action {
        if self.done || !free.is_free(self.girl) {
            return Action::Skip;
        }
        let qualifies = event.time > self.threshold && event.relative_rank == 1;
        if qualifies || (self.force_last && event.time == self.boys) {
            self.done = true;
            return Action::Match(self.girl);
        }
        Action::Skip
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::online::run_online_with;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn winner(perm: &[usize], force: bool) -> Option<usize> {
        let inst = Instance::new(1, perm.len()).unwrap();
        let mut p = ClassicSecretary::new(perm.len(), 1).force_last(force);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = run_online_with(&inst, perm, &mut p, &mut rng).unwrap();
        trace.final_matching.boy_of(1)
    }

    #[test]
    fn thresholds() {
        assert_eq!(secretary_threshold(1), 0);
        assert_eq!(secretary_threshold(2), 0);
        assert_eq!(secretary_threshold(3), 1);
        assert_eq!(secretary_threshold(1000), 367);
    }

    #[test]
    fn single_boy_is_taken() {
        assert_eq!(winner(&[1], false), Some(1));
    }

    #[test]
    fn two_boys_take_first_arrival() {
        // success iff the best boy arrives first: 1 of 2 orders
        assert_eq!(winner(&[1, 2], false), Some(1));
        assert_eq!(winner(&[2, 1], false), Some(2));
    }

    #[test]
    fn force_last_when_nobody_qualifies() {
        // n = 3, threshold 1: the best boy came first, nobody beats him later
        assert_eq!(winner(&[1, 2, 3], false), None);
        assert_eq!(winner(&[1, 2, 3], true), Some(3));
        assert_eq!(winner(&[3, 1, 2], false), Some(1));
    }
}
