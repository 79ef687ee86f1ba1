use alloc::boxed::Box;

use rand::RngCore;

use crate::online::{Action, ArrivalEvent, FreeGirls, OnlinePolicy, PolicyDiagnostics};

/// Runs a boys policy on the transposed instance to satisfy girls.
///
/// The inner policy sees the mirrored stream (relative rank `t + 1 - rank` at
/// time `t`) and a mirrored pool; its choice `i` becomes girl `n + 1 - i`.
/// By the transposition duality, satisfied boys of the inner run on the
/// mirrored arrival order are exactly the satisfied girls of this run.
pub struct Transposed {
    n: usize,
    inner: Box<dyn OnlinePolicy>,
    mirrored: FreeGirls,
}

impl Transposed {
    pub fn new(n: usize, inner: Box<dyn OnlinePolicy>) -> Self {
        Transposed { n, inner, mirrored: FreeGirls::all(n) }
    }
}

impl OnlinePolicy for Transposed {
    fn decide(&mut self, event: &ArrivalEvent, _: &FreeGirls, rng: &mut dyn RngCore) -> Action {
        let mirrored = ArrivalEvent { relative_rank: event.time + 1 - event.relative_rank, ..*event };
        match self.inner.decide(&mirrored, &self.mirrored, rng) {
            Action::Match(i) if self.mirrored.take(i) => Action::Match(self.n + 1 - i),
            // an inner protocol violation surfaces as a girl the engine rejects
            Action::Match(_) => Action::Match(0),
            Action::Skip => Action::Skip,
        }
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        self.inner.diagnostics()
    }
}
