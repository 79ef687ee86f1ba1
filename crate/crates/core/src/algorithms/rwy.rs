//! The red/white/yellow policy for satisfying boys in balanced instances.
//!
//! Each run draws `n` i.i.d. colors (red and white with probability `a`
//! each, yellow otherwise) and treats the first `R` arrivals as red, the next
//! `W` as white and the rest as yellow:
//!
//! * red boys take the `R` least preferred girls in arrival order and serve as
//!   a yardstick;
//! * a white boy of red-rank `k` takes `g_{k-r}` when `k > r` and she is free,
//!   otherwise the least preferred free girl;
//! * a yellow boy takes the most preferred free girl `g_i` with `i >= k - r`.
//!
//! `r` is `ceil(delta * n / 4)` in the high-probability variant and `0` in
//! the per-boy variant. A catastrophe does not halt the run: it is recorded and
//! every remaining boy goes to the least preferred free girl.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::online::{
    Action, ArrivalEvent, Catastrophe, FreeGirls, OnlinePolicy, PolicyDiagnostics, RwyStats,
};
use crate::order::MarkedOrder;
use crate::{Error, Result};

/// Which rank offset `r` the policy uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankOffset {
    /// `r = ceil(delta * n / 4)`.
    Shifted,
    /// `r = 0`.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RwyParams {
    gamma: f64,
    offset: RankOffset,
}

impl RwyParams {
    pub fn new(gamma: f64, offset: RankOffset) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 0.2) {
            return Err(Error::InvalidParameter("gamma must lie in (0, 1/5)"));
        }
        Ok(RwyParams { gamma, offset })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn offset(&self) -> RankOffset {
        self.offset
    }

    /// `delta = 1/5 - gamma`.
    pub fn delta(&self) -> f64 {
        0.2 - self.gamma
    }

    /// Red (and white) color probability `a = 2 gamma + delta`.
    pub fn a(&self) -> f64 {
        2.0 * self.gamma + self.delta()
    }

    pub fn r(&self, n: usize) -> usize {
        match self.offset {
            RankOffset::Zero => 0,
            RankOffset::Shifted => ceil_tolerant(self.delta() * n as f64 / 4.0),
        }
    }
}

/// `ceil` that ignores representation noise such as `125.00000000000004`.
pub(crate) fn ceil_tolerant(x: f64) -> usize {
    libm::ceil(x - 1e-9 * x.abs().max(1.0)) as usize
}

/// Number of red boys better than `boy`, where `red_boys` holds the red boys'
/// true indices sorted best first.
pub fn rank_of(boy: usize, red_boys: &[usize]) -> usize {
    red_boys.partition_point(|&b| b < boy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Red,
    White,
    Yellow,
}

pub struct RwyPolicy {
    n: usize,
    r: usize,
    red: usize,
    white: usize,
    r_prime: usize,
    time: usize,
    order: MarkedOrder,
    white_rank_hit: Vec<bool>,
    placed_by_rank: usize,
    catastrophe: Option<Catastrophe>,
}

impl RwyPolicy {
    /// Draws the color sequence from `rng` and prepares a run on `n x n`.
    pub fn new(n: usize, params: RwyParams, rng: &mut dyn RngCore) -> Self {
        let a = params.a();
        let (mut red, mut white) = (0, 0);
        for _ in 0..n {
            let u: f64 = rng.random();
            if u < a {
                red += 1;
            } else if u < 2.0 * a {
                white += 1;
            }
        }
        Self::with_colors(n, params, red, white)
    }

    /// A run with a fixed realization `(R, W, n - R - W)`.
    pub fn with_colors(n: usize, params: RwyParams, red: usize, white: usize) -> Self {
        assert!(red + white <= n);
        let r = params.r(n);
        let cut = ceil_tolerant((params.a() - params.delta() / 4.0) * n as f64);
        let catastrophe = (2 * red > n + r).then_some(Catastrophe::TypeI);
        RwyPolicy {
            n,
            r,
            red,
            white,
            r_prime: red.min(cut),
            time: 0,
            order: MarkedOrder::new(),
            white_rank_hit: vec![false; red + 1],
            placed_by_rank: 0,
            catastrophe,
        }
    }

    pub fn colors(&self) -> (usize, usize, usize) {
        (self.red, self.white, self.n - self.red - self.white)
    }

    pub fn offset(&self) -> usize {
        self.r
    }

    pub fn phase(&self) -> Phase {
        if self.time < self.red {
            Phase::Red
        } else if self.time < self.red + self.white {
            Phase::White
        } else {
            Phase::Yellow
        }
    }

    fn fallback(&mut self, kind: Catastrophe, free: &FreeGirls) -> Action {
        self.catastrophe.get_or_insert(kind);
        free.least_preferred().map_or(Action::Skip, Action::Match)
    }
}

impl OnlinePolicy for RwyPolicy {
    fn decide(&mut self, event: &ArrivalEvent, free: &FreeGirls, _: &mut dyn RngCore) -> Action {
        let phase = self.phase();
        self.time += 1;
        let t = self.time;
        let pos = event.relative_rank - 1;
        let rank = self.order.marked_before(pos);
        self.order.insert(pos, phase == Phase::Red);

        if self.catastrophe.is_some() {
            return free.least_preferred().map_or(Action::Skip, Action::Match);
        }
        match phase {
            Phase::Red => Action::Match(self.n + 1 - t),
            Phase::White => {
                self.white_rank_hit[rank] = true;
                if rank > self.r && free.is_free(rank - self.r) {
                    self.placed_by_rank += 1;
                    return Action::Match(rank - self.r);
                }
                let Some(g) = free.least_preferred() else {
                    return Action::Skip;
                };
                if g + self.r <= self.red {
                    self.catastrophe = Some(Catastrophe::TypeII);
                }
                Action::Match(g)
            }
            Phase::Yellow => {
                let lowest = rank.saturating_sub(self.r).max(1);
                match free.most_preferred_from(lowest) {
                    Some(g) => Action::Match(g),
                    None => self.fallback(Catastrophe::TypeIII, free),
                }
            }
        }
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        let missed = (1..=self.r_prime).filter(|&k| !self.white_rank_hit[k]).count();
        let (red, white, yellow) = self.colors();
        PolicyDiagnostics {
            catastrophe: self.catastrophe,
            rwy: Some(RwyStats {
                red,
                white,
                yellow,
                offset: self.r,
                placed_by_rank: self.placed_by_rank,
                missed_ranks: missed,
            }),
            ..Default::default()
        }
    }
}
