//! Reductions from unbalanced instances to balanced ones.
//!
//! Both wrappers skip a prefix of "filter" boys, keep the set `X` of later
//! arrivals that beat the best filter boy (by preference for girls, by weight
//! for boys) and forward the first few members of `X` to a balanced inner
//! policy running on a local copy of its girls.

use alloc::boxed::Box;

use rand::{Rng, RngCore};

use super::classic::ClassicSecretary;
use crate::online::{
    Action, ArrivalEvent, FilterStats, FreeGirls, OnlinePolicy, PolicyDiagnostics, PolicyFactory, PublicInfo,
};
use crate::order::MarkedOrder;
use crate::Result;

/// The constant `c` of the good-event regime `c <= l <= k / c`.
pub const REGIME_CONSTANT: usize = 5;

/// Forwards boys to an inner policy over girls `offset + 1 ..= offset + len`,
/// translating girl indices through a local pool.
struct Slice {
    offset: usize,
    pool: FreeGirls,
    inner: Box<dyn OnlinePolicy>,
}

impl Slice {
    fn new(offset: usize, len: usize, inner: Box<dyn OnlinePolicy>) -> Self {
        Slice { offset, pool: FreeGirls::all(len), inner }
    }

    fn decide(&mut self, event: &ArrivalEvent, rng: &mut dyn RngCore) -> Action {
        match self.inner.decide(event, &self.pool, rng) {
            Action::Match(i) if self.pool.take(i) => Action::Match(self.offset + i),
            Action::Match(_) => Action::Match(0),
            Action::Skip => Action::Skip,
        }
    }
}

/// Passes every boy to an inner policy over the `len` most preferred girls.
struct TopGirls(Slice);

impl OnlinePolicy for TopGirls {
    fn decide(&mut self, event: &ArrivalEvent, _: &FreeGirls, rng: &mut dyn RngCore) -> Action {
        self.0.decide(event, rng)
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        self.0.inner.diagnostics()
    }
}

/// Girl-side reduction for `|G| = n` girls and `|B| = m` boys.
///
/// With `n >= m` the surplus (least preferred) girls are ignored. With
/// `n < m`, the first `ceil(m / n)` boys are filter boys; `X` holds the later
/// boys better than all of them. The `ceil(n / 5)` least preferred girls are
/// targets, matched by the inner policy to the first `ceil(n / 5)` members of
/// `X`; further members of `X` take the most preferred free non-target girl.
/// Tiny `n` falls back to the classic rule on girl 1.
pub struct GirlsReduction {
    filter: usize,
    time: usize,
    x_size: usize,
    targets: usize,
    forwarded: Slice,
    others: FreeGirls,
}

impl GirlsReduction {
    pub fn build(
        info: &PublicInfo,
        inner: &dyn PolicyFactory,
        rng: &mut dyn RngCore,
    ) -> Result<Box<dyn OnlinePolicy>> {
        let (girls, boys) = (info.num_girls, info.num_boys);
        if girls >= boys {
            let policy = inner.build(&PublicInfo::plain(boys, boys), rng)?;
            return Ok(Box::new(TopGirls(Slice::new(0, boys, policy))));
        }
        if girls < REGIME_CONSTANT {
            return Ok(Box::new(ClassicSecretary::new(boys, 1)));
        }
        // more girls than the regime supports: drop the least preferred ones
        let n = girls.min(boys / REGIME_CONSTANT);
        if n < REGIME_CONSTANT {
            return Ok(Box::new(ClassicSecretary::new(boys, 1)));
        }
        let targets = n.div_ceil(5);
        let policy = inner.build(&PublicInfo::plain(targets, targets), rng)?;
        Ok(Box::new(GirlsReduction {
            filter: boys.div_ceil(n),
            time: 0,
            x_size: 0,
            targets,
            forwarded: Slice::new(n - targets, targets, policy),
            others: FreeGirls::all(n - targets),
        }))
    }
}

impl OnlinePolicy for GirlsReduction {
    fn decide(&mut self, event: &ArrivalEvent, _: &FreeGirls, rng: &mut dyn RngCore) -> Action {
        self.time += 1;
        if self.time <= self.filter {
            return Action::Skip;
        }
        // the best filter boy currently sits at position x_size + 1
        if event.relative_rank > self.x_size + 1 {
            return Action::Skip;
        }
        self.x_size += 1;
        if self.x_size <= self.targets {
            // everyone better than a member of X is in X, so ranks carry over
            let inner_event = ArrivalEvent { time: self.x_size, ..*event };
            return self.forwarded.decide(&inner_event, rng);
        }
        match self.others.most_preferred() {
            Some(g) => {
                self.others.take(g);
                Action::Match(g)
            }
            None => Action::Skip,
        }
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics {
            filter: Some(FilterStats {
                filter_size: self.filter,
                x_size: self.x_size,
                x_weight: self.x_size as f64,
                y_weight: self.x_size.min(self.targets) as f64,
            }),
            ..Default::default()
        }
        .or(self.forwarded.inner.diagnostics())
    }
}

/// Boy-side (weighted) reduction for `|G| = n` girls and `|B| = m` boys.
///
/// With `n >= m` the least preferred surplus girls are ignored. Otherwise
/// `l = 5n`; when `l > m / 5` only the first `min(m, l)` arrivals are
/// considered. The first `ceil(k / l)` of those `k` arrivals are filter boys,
/// `X` holds later arrivals heavier than the heaviest filter boy, and the
/// first `n` members of `X` are forwarded to the inner `n x n` policy.
/// Weight ties are broken by a random key drawn at arrival.
pub struct BoysReduction {
    horizon: usize,
    filter: usize,
    time: usize,
    heaviest_filter: Option<(f64, u64)>,
    order: MarkedOrder,
    forwarded_count: usize,
    capacity: usize,
    stats: FilterStats,
    forwarded: Slice,
}

impl BoysReduction {
    pub fn build(
        info: &PublicInfo,
        inner: &dyn PolicyFactory,
        rng: &mut dyn RngCore,
    ) -> Result<Box<dyn OnlinePolicy>> {
        let (girls, boys) = (info.num_girls, info.num_boys);
        let plain =
            PublicInfo { boy_weights_revealed: info.boy_weights_revealed, ..PublicInfo::plain(boys, boys) };
        if girls >= boys {
            let policy = inner.build(&plain, rng)?;
            return Ok(Box::new(TopGirls(Slice::new(0, boys, policy))));
        }
        let n = girls;
        let l = 5 * n;
        let horizon = if l * REGIME_CONSTANT > boys { boys.min(l) } else { boys };
        let filter = horizon.div_ceil(l);
        let policy = inner.build(&PublicInfo { num_girls: n, num_boys: n, ..plain }, rng)?;
        Ok(Box::new(BoysReduction {
            horizon,
            filter,
            time: 0,
            heaviest_filter: None,
            order: MarkedOrder::new(),
            forwarded_count: 0,
            capacity: n,
            stats: FilterStats { filter_size: filter, ..Default::default() },
            forwarded: Slice::new(0, n, policy),
        }))
    }
}

impl OnlinePolicy for BoysReduction {
    fn decide(&mut self, event: &ArrivalEvent, _: &FreeGirls, rng: &mut dyn RngCore) -> Action {
        self.time += 1;
        if self.time > self.horizon {
            return Action::Skip;
        }
        let key = (event.weight.unwrap_or(1.0), rng.random::<u64>());
        let pos = event.relative_rank - 1;
        if self.time <= self.filter {
            self.order.insert(pos, false);
            if self.heaviest_filter.is_none_or(|h| key > h) {
                self.heaviest_filter = Some(key);
            }
            return Action::Skip;
        }
        let in_x = self.heaviest_filter.is_none_or(|h| key > h);
        let forward = in_x && self.forwarded_count < self.capacity;
        let rank = self.order.marked_before(pos) + 1;
        self.order.insert(pos, forward);
        if !in_x {
            return Action::Skip;
        }
        self.stats.x_size += 1;
        self.stats.x_weight += key.0;
        if !forward {
            return Action::Skip;
        }
        self.forwarded_count += 1;
        self.stats.y_weight += key.0;
        let inner_event = ArrivalEvent { time: self.forwarded_count, relative_rank: rank, ..*event };
        self.forwarded.decide(&inner_event, rng)
    }

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics { filter: Some(self.stats), ..Default::default() }
            .or(self.forwarded.inner.diagnostics())
    }
}
