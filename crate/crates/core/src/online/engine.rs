use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arrival::check_permutation;
use crate::model::{Instance, Matching};
use crate::order::relative_ranks;
use crate::{Error, Result};

/// What the decision maker learns when boy `time` arrives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrivalEvent {
    pub time: usize,
    /// Rank among the boys arrived so far, 1 = best so far.
    pub relative_rank: usize,
    /// Revealed only when the instance carries boy weights.
    pub weight: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Match(usize),
    Skip,
}

/// Failure events of the red/white/yellow policies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Catastrophe {
    TypeI,
    TypeII,
    TypeIII,
}

impl Catastrophe {
    pub fn name(self) -> &'static str {
        match self {
            Catastrophe::TypeI => "I",
            Catastrophe::TypeII => "II",
            Catastrophe::TypeIII => "III",
        }
    }
}

/// The instance data a policy may see before any boy arrives.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicInfo {
    pub num_girls: usize,
    pub num_boys: usize,
    pub girl_weights: Option<Vec<f64>>,
    /// Whether arrivals reveal their weight.
    pub boy_weights_revealed: bool,
}

impl PublicInfo {
    pub fn of(instance: &Instance) -> Self {
        PublicInfo {
            num_girls: instance.num_girls(),
            num_boys: instance.num_boys(),
            girl_weights: instance.girl_weights().map(<[f64]>::to_vec),
            boy_weights_revealed: instance.boy_weights().is_some(),
        }
    }

    /// An unweighted `girls x boys` sub-instance.
    pub fn plain(num_girls: usize, num_boys: usize) -> Self {
        PublicInfo { num_girls, num_boys, girl_weights: None, boy_weights_revealed: false }
    }

    pub fn is_balanced(&self) -> bool {
        self.num_girls == self.num_boys
    }

    pub(crate) fn require_balanced(&self) -> Result<usize> {
        if !self.is_balanced() {
            return Err(Error::Unbalanced { girls: self.num_girls, boys: self.num_boys });
        }
        Ok(self.num_girls)
    }
}

/// The set of still unmatched girls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGirls {
    free: BTreeSet<usize>,
    total: usize,
}

impl FreeGirls {
    pub fn all(total: usize) -> Self {
        FreeGirls { free: (1..=total).collect(), total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_free(&self, girl: usize) -> bool {
        self.free.contains(&girl)
    }

    pub fn most_preferred(&self) -> Option<usize> {
        self.free.first().copied()
    }

    pub fn least_preferred(&self) -> Option<usize> {
        self.free.last().copied()
    }

    /// Most preferred free girl with index `>= girl`.
    pub fn most_preferred_from(&self, girl: usize) -> Option<usize> {
        self.free.range(girl.max(1)..).next().copied()
    }

    /// Most preferred free girl with index in `lo..=hi`.
    pub fn most_preferred_within(&self, lo: usize, hi: usize) -> Option<usize> {
        if lo > hi {
            return None;
        }
        self.free.range(lo..=hi).next().copied()
    }

    /// Marks `girl` matched; returns false if she was not free.
    pub fn take(&mut self, girl: usize) -> bool {
        self.free.remove(&girl)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.free.iter().copied()
    }
}

/// Counters of a red/white/yellow run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RwyStats {
    pub red: usize,
    pub white: usize,
    pub yellow: usize,
    pub offset: usize,
    /// Whites placed at `g_{rank - offset}`.
    pub placed_by_rank: usize,
    /// `R''`: ranks in `1..=R'` that no white boy hit.
    pub missed_ranks: usize,
}

/// Filter statistics of the unbalanced reductions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FilterStats {
    pub filter_size: usize,
    /// `|X|`: arrivals after the filter that beat the best (or heaviest) filter boy.
    pub x_size: usize,
    pub x_weight: f64,
    /// Weight of the boys forwarded to the inner policy.
    pub y_weight: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WeightClassStats {
    pub class_index: usize,
    pub class_size: usize,
    pub class_weight: f64,
    /// `w(C_1 ∪ ... ∪ C_k)`.
    pub covered_weight: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolicyDiagnostics {
    pub catastrophe: Option<Catastrophe>,
    pub rwy: Option<RwyStats>,
    pub filter: Option<FilterStats>,
    pub weight_class: Option<WeightClassStats>,
}

impl PolicyDiagnostics {
    /// Combines wrapper and inner diagnostics, keeping the wrapper's fields.
    pub fn or(self, inner: PolicyDiagnostics) -> Self {
        PolicyDiagnostics {
            catastrophe: self.catastrophe.or(inner.catastrophe),
            rwy: self.rwy.or(inner.rwy),
            filter: self.filter.or(inner.filter),
            weight_class: self.weight_class.or(inner.weight_class),
        }
    }
}

/// A decision procedure for one run.
///
/// Implementations only ever see the arrival events, the free girls and the
/// public instance data they were built with; true ranks and future arrivals
/// are never exposed. All randomness must come from the `rng` handed in.
pub trait OnlinePolicy {
    fn decide(&mut self, event: &ArrivalEvent, free: &FreeGirls, rng: &mut dyn RngCore) -> Action;

    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics::default()
    }
}

/// Builds a fresh policy for one run.
pub trait PolicyFactory: Sync {
    fn build(&self, info: &PublicInfo, rng: &mut dyn RngCore) -> Result<Box<dyn OnlinePolicy>>;

    fn name(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub time: usize,
    pub relative_rank: usize,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub decisions: Vec<Decision>,
    pub final_matching: Matching,
    pub diagnostics: PolicyDiagnostics,
    pub rng_seed: Option<u64>,
}

impl RunTrace {
    pub fn catastrophe(&self) -> Option<Catastrophe> {
        self.diagnostics.catastrophe
    }
}

/// Runs `policy` over the arrival order `permutation`.
///
/// The engine owns the free-girl set and rejects any action that reuses or
/// invents a girl.
pub fn run_online_with(
    instance: &Instance,
    permutation: &[usize],
    policy: &mut dyn OnlinePolicy,
    rng: &mut dyn RngCore,
) -> Result<RunTrace> {
    if permutation.len() != instance.num_boys() {
        return Err(Error::InvalidPermutation);
    }
    check_permutation(permutation)?;
    let ranks = relative_ranks(permutation);
    let mut free = FreeGirls::all(instance.num_girls());
    let mut matching = Matching::for_instance(instance);
    let mut decisions = Vec::with_capacity(permutation.len());
    let revealed = instance.boy_weights().is_some();
    for (i, (&boy, &relative_rank)) in permutation.iter().zip(&ranks).enumerate() {
        let time = i + 1;
        let event = ArrivalEvent { time, relative_rank, weight: revealed.then(|| instance.boy_weight(boy)) };
        let action = policy.decide(&event, &free, rng);
        if let Action::Match(girl) = action {
            if !free.take(girl) {
                return Err(Error::ProtocolViolation { time, girl });
            }
            matching.assign(boy, girl)?;
        }
        decisions.push(Decision { time, relative_rank, action });
    }
    Ok(RunTrace { decisions, final_matching: matching, diagnostics: policy.diagnostics(), rng_seed: None })
}

/// Builds a policy from `factory` and runs it with a ChaCha8 stream seeded by `seed`.
pub fn run_online(
    instance: &Instance,
    permutation: &[usize],
    factory: &dyn PolicyFactory,
    seed: u64,
) -> Result<RunTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy = factory.build(&PublicInfo::of(instance), &mut rng)?;
    let mut trace = run_online_with(instance, permutation, policy.as_mut(), &mut rng)?;
    trace.rng_seed = Some(seed);
    Ok(trace)
}

/// The two equivalent readings of a conservative run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conservativeness {
    /// The final matching has `min(|G|, |B|)` pairs.
    pub maximum_matching: bool,
    /// Every skip at time `t` left at least as many later boys as unmatched girls.
    pub skips_allowed: bool,
}

impl Conservativeness {
    pub fn holds(&self) -> bool {
        self.maximum_matching || self.skips_allowed
    }
}

pub fn conservativeness(trace: &RunTrace, instance: &Instance) -> Conservativeness {
    let maximum_matching = trace.final_matching.len() == instance.n();
    let mut unmatched = instance.num_girls();
    let mut skips_allowed = true;
    for d in &trace.decisions {
        match d.action {
            Action::Match(_) => unmatched = unmatched.saturating_sub(1),
            Action::Skip => {
                // later boys only; counting the skipped one would admit unfillable skips
                let pending = instance.num_boys() - d.time;
                if pending < unmatched {
                    skips_allowed = false;
                }
            }
        }
    }
    Conservativeness { maximum_matching, skips_allowed }
}

pub fn is_conservative(trace: &RunTrace, instance: &Instance) -> bool {
    conservativeness(trace, instance).holds()
}
