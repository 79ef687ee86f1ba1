//! The matching policies and a name-based registry for them.

mod classic;
mod pairs;
mod reduction;
mod rwy;
mod transposed;
mod weighted;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use rand::RngCore;

pub use classic::{secretary_threshold, ClassicSecretary};
pub use pairs::PairsPolicy;
pub use reduction::{BoysReduction, GirlsReduction, REGIME_CONSTANT};
pub use rwy::{rank_of, Phase, RankOffset, RwyParams, RwyPolicy};
pub use transposed::Transposed;
pub use weighted::{class_count, WeightClasses, WeightedGirls};

use crate::online::{OnlinePolicy, PolicyFactory, PublicInfo};
use crate::{Error, Result};

pub const DEFAULT_GAMMA: f64 = 0.15;

/// A policy selected by name.
///
/// Names: `classic`, `rwy`, `rwy-r0`, `girls`, `pairs`, `weighted-girls`,
/// `weighted-boys`, `reduce-girls:<inner>`, `reduce-boys:<inner>`.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicySpec {
    /// Classic stopping rule for girl 1.
    Classic {
        force_last: bool,
    },
    Rwy(RwyParams),
    Girls(RwyParams),
    Pairs,
    WeightedGirls(RwyParams),
    /// RWY with zero offset, behind the boy-side reduction when unbalanced.
    WeightedBoys(RwyParams),
    ReduceGirls(Box<PolicySpec>),
    ReduceBoys(Box<PolicySpec>),
}

impl PolicySpec {
    pub fn parse(name: &str, gamma: f64) -> Result<Self> {
        let shifted = || RwyParams::new(gamma, RankOffset::Shifted);
        let zero = || RwyParams::new(gamma, RankOffset::Zero);
        if let Some(inner) = name.strip_prefix("reduce-girls:") {
            return Ok(PolicySpec::ReduceGirls(Box::new(Self::parse(inner, gamma)?)));
        }
        if let Some(inner) = name.strip_prefix("reduce-boys:") {
            return Ok(PolicySpec::ReduceBoys(Box::new(Self::parse(inner, gamma)?)));
        }
        Ok(match name {
            "classic" => PolicySpec::Classic { force_last: false },
            "rwy" => PolicySpec::Rwy(shifted()?),
            "rwy-r0" => PolicySpec::Rwy(zero()?),
            "girls" => PolicySpec::Girls(shifted()?),
            "pairs" => PolicySpec::Pairs,
            "weighted-girls" => PolicySpec::WeightedGirls(shifted()?),
            "weighted-boys" => PolicySpec::WeightedBoys(zero()?),
            _ => return Err(Error::UnknownPolicy),
        })
    }

    /// Whether the policy needs girl weights or revealed boy weights.
    pub fn needs_girl_weights(&self) -> bool {
        matches!(self, PolicySpec::WeightedGirls(_))
    }

    pub fn needs_boy_weights(&self) -> bool {
        matches!(self, PolicySpec::WeightedBoys(_))
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, DEFAULT_GAMMA)
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Classic { .. } => f.write_str("classic"),
            PolicySpec::Rwy(p) if p.offset() == RankOffset::Zero => f.write_str("rwy-r0"),
            PolicySpec::Rwy(_) => f.write_str("rwy"),
            PolicySpec::Girls(_) => f.write_str("girls"),
            PolicySpec::Pairs => f.write_str("pairs"),
            PolicySpec::WeightedGirls(_) => f.write_str("weighted-girls"),
            PolicySpec::WeightedBoys(_) => f.write_str("weighted-boys"),
            PolicySpec::ReduceGirls(inner) => write!(f, "reduce-girls:{inner}"),
            PolicySpec::ReduceBoys(inner) => write!(f, "reduce-boys:{inner}"),
        }
    }
}

impl PolicyFactory for PolicySpec {
    fn build(&self, info: &PublicInfo, rng: &mut dyn RngCore) -> Result<Box<dyn OnlinePolicy>> {
        Ok(match self {
            PolicySpec::Classic { force_last } => {
                if info.num_girls == 0 || info.num_boys == 0 {
                    return Err(Error::InvalidInstance("classic needs a girl and a boy"));
                }
                Box::new(ClassicSecretary::new(info.num_boys, 1).force_last(*force_last))
            }
            PolicySpec::Rwy(params) => {
                let n = info.require_balanced()?;
                Box::new(RwyPolicy::new(n, *params, rng))
            }
            PolicySpec::Girls(params) => {
                let n = info.require_balanced()?;
                Box::new(Transposed::new(n, Box::new(RwyPolicy::new(n, *params, rng))))
            }
            PolicySpec::Pairs => {
                let n = info.require_balanced()?;
                if n < 4 {
                    return Err(Error::InvalidParameter("pairs needs n >= 4"));
                }
                Box::new(PairsPolicy::new(n))
            }
            PolicySpec::WeightedGirls(params) => {
                WeightedGirls::build(info, &PolicySpec::Girls(*params), rng)?
            }
            PolicySpec::WeightedBoys(params) => {
                if !info.boy_weights_revealed {
                    return Err(Error::MissingWeights("boy"));
                }
                let base = PolicySpec::Rwy(*params);
                if info.is_balanced() {
                    base.build(info, rng)?
                } else {
                    BoysReduction::build(info, &base, rng)?
                }
            }
            PolicySpec::ReduceGirls(inner) => GirlsReduction::build(info, inner.as_ref(), rng)?,
            PolicySpec::ReduceBoys(inner) => BoysReduction::build(info, inner.as_ref(), rng)?,
        })
    }

    fn name(&self) -> String {
        format!("{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in [
            "classic",
            "rwy",
            "rwy-r0",
            "girls",
            "pairs",
            "weighted-girls",
            "weighted-boys",
            "reduce-girls:rwy",
            "reduce-boys:rwy-r0",
            "reduce-girls:reduce-girls:girls",
        ] {
            let spec: PolicySpec = name.parse().unwrap();
            assert_eq!(spec.name(), name);
        }
        assert_eq!("nope".parse::<PolicySpec>(), Err(Error::UnknownPolicy));
        assert!(PolicySpec::parse("rwy", 0.3).is_err());
    }

    #[test]
    fn balanced_policies_reject_unbalanced_instances() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        for name in ["rwy", "girls", "pairs"] {
            let spec: PolicySpec = name.parse().unwrap();
            assert!(matches!(spec.build(&PublicInfo::plain(3, 5), &mut rng), Err(Error::Unbalanced { .. })));
        }
        let pairs = PolicySpec::Pairs;
        assert!(pairs.build(&PublicInfo::plain(3, 3), &mut rng).is_err());
        let wg: PolicySpec = "weighted-girls".parse().unwrap();
        assert_eq!(wg.build(&PublicInfo::plain(4, 4), &mut rng).err(), Some(Error::MissingWeights("girl")));
    }
}
