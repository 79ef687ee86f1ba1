//! File formats: instances and matchings as JSON, permutations and
//! probability lists as plain text, traces as JSON lines, weight specs.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use stabsec_core::online::{Action, RunTrace};
use stabsec_core::{Instance, Matching};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub num_girls: usize,
    pub num_boys: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub girl_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boy_weights: Option<Vec<f64>>,
}

impl From<&Instance> for InstanceFile {
    fn from(i: &Instance) -> Self {
        InstanceFile {
            num_girls: i.num_girls(),
            num_boys: i.num_boys(),
            girl_weights: i.girl_weights().map(<[f64]>::to_vec),
            boy_weights: i.boy_weights().map(<[f64]>::to_vec),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = stabsec_core::Error;

    fn try_from(f: InstanceFile) -> stabsec_core::Result<Self> {
        let mut inst = Instance::new(f.num_girls, f.num_boys)?;
        if let Some(w) = f.girl_weights {
            inst = inst.with_girl_weights(w)?;
        }
        if let Some(w) = f.boy_weights {
            inst = inst.with_boy_weights(w)?;
        }
        Ok(inst)
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })
}

pub fn instance_from_json(text: &str) -> Result<Instance, HarnessError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    Ok(Instance::try_from(file)?)
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from(instance)).expect("plain data serializes")
}

pub fn read_instance(path: &Path) -> Result<Instance, HarnessError> {
    instance_from_json(&read(path)?)
}

/// A matching as `[[boy, girl], ...]`, 1-based.
pub fn matching_to_json(matching: &Matching) -> String {
    let pairs: Vec<[usize; 2]> = matching.pairs().map(|(b, g)| [b, g]).collect();
    serde_json::to_string(&pairs).expect("plain data serializes")
}

pub fn matching_from_json(text: &str, instance: &Instance) -> Result<Matching, HarnessError> {
    let pairs: Vec<[usize; 2]> = serde_json::from_str(text)?;
    let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|[b, g]| (b, g)).collect();
    Ok(Matching::from_pairs(instance.num_girls(), instance.num_boys(), &pairs)?)
}

pub fn read_matching(path: &Path, instance: &Instance) -> Result<Matching, HarnessError> {
    matching_from_json(&read(path)?, instance)
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']').filter(|t| !t.is_empty())
}

/// Boy indices separated by whitespace or commas (a JSON array also parses).
pub fn parse_permutation(text: &str) -> Result<Vec<usize>, HarnessError> {
    tokens(text).map(|t| t.parse().map_err(|_| HarnessError::Parse(format!("bad boy index {t:?}")))).collect()
}

pub fn read_permutation(path: &Path) -> Result<Vec<usize>, HarnessError> {
    parse_permutation(&read(path)?)
}

/// `p_2 .. p_n` as decimals or fractions `a/b`.
pub fn parse_probabilities(text: &str) -> Result<Vec<BigRational>, HarnessError> {
    tokens(text).map(parse_rational).collect()
}

pub fn read_probabilities(path: &Path) -> Result<Vec<BigRational>, HarnessError> {
    parse_probabilities(&read(path)?)
}

/// Exact value of `"a/b"`, `"0.125"` or `"3"`.
pub fn parse_rational(text: &str) -> Result<BigRational, HarnessError> {
    let bad = || HarnessError::Parse(format!("bad number {text:?}"));
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Writes one JSON object per decision: `{"t", "relative_rank", "action"}` with
/// `action` either `"skip"` or the girl index.
pub fn write_trace_jsonl(out: &mut impl Write, trace: &RunTrace) -> std::io::Result<()> {
    for d in &trace.decisions {
        let action = match d.action {
            Action::Skip => json!("skip"),
            Action::Match(g) => json!(g),
        };
        let line = json!({ "t": d.time, "relative_rank": d.relative_rank, "action": action });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Where weights come from.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightsSpec {
    Unit,
    /// `w_j = q^(j-1)`: heavier for more preferred individuals.
    Geometric(f64),
    /// `w_j = j`: the least preferred individuals are the heaviest.
    AdversarialHeavy,
    /// A list of numbers, one per individual in preference order.
    File(PathBuf),
}

impl WeightsSpec {
    pub fn generate(&self, count: usize) -> Result<Vec<f64>, HarnessError> {
        Ok(match self {
            WeightsSpec::Unit => vec![1.0; count],
            WeightsSpec::Geometric(q) => {
                let mut w = Vec::with_capacity(count);
                let mut x = 1.0;
                for _ in 0..count {
                    w.push(x);
                    x *= q;
                }
                w
            }
            WeightsSpec::AdversarialHeavy => (1..=count).map(|j| j as f64).collect(),
            WeightsSpec::File(path) => {
                let text = read(path)?;
                let w: Vec<f64> = tokens(&text)
                    .map(|t| t.parse().map_err(|_| HarnessError::Parse(format!("bad weight {t:?}"))))
                    .collect::<Result<_, _>>()?;
                if w.len() != count {
                    return Err(HarnessError::Config(format!(
                        "{} holds {} weights, expected {count}",
                        path.display(),
                        w.len()
                    )));
                }
                w
            }
        })
    }
}

impl FromStr for WeightsSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "unit" => return Ok(WeightsSpec::Unit),
            "adversarial-heavy" => return Ok(WeightsSpec::AdversarialHeavy),
            _ => {}
        }
        if let Some(q) = s.strip_prefix("geometric(").and_then(|r| r.strip_suffix(')')) {
            let q: f64 = q.trim().parse().map_err(|_| HarnessError::Parse(format!("bad ratio in {s:?}")))?;
            if !(q > 0.0 && q <= 1.0) {
                return Err(HarnessError::Config(format!("geometric ratio must lie in (0, 1], got {q}")));
            }
            return Ok(WeightsSpec::Geometric(q));
        }
        Ok(WeightsSpec::File(PathBuf::from(s)))
    }
}

impl fmt::Display for WeightsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightsSpec::Unit => f.write_str("unit"),
            WeightsSpec::Geometric(q) => write!(f, "geometric({q})"),
            WeightsSpec::AdversarialHeavy => f.write_str("adversarial-heavy"),
            WeightsSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// `1/2` repeated, the symmetric adversarial distribution.
pub fn half_probabilities(n: usize) -> Vec<BigRational> {
    vec![BigRational::one() / BigRational::from_integer(2.into()); n.saturating_sub(1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/3").unwrap(), BigRational::new(1.into(), 3.into()));
        assert_eq!(parse_rational("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("2").unwrap(), BigRational::from_integer(2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.1e3").is_err());
    }

    #[test]
    fn instance_round_trip() {
        let inst = Instance::new(2, 3).unwrap().with_boy_weights(vec![1.0, 2.5, 3.0]).unwrap();
        let text = instance_to_json(&inst);
        assert_eq!(text, r#"{"num_girls":2,"num_boys":3,"boy_weights":[1.0,2.5,3.0]}"#);
        assert_eq!(instance_from_json(&text).unwrap(), inst);
        assert!(instance_from_json(r#"{"num_girls":2,"num_boys":2,"girl_weights":[1.0,-1.0]}"#).is_err());
    }

    #[test]
    fn matching_round_trip() {
        let inst = Instance::balanced(3).unwrap();
        let m = matching_from_json("[[1,2],[2,1]]", &inst).unwrap();
        assert_eq!(m.girl_of(1), Some(2));
        assert_eq!(matching_to_json(&m), "[[1,2],[2,1]]");
        assert!(matching_from_json("[[1,2],[2,2]]", &inst).is_err());
    }

    #[test]
    fn permutations_and_probabilities() {
        assert_eq!(parse_permutation("3 1\n2").unwrap(), vec![3, 1, 2]);
        assert_eq!(parse_permutation("[3,1,2]").unwrap(), vec![3, 1, 2]);
        let p = parse_probabilities("1/2, 0.25\n1").unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn weight_specs() {
        assert_eq!("unit".parse::<WeightsSpec>().unwrap(), WeightsSpec::Unit);
        assert_eq!("geometric(0.5)".parse::<WeightsSpec>().unwrap(), WeightsSpec::Geometric(0.5));
        assert!("geometric(2)".parse::<WeightsSpec>().is_err());
        assert_eq!(WeightsSpec::Geometric(0.5).generate(3).unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(WeightsSpec::AdversarialHeavy.generate(3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(WeightsSpec::Geometric(0.5).to_string(), "geometric(0.5)");
    }
}
