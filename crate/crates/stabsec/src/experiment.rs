//! Seeded, parallel Monte Carlo trials of one policy on one instance shape.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use stabsec_core::algorithms::PolicySpec;
use stabsec_core::online::{
    is_conservative, run_online, sample_arrival, ArrivalProcess, PolicyFactory, PublicInfo, RunTrace,
};
use stabsec_core::{optimum_value, satisfaction, Criterion, Instance, Satisfaction};

use crate::formats::WeightsSpec;
use crate::stats;
use crate::HarnessError;

/// Fixed CSV column order.
pub const CSV_HEADER: [&str; 15] = [
    "trial",
    "seed",
    "n",
    "m",
    "policy",
    "criterion",
    "sat_girls",
    "sat_boys",
    "sat_pairs",
    "sat_girl_w",
    "sat_boy_w",
    "optimum",
    "ratio",
    "catastrophe",
    "conservative",
];

#[derive(Clone, Debug, PartialEq)]
pub enum ArrivalSpec {
    Uniform,
    /// `D(p_2, ..., p_n)`, listed from `p_2`.
    Adversarial(Vec<f64>),
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub policy: String,
    pub criterion: Criterion,
    /// Girls, or boys for `classic` (which always has a single girl).
    pub n: usize,
    /// Boys; defaults to `n`.
    pub m: Option<usize>,
    pub trials: usize,
    pub arrival: ArrivalSpec,
    pub gamma: f64,
    pub weights: Option<WeightsSpec>,
    pub master_seed: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(policy: &str, criterion: Criterion, n: usize, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            policy: policy.to_owned(),
            criterion,
            n,
            m: None,
            trials,
            arrival: ArrivalSpec::Uniform,
            gamma: stabsec_core::algorithms::DEFAULT_GAMMA,
            weights: None,
            master_seed,
            threads: None,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_weights(mut self, weights: WeightsSpec) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_arrival(mut self, arrival: ArrivalSpec) -> Self {
        self.arrival = arrival;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

/// The criterion a policy is built for.
pub fn default_criterion(spec: &PolicySpec) -> Criterion {
    match spec {
        PolicySpec::Classic { .. } | PolicySpec::Girls(_) => Criterion::Girls,
        PolicySpec::Rwy(_) => Criterion::Boys,
        PolicySpec::Pairs => Criterion::Pairs,
        PolicySpec::WeightedGirls(_) => Criterion::GirlWeight,
        PolicySpec::WeightedBoys(_) => Criterion::BoyWeight,
        PolicySpec::ReduceGirls(inner) | PolicySpec::ReduceBoys(inner) => default_criterion(inner),
    }
}

/// A validated experiment, ready to run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub spec: PolicySpec,
    pub instance: Instance,
    pub arrival: ArrivalProcess,
    pub optimum: f64,
}

/// Checks every part of the configuration and builds one policy up front, so
/// that bad combinations fail before any trial runs.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    if config.trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    if config.n == 0 {
        return Err(HarnessError::Config("n must be at least 1".into()));
    }
    let spec = PolicySpec::parse(&config.policy, config.gamma)?;
    let classic = matches!(spec, PolicySpec::Classic { .. });
    let (girls, boys) = if classic {
        if config.m.is_some() {
            return Err(HarnessError::Config("classic takes n boys and no m".into()));
        }
        (1, config.n)
    } else {
        (config.n, config.m.unwrap_or(config.n))
    };
    let mut instance = Instance::new(girls, boys)?;

    let girl_side = spec.needs_girl_weights() || config.criterion == Criterion::GirlWeight;
    let boy_side = spec.needs_boy_weights() || config.criterion == Criterion::BoyWeight;
    if let Some(w) = &config.weights {
        // with no side implied the weights describe both
        let (girl_side, boy_side) = if girl_side || boy_side { (girl_side, boy_side) } else { (true, true) };
        if girl_side {
            instance = instance.with_girl_weights(w.generate(girls)?)?;
        }
        if boy_side {
            instance = instance.with_boy_weights(w.generate(boys)?)?;
        }
    } else if girl_side || boy_side {
        return Err(HarnessError::Config(format!(
            "policy {} with criterion {} needs --weights",
            config.policy, config.criterion
        )));
    }
    let optimum = optimum_value(&instance, config.criterion)?;
    if optimum <= 0.0 {
        return Err(HarnessError::Config("benchmark value is zero".into()));
    }

    let arrival = match &config.arrival {
        ArrivalSpec::Uniform => ArrivalProcess::uniform(boys)?,
        ArrivalSpec::Adversarial(p) => ArrivalProcess::adversarial(p.clone())?,
        ArrivalSpec::Explicit(p) => ArrivalProcess::explicit(p.clone())?,
    };
    if arrival.boy_count() != boys {
        return Err(HarnessError::Config(format!(
            "arrival process covers {} boys, instance has {boys}",
            arrival.boy_count()
        )));
    }
    let mut probe = ChaCha8Rng::seed_from_u64(config.master_seed);
    spec.build(&PublicInfo::of(&instance), &mut probe)?;
    Ok(Prepared { config: config.clone(), spec, instance, arrival, optimum })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial as u64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub policy: String,
    pub criterion: String,
    pub sat_girls: usize,
    pub sat_boys: usize,
    pub sat_pairs: usize,
    pub sat_girl_w: f64,
    pub sat_boy_w: f64,
    pub optimum: f64,
    pub ratio: f64,
    pub catastrophe: String,
    pub conservative: bool,
}

/// Everything one trial produced.
pub struct TrialRun<'a> {
    pub index: usize,
    pub seed: u64,
    pub instance: &'a Instance,
    pub permutation: Vec<usize>,
    pub trace: RunTrace,
    pub satisfaction: Satisfaction,
    pub record: ExperimentRecord,
}

impl Prepared {
    fn run_trial(&self, index: usize) -> Result<TrialRun<'_>, HarnessError> {
        let seed = trial_seed(self.config.master_seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let permutation = sample_arrival(&self.arrival, &mut rng);
        let policy_seed = rng.next_u64();
        let trace = run_online(&self.instance, &permutation, &self.spec, policy_seed)?;
        let sat = satisfaction(&self.instance, &trace.final_matching)?;
        let record = ExperimentRecord {
            trial: index,
            seed,
            n: self.instance.num_girls(),
            m: self.instance.num_boys(),
            policy: self.config.policy.clone(),
            criterion: self.config.criterion.name().to_owned(),
            sat_girls: sat.satisfied_girls.len(),
            sat_boys: sat.satisfied_boys.len(),
            sat_pairs: sat.satisfied_pairs.len(),
            sat_girl_w: sat.satisfied_girl_weight,
            sat_boy_w: sat.satisfied_boy_weight,
            optimum: self.optimum,
            ratio: sat.score(self.config.criterion) / self.optimum,
            catastrophe: trace.catastrophe().map_or_else(String::new, |c| c.name().to_owned()),
            conservative: is_conservative(&trace, &self.instance),
        };
        Ok(TrialRun { index, seed, instance: &self.instance, permutation, trace, satisfaction: sat, record })
    }

    /// Runs every trial and maps it through `f`; results come back in trial order
    /// whatever the thread count.
    pub fn map_trials<T, F>(&self, f: F) -> Result<Vec<T>, HarnessError>
    where
        T: Send,
        F: Fn(TrialRun<'_>) -> T + Sync,
    {
        let work = || {
            (0..self.config.trials)
                .into_par_iter()
                .map(|i| self.run_trial(i).map(&f))
                .collect::<Result<Vec<T>, HarnessError>>()
        };
        match self.config.threads {
            Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(work),
            None => work(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub policy: String,
    pub criterion: String,
    pub n: usize,
    pub m: usize,
    pub master_seed: u64,
    pub trials: usize,
    pub optimum: f64,
    pub mean_ratio: f64,
    pub std: f64,
    /// Nearest-rank quantiles of the ratio.
    pub quantiles: Quantiles,
    pub catastrophe_rate: f64,
    pub conservative_rate: f64,
    pub mean_sat_girls: f64,
    pub mean_sat_boys: f64,
    pub mean_sat_pairs: f64,
    pub mean_sat_girl_w: f64,
    pub mean_sat_boy_w: f64,
}

impl Summary {
    pub fn of(config: &ExperimentConfig, records: &[ExperimentRecord]) -> Self {
        let col = |f: fn(&ExperimentRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
        let ratios = col(|r| r.ratio);
        let (n, m, optimum) =
            records.first().map_or((config.n, config.n, f64::NAN), |r| (r.n, r.m, r.optimum));
        Summary {
            policy: config.policy.clone(),
            criterion: config.criterion.name().to_owned(),
            n,
            m,
            master_seed: config.master_seed,
            trials: records.len(),
            optimum,
            mean_ratio: stats::mean(&ratios),
            std: stats::std_dev(&ratios),
            quantiles: Quantiles {
                p5: stats::quantile(&ratios, 0.05),
                p50: stats::quantile(&ratios, 0.5),
                p95: stats::quantile(&ratios, 0.95),
            },
            catastrophe_rate: stats::frequency(records, |r| !r.catastrophe.is_empty()),
            conservative_rate: stats::frequency(records, |r| r.conservative),
            mean_sat_girls: stats::mean(&col(|r| r.sat_girls as f64)),
            mean_sat_boys: stats::mean(&col(|r| r.sat_boys as f64)),
            mean_sat_pairs: stats::mean(&col(|r| r.sat_pairs as f64)),
            mean_sat_girl_w: stats::mean(&col(|r| r.sat_girl_w)),
            mean_sat_boy_w: stats::mean(&col(|r| r.sat_boy_w)),
        }
    }
}

pub struct ExperimentOutcome {
    pub records: Vec<ExperimentRecord>,
    pub summary: Summary,
    /// The decisions of trial 0.
    pub first_trace: RunTrace,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let prepared = prepare(config)?;
    let mut runs = prepared.map_trials(|t| {
        let trace = (t.index == 0).then_some(t.trace);
        (t.record, trace)
    })?;
    let first_trace = runs[0].1.take().expect("trial 0 keeps its trace");
    let records: Vec<ExperimentRecord> = runs.into_iter().map(|(r, _)| r).collect();
    let summary = Summary::of(config, &records);
    Ok(ExperimentOutcome { records, summary, first_trace })
}

pub fn write_csv(out: impl Write, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
