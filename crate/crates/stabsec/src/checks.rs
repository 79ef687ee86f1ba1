//! Acceptance checks, one report per criterion, grouped into named suites.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabsec_core::algorithms::PolicySpec;
use stabsec_core::analysis::{
    adversarial_recursion, asymptotic_anchor, auxiliary_game_bound, deterministic_adversary_attack,
    good_event_exact, optimal_online_value, DpCriterion, DpDistribution,
};
use stabsec_core::online::run_online;
use stabsec_core::{
    evaluate_satisfaction, satisfaction, stable_matching, transpose_matching, Criterion, Instance, Matching,
};

use crate::experiment::{prepare, run_experiment, ExperimentConfig};
use crate::formats::WeightsSpec;
use crate::HarnessError;

/// One measured quantity against its requirement.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub required: String,
    pub pass: bool,
}

impl Check {
    fn new(
        name: impl Into<String>,
        measured: impl Into<String>,
        required: impl Into<String>,
        pass: bool,
    ) -> Self {
        Check { name: name.into(), measured: measured.into(), required: required.into(), pass }
    }
}

/// The checks of one acceptance criterion and its runtime budget.
#[derive(Clone, Debug)]
pub struct Report {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Report {
    pub fn within_time(&self) -> bool {
        self.elapsed <= self.limit
    }

    pub fn passed(&self) -> bool {
        self.within_time() && self.checks.iter().all(|c| c.pass)
    }

    /// One line per check plus a runtime line.
    pub fn lines(&self) -> Vec<String> {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{} [{}] {}: {} | measured {} | required {}",
                    verdict(c.pass),
                    self.id,
                    self.title,
                    c.name,
                    c.measured,
                    c.required
                )
            })
            .collect();
        out.push(format!(
            "{} [{}] {}: runtime | measured {:.2} s | required <= {} s",
            verdict(self.within_time()),
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        ));
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

type Body = fn() -> Result<Vec<Check>, HarnessError>;

fn timed(id: &'static str, title: &'static str, limit_secs: u64, body: Body) -> Result<Report, HarnessError> {
    let start = Instant::now();
    let checks = body()?;
    Ok(Report { id, title, checks, elapsed: start.elapsed(), limit: Duration::from_secs(limit_secs) })
}

/// Suites accepted by [`run_suite`].
pub const SUITES: [&str; 5] = ["core-oracles", "rwy-guarantee", "adversarial-exact", "bounds", "all"];

/// Criterion ids per suite.
pub fn suite_members(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "core-oracles" => &["1", "2"],
        "rwy-guarantee" => &["3", "4", "5", "6", "11", "12"],
        "adversarial-exact" => &["8", "9"],
        "bounds" => &["7", "10", "10-anchor"],
        "all" => &["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "10-anchor", "11", "12"],
        _ => return None,
    })
}

pub fn run_criterion(id: &str) -> Result<Report, HarnessError> {
    match id {
        "1" => criterion_1(),
        "2" => criterion_2(),
        "3" => criterion_3(),
        "4" => criterion_4(),
        "5" => criterion_5(),
        "6" => criterion_6(),
        "7" => criterion_7(),
        "8" => criterion_8(),
        "9" => criterion_9(),
        "10" => criterion_10(),
        "10-anchor" => criterion_10_anchor(),
        "11" => criterion_11(),
        "12" => criterion_12(),
        _ => Err(HarnessError::Config(format!("unknown criterion {id:?}"))),
    }
}

/// Runs a suite, calling `each` as every report completes.
pub fn run_suite(name: &str, mut each: impl FnMut(&Report)) -> Result<Vec<Report>, HarnessError> {
    let members = suite_members(name).ok_or_else(|| {
        HarnessError::Config(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", ")))
    })?;
    let mut reports = Vec::with_capacity(members.len());
    for id in members {
        let r = run_criterion(id)?;
        each(&r);
        reports.push(r);
    }
    Ok(reports)
}

/// Blocking pairs by enumerating every (girl, boy) pair; unmatched ranks below everyone.
fn definitional_blocking(num_girls: usize, num_boys: usize, m: &Matching) -> Vec<(usize, usize)> {
    let rank = |x: Option<usize>| x.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for g in 1..=num_girls {
        for b in 1..=num_boys {
            if m.girl_of(b) != Some(g) && b < rank(m.boy_of(g)) && g < rank(m.girl_of(b)) {
                out.push((g, b));
            }
        }
    }
    out
}

fn random_matching(num_girls: usize, num_boys: usize, rng: &mut ChaCha8Rng) -> Matching {
    let density: f64 = rng.random();
    let mut girls: Vec<usize> = (1..=num_girls).collect();
    girls.shuffle(rng);
    let mut boys: Vec<usize> = (1..=num_boys).collect();
    boys.shuffle(rng);
    let pairs: Vec<(usize, usize)> =
        boys.into_iter().zip(girls).filter(|_| rng.random::<f64>() < density).collect();
    Matching::from_pairs(num_girls, num_boys, &pairs).expect("disjoint pairs")
}

fn ratio_check(name: &str, agree: usize, total: usize) -> Check {
    Check::new(name, format!("{agree}/{total} agree"), format!("{total}/{total}"), agree == total)
}

fn criterion_1() -> Result<Report, HarnessError> {
    timed("1", "oracle equivalence", 5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cases = 1000;
        let mut agree = 0;
        for _ in 0..cases {
            let num_girls = rng.random_range(1..=20);
            let num_boys = rng.random_range(1..=20);
            let gw: Vec<f64> = (0..num_girls).map(|_| rng.random_range(0.1..10.0)).collect();
            let bw: Vec<f64> = (0..num_boys).map(|_| rng.random_range(0.1..10.0)).collect();
            let inst = Instance::new(num_girls, num_boys)?
                .with_girl_weights(gw.clone())?
                .with_boy_weights(bw.clone())?;
            let m = random_matching(num_girls, num_boys, &mut rng);
            let blocking = definitional_blocking(num_girls, num_boys, &m);
            let girls: Vec<usize> = (1..=num_girls)
                .filter(|&g| m.boy_of(g).is_some() && blocking.iter().all(|&(x, _)| x != g))
                .collect();
            let boys: Vec<usize> = (1..=num_boys)
                .filter(|&b| m.girl_of(b).is_some() && blocking.iter().all(|&(_, y)| y != b))
                .collect();
            let pairs: Vec<(usize, usize)> = girls
                .iter()
                .map(|&g| (g, m.boy_of(g).expect("satisfied girls are matched")))
                .filter(|(_, b)| boys.contains(b))
                .collect();
            let girl_w: f64 = girls.iter().map(|&g| gw[g - 1]).sum();
            let boy_w: f64 = boys.iter().map(|&b| bw[b - 1]).sum();

            let report = evaluate_satisfaction(&inst, &m)?;
            let mut got = report.blocking_pairs.clone();
            got.sort_unstable();
            let s = &report.satisfaction;
            if got == blocking
                && s.satisfied_girls == girls
                && s.satisfied_boys == boys
                && s.satisfied_pairs == pairs
                && (s.satisfied_girl_weight - girl_w).abs() < 1e-9
                && (s.satisfied_boy_weight - boy_w).abs() < 1e-9
            {
                agree += 1;
            }
        }
        Ok(vec![ratio_check("blocking pairs, satisfied sets and weights vs enumeration", agree, cases)])
    })
}

fn criterion_2() -> Result<Report, HarnessError> {
    timed("2", "stability oracle", 5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cases = 500;
        let mut agree = 0;
        for _ in 0..cases {
            let num_girls = rng.random_range(1..=200);
            let num_boys = rng.random_range(1..=200);
            let inst = Instance::new(num_girls, num_boys)?;
            let m = stable_matching(&inst);
            let s = satisfaction(&inst, &m)?;
            if definitional_blocking(num_girls, num_boys, &m).is_empty()
                && s.satisfied_pairs.len() == num_girls.min(num_boys)
            {
                agree += 1;
            }
        }
        Ok(vec![ratio_check("no blocking pair and min(|G|, |B|) satisfied pairs", agree, cases)])
    })
}

fn criterion_3() -> Result<Report, HarnessError> {
    timed("3", "classic secretary", 60, || {
        let config = ExperimentConfig::new("classic", Criterion::Girls, 1000, 100_000, 3);
        let out = run_experiment(&config)?;
        let target = (-1.0f64).exp();
        let freq = out.summary.mean_sat_girls;
        Ok(vec![Check::new(
            "success frequency, n = 1000, 100000 trials",
            format!("{freq:.5}"),
            format!("within 0.01 of 1/e = {target:.5}"),
            (freq - target).abs() <= 0.01,
        )])
    })
}

/// Fraction of trials reaching `threshold` and the 5% quantile of the count over `n`.
fn guarantee_check(policy: &str, criterion: Criterion, seed: u64) -> Result<Check, HarnessError> {
    let n = 10_000;
    let config = ExperimentConfig::new(policy, criterion, n, 200, seed).with_gamma(0.15);
    let out = run_experiment(&config)?;
    let threshold = 0.15 * n as f64;
    let counts: Vec<f64> = out
        .records
        .iter()
        .map(|r| if criterion == Criterion::Girls { r.sat_girls } else { r.sat_boys } as f64)
        .collect();
    let freq = crate::stats::frequency(&counts, |&c| c >= threshold);
    let p5 = crate::stats::quantile(&counts, 0.05) / n as f64;
    let side = if criterion == Criterion::Girls { "girls" } else { "boys" };
    Ok(Check::new(
        format!("{policy}: trials with >= 0.15 n satisfied {side}, n = 10000, gamma = 0.15, 200 trials"),
        format!(
            "{freq:.3} (5% quantile of satisfied/n = {p5:.4}, catastrophe rate {:.3})",
            out.summary.catastrophe_rate
        ),
        ">= 0.95",
        freq >= 0.95,
    ))
}

fn criterion_4() -> Result<Report, HarnessError> {
    timed("4", "rwy guarantee", 300, || Ok(vec![guarantee_check("rwy", Criterion::Boys, 4)?]))
}

fn criterion_5() -> Result<Report, HarnessError> {
    timed("5", "girls via transposition", 300, || {
        let mut checks = vec![guarantee_check("girls", Criterion::Girls, 5)?];
        let n = 8;
        let inst = Instance::balanced(n)?;
        let girls: PolicySpec = "girls".parse()?;
        let rwy: PolicySpec = "rwy".parse()?;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut perm: Vec<usize> = (1..=n).collect();
        let cases = 10_000;
        let mut agree = 0;
        for seed in 0..cases as u64 {
            perm.shuffle(&mut rng);
            let mirrored: Vec<usize> = perm.iter().map(|&b| n + 1 - b).collect();
            let a = run_online(&inst, &perm, &girls, seed)?;
            let b = run_online(&inst, &mirrored, &rwy, seed)?;
            let sa = satisfaction(&inst, &a.final_matching)?;
            let sb = satisfaction(&inst, &b.final_matching)?;
            if sa.satisfied_girls.len() == sb.satisfied_boys.len()
                && transpose_matching(&b.final_matching, &inst)? == a.final_matching
            {
                agree += 1;
            }
        }
        checks.push(ratio_check(
            "n = 8 duality: satisfied girls equal satisfied boys of rwy on the mirrored order",
            agree,
            cases,
        ));
        Ok(checks)
    })
}

fn criterion_6() -> Result<Report, HarnessError> {
    timed("6", "pairs policy", 120, || {
        let config = ExperimentConfig::new("pairs", Criterion::Pairs, 1000, 50_000, 6);
        let out = run_experiment(&config)?;
        let required = 2.0 * (-1.0f64).exp() - 0.05;
        let mean = out.summary.mean_sat_pairs;
        Ok(vec![Check::new(
            "mean satisfied pairs, n = 1000, 50000 trials",
            format!("{mean:.4}"),
            format!(">= 2/e - 0.05 = {required:.4}"),
            mean >= required,
        )])
    })
}

fn criterion_7() -> Result<Report, HarnessError> {
    timed("7", "pairs upper bound", 60, || {
        let mut bounds = Vec::new();
        for n in (2..=500).step_by(2) {
            bounds.push(auxiliary_game_bound(n)?);
        }
        let band: Vec<_> = bounds.iter().filter(|b| b.n >= 200).collect();
        let lo = band.iter().map(|b| b.ratio).fold(f64::INFINITY, f64::min);
        let hi = band.iter().map(|b| b.ratio).fold(f64::NEG_INFINITY, f64::max);
        let monotone = bounds.windows(2).all(|w| w[0].value < w[1].value);
        let mut checks = vec![
            Check::new(
                "bound(n) / sqrt(n pi / 2) over even 200 <= n <= 500",
                format!("[{lo:.4}, {hi:.4}]"),
                "within [0.8, 1.2]",
                (0.8..=1.2).contains(&lo) && (0.8..=1.2).contains(&hi),
            ),
            Check::new(
                "bound(n) strictly increasing over even n <= 500",
                monotone.to_string(),
                "true",
                monotone,
            ),
        ];
        let mut worst = String::new();
        let mut below = true;
        let mut margin = f64::INFINITY;
        for n in [4usize, 10, 50, 100, 200, 500] {
            let out =
                run_experiment(&ExperimentConfig::new("pairs", Criterion::Pairs, n, 2000, 7 + n as u64))?;
            let bound = bounds[n / 2 - 1].value_f64();
            let gap = bound - out.summary.mean_sat_pairs;
            if gap < margin {
                margin = gap;
                worst = format!("n = {n}: mean {:.4} vs bound {bound:.4}", out.summary.mean_sat_pairs);
            }
            below &= gap > 0.0;
        }
        checks.push(Check::new(
            "Monte Carlo pairs mean (2000 trials) below bound(n) at n in {4, 10, 50, 100, 200, 500}",
            format!("tightest {worst}"),
            "mean < bound(n) for every n",
            below,
        ));
        Ok(checks)
    })
}

fn criterion_8() -> Result<Report, HarnessError> {
    timed("8", "adversarial exact values", 600, || {
        let rec = adversarial_recursion(7, None)?;
        let mut girls_ok = true;
        let mut worst = 0.0f64;
        for n in 2..=7 {
            let v = &rec.v[n - 1];
            // v < sqrt(2n) with v >= 0
            girls_ok &= v * v < BigRational::from_integer(BigInt::from(2 * n));
            worst = worst.max(v.to_f64().unwrap_or(f64::NAN) / (2.0 * n as f64).sqrt());
        }
        let mut pairs_ok = true;
        let mut pairs_max = 0.0f64;
        for n in 2..=6 {
            let r = optimal_online_value(n, &DpDistribution::half(n), DpCriterion::Pairs, None)?;
            pairs_ok &= r.value <= BigRational::one();
            pairs_max = pairs_max.max(r.value.to_f64().unwrap_or(f64::NAN));
        }
        let steps_ok = rec.steps.iter().all(|s| s.step_bound);
        Ok(vec![
            Check::new(
                "Girls value under recursion-built D vs sqrt(2n), 2 <= n <= 7 (exact)",
                format!(
                    "max v_n / sqrt(2n) = {worst:.4}, v_7 = {:.4}",
                    rec.v[6].to_f64().unwrap_or(f64::NAN)
                ),
                "v_n < sqrt(2n) for every n",
                girls_ok,
            ),
            Check::new(
                "Pairs value under D(1/2, ..., 1/2), 2 <= n <= 6 (exact)",
                format!("max {pairs_max:.4}"),
                "<= 1 for every n",
                pairs_ok,
            ),
            Check::new(
                "v_(k+1) <= v_k + 1/(1 + v_k) at every step to k = 7",
                format!("{}/{} steps", rec.steps.iter().filter(|s| s.step_bound).count(), rec.steps.len()),
                "every step",
                steps_ok,
            ),
        ])
    })
}

/// Every registered policy name, for the attack.
pub const BUILT_IN_POLICIES: [&str; 9] = [
    "classic",
    "rwy",
    "rwy-r0",
    "girls",
    "pairs",
    "weighted-girls",
    "weighted-boys",
    "reduce-girls:rwy",
    "reduce-boys:girls",
];

/// The balanced instance a policy runs on in the attack: unit weights where it needs them.
pub fn attack_instance(policy: &str, n: usize) -> Result<Instance, HarnessError> {
    let spec: PolicySpec = policy.parse()?;
    let mut inst = Instance::balanced(n)?;
    if spec.needs_girl_weights() {
        inst = inst.with_girl_weights(vec![1.0; n])?;
    }
    if spec.needs_boy_weights() {
        inst = inst.with_boy_weights(vec![1.0; n])?;
    }
    Ok(inst)
}

fn criterion_9() -> Result<Report, HarnessError> {
    timed("9", "deterministic attack", 10, || {
        let mut runs = 0;
        let mut ok = 0;
        let mut most = 0;
        for policy in BUILT_IN_POLICIES {
            let spec: PolicySpec = policy.parse()?;
            for n in [5, 10, 50] {
                let inst = attack_instance(policy, n)?;
                for seed in 0..5 {
                    let out = deterministic_adversary_attack(&inst, &spec, seed)?;
                    runs += 1;
                    most = most.max(out.satisfied_girls);
                    if out.satisfied_girls <= 1 {
                        ok += 1;
                    }
                }
            }
        }
        Ok(vec![Check::new(
            "satisfied girls against the attack, 9 policies x n in {5, 10, 50} x 5 seeds",
            format!("{ok}/{runs} runs <= 1 (max {most})"),
            "<= 1 in every run",
            ok == runs,
        )])
    })
}

/// `Pr(l/5 < R <= l)` by listing every `q`-subset of ranks held by the first `q` arrivals.
fn good_event_enumerated(k: usize, l: usize) -> BigRational {
    let q = k.div_ceil(l);
    let mut hits = 0u64;
    let mut total = 0u64;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != q {
            continue;
        }
        total += 1;
        let r = mask.trailing_zeros() as usize + 1;
        if 5 * r > l && r <= l {
            hits += 1;
        }
    }
    BigRational::new(BigInt::from(hits), BigInt::from(total))
}

fn criterion_10() -> Result<Report, HarnessError> {
    timed("10", "good event", 30, || {
        let thirteenth = BigRational::new(BigInt::one(), BigInt::from(13));
        let mut checks = Vec::new();
        for (k, l) in [(10_000, 100), (100_000, 1000), (1_000_000, 1000)] {
            let p = good_event_exact(k, l)?;
            checks.push(Check::new(
                format!("exact Pr(l/5 < R <= l), k = {k}, l = {l}"),
                format!("{:.5}", p.to_f64().unwrap_or(f64::NAN)),
                "> 1/13 = 0.07692",
                p > thirteenth,
            ));
        }
        let mut cases = 0;
        let mut agree = 0;
        for k in 1..=12 {
            for l in 1..=k {
                cases += 1;
                if good_event_exact(k, l)? == good_event_enumerated(k, l) {
                    agree += 1;
                }
            }
        }
        checks.push(ratio_check("product formula vs enumeration, 1 <= l <= k <= 12", agree, cases));
        Ok(checks)
    })
}

fn criterion_10_anchor() -> Result<Report, HarnessError> {
    timed("10-anchor", "good event asymptotic anchor", 30, || {
        let p = good_event_exact(1_000_000, 1000)?.to_f64().unwrap_or(f64::NAN);
        let anchor = asymptotic_anchor();
        Ok(vec![Check::new(
            "exact Pr(l/5 < R <= l) at k = 1e6, l = 1e3 vs e^(-4/5) - e^(-1)",
            format!("{p:.5} (|diff| = {:.5})", (p - anchor).abs()),
            format!("within 0.02 of {anchor:.5}"),
            (p - anchor).abs() <= 0.02,
        )])
    })
}

/// Weighted-girls constant `c = mean satisfied weight * log2 n / w(H_G)` for one master seed.
pub fn weighted_girls_constant(n: usize, trials: usize, q: f64, seed: u64) -> Result<f64, HarnessError> {
    let config = ExperimentConfig::new("weighted-girls", Criterion::GirlWeight, n, trials, seed)
        .with_weights(WeightsSpec::Geometric(q));
    let out = run_experiment(&config)?;
    Ok(out.summary.mean_ratio * (n as f64).log2())
}

fn criterion_11() -> Result<Report, HarnessError> {
    timed("11", "weighted girls", 300, || {
        let (n, q) = (4096, 0.999);
        let c1 = weighted_girls_constant(n, 500, q, 11)?;
        let c2 = weighted_girls_constant(n, 500, q, 1011)?;
        let mid = (c1 + c2) / 2.0;
        let spread = (c1 - c2).abs() / mid;
        Ok(vec![
            Check::new(
                "c = mean satisfied girl weight * log2 n / w(H_G), n = 4096, geometric(0.999), 500 trials",
                format!("c = {c1:.4} (seed 11), {c2:.4} (seed 1011)"),
                "c > 0",
                c1 > 0.0 && c2 > 0.0,
            ),
            Check::new(
                "c stability across master seeds",
                format!("relative spread {spread:.4}"),
                "<= 0.20",
                spread <= 0.20,
            ),
        ])
    })
}

/// Per-boy satisfaction frequency of the `top` heaviest boys under `weighted-boys`
/// with `w_b = b`, heaviest first.
pub fn heavy_boy_frequencies(
    n: usize,
    trials: usize,
    top: usize,
    seed: u64,
) -> Result<Vec<f64>, HarnessError> {
    let config = ExperimentConfig::new("weighted-boys", Criterion::BoyWeight, n, trials, seed)
        .with_weights(WeightsSpec::AdversarialHeavy);
    let prepared = prepare(&config)?;
    let heavy: Vec<usize> = (n + 1 - top..=n).rev().collect();
    let hits = prepared.map_trials(|t| {
        heavy.iter().map(|b| t.satisfaction.satisfied_boys.binary_search(b).is_ok()).collect::<Vec<bool>>()
    })?;
    Ok((0..top).map(|i| hits.iter().filter(|h| h[i]).count() as f64 / trials as f64).collect())
}

fn criterion_12() -> Result<Report, HarnessError> {
    timed("12", "weighted boys", 300, || {
        let freqs = heavy_boy_frequencies(2000, 10_000, 10, 12)?;
        let p = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let p = if p.is_finite() { p } else { 0.0 };
        Ok(vec![Check::new(
            "min satisfaction frequency over the 10 heaviest boys, n = 2000, w_b = b, 10000 trials",
            format!(
                "p = {p:.4} (per boy, heaviest first: {})",
                freqs.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(" ")
            ),
            "p > 0.01",
            p > 0.01,
        )])
    })
}
