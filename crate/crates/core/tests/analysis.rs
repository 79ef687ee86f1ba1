use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabsec_core::algorithms::PolicySpec;
use stabsec_core::analysis::*;
use stabsec_core::online::{
    run_online, Action, ArrivalEvent, FreeGirls, OnlinePolicy, PolicyFactory, PublicInfo,
};
use stabsec_core::{satisfaction, Criterion, Instance, Matching};

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn int(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

fn relative_ranks(perm: &[usize]) -> Vec<usize> {
    (0..perm.len()).map(|t| 1 + perm[..t].iter().filter(|&&b| b < perm[t]).count()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (1..=n).collect();
    heap(&mut p, n, &mut out);
    out
}

fn heap(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap(p, k - 1, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        p.swap(j, k - 1);
    }
}

/// Distribution of arrival orders under D, by direct simulation of the top/bottom draws.
fn adversarial_orders(n: usize, p: &[BigRational]) -> Vec<(Vec<usize>, BigRational)> {
    let mut out = Vec::new();
    fn rec(
        p: &[BigRational],
        lo: usize,
        hi: usize,
        prefix: &mut Vec<usize>,
        prob: BigRational,
        out: &mut Vec<(Vec<usize>, BigRational)>,
    ) {
        if prob.is_zero() {
            return;
        }
        if lo == hi {
            prefix.push(lo);
            out.push((prefix.clone(), prob));
            prefix.pop();
            return;
        }
        let top = p[hi - lo - 1].clone();
        prefix.push(lo);
        rec(p, lo + 1, hi, prefix, &prob * &top, out);
        prefix.pop();
        prefix.push(hi);
        rec(p, lo, hi - 1, prefix, &prob * (BigRational::one() - top), out);
        prefix.pop();
    }
    rec(p, 1, n, &mut Vec::new(), BigRational::one(), &mut out);
    out
}

fn score(n: usize, perm: &[usize], strategy: &BTreeMap<Vec<usize>, usize>, criterion: Criterion) -> usize {
    let ranks = relative_ranks(perm);
    let mut taken = vec![false; n + 1];
    let mut pairs = Vec::new();
    for t in 0..n {
        let g = strategy[&ranks[..=t].to_vec()];
        if g > 0 && !taken[g] {
            taken[g] = true;
            pairs.push((perm[t], g));
        }
    }
    let m = Matching::from_pairs(n, n, &pairs).unwrap();
    satisfaction(&Instance::balanced(n).unwrap(), &m).unwrap().score(criterion) as usize
}

/// Best expected score over every deterministic map from observation history to action.
fn brute_force_value(n: usize, orders: &[(Vec<usize>, BigRational)], criterion: Criterion) -> BigRational {
    let mut points: Vec<Vec<usize>> = Vec::new();
    for (perm, _) in orders {
        let ranks = relative_ranks(perm);
        for t in 0..n {
            let h = ranks[..=t].to_vec();
            if !points.contains(&h) {
                points.push(h);
            }
        }
    }
    let choices = n + 1;
    let total = choices.pow(points.len() as u32);
    let mut best = BigRational::zero();
    for code in 0..total {
        let mut c = code;
        let mut strategy = BTreeMap::new();
        for h in &points {
            strategy.insert(h.clone(), c % choices);
            c /= choices;
        }
        let mut v = BigRational::zero();
        for (perm, prob) in orders {
            v += prob * int(score(n, perm, &strategy, criterion) as i64);
        }
        if v > best {
            best = v;
        }
    }
    best
}

fn crit(c: DpCriterion) -> Criterion {
    c.into()
}

#[test]
fn uniform_tree_matches_strategy_enumeration() {
    for n in 1..=3 {
        let orders: Vec<_> =
            permutations(n).into_iter().map(|p| (p, rat(1, (1..=n as i64).product()))).collect();
        for c in [DpCriterion::Girls, DpCriterion::Boys, DpCriterion::Pairs] {
            let dp = optimal_online_value(n, &DpDistribution::Uniform, c, None).unwrap();
            assert_eq!(dp.value, brute_force_value(n, &orders, crit(c)), "n={n} {c:?}");
        }
    }
}

#[test]
fn adversarial_tree_matches_strategy_enumeration() {
    let cases = [vec![], vec![rat(1, 3)], vec![rat(1, 3), rat(2, 5)], vec![rat(1, 2), rat(1, 2)]];
    for p in cases {
        let n = p.len() + 1;
        let orders = adversarial_orders(n, &p);
        let mass: BigRational = orders.iter().map(|(_, q)| q.clone()).sum();
        assert_eq!(mass, BigRational::one());
        for c in [DpCriterion::Girls, DpCriterion::Boys, DpCriterion::Pairs] {
            let dp = optimal_online_value(n, &DpDistribution::Adversarial(p.clone()), c, None).unwrap();
            assert_eq!(dp.value, brute_force_value(n, &orders, crit(c)), "p={p:?} {c:?}");
        }
    }
}

#[test]
fn strategies_are_complete_and_consistent() {
    for n in 1..=5 {
        for dist in [DpDistribution::Uniform, DpDistribution::half(n)] {
            let r = optimal_online_value(n, &dist, DpCriterion::Girls, None).unwrap();
            assert_eq!(r.leaf_mass, BigRational::one());
            assert_eq!(r.strategy_value, r.value);
            assert_eq!(r.depth(), n);
            assert!(r.value >= BigRational::zero() && r.value <= int(n as i64));
        }
    }
}

#[test]
fn half_distribution_pairs_at_most_one() {
    for n in 2..=6 {
        let r = optimal_online_value(n, &DpDistribution::half(n), DpCriterion::Pairs, None).unwrap();
        assert!(r.value <= BigRational::one(), "n={n}: {}", r.value);
        assert_eq!(r.leaf_mass, BigRational::one());
    }
}

#[test]
fn recursion_values_stay_below_sqrt_2n() {
    let rec = adversarial_recursion(7, None).unwrap();
    assert_eq!(rec.v[0], BigRational::one());
    assert_eq!(rec.p[0], rat(1, 2));
    // p_{k+1} = 1 / (1 + v_k) exactly
    for k in 1..7 {
        assert_eq!(rec.p[k - 1], BigRational::one() / (BigRational::one() + &rec.v[k - 1]));
    }
    assert!(rec.steps.iter().all(|s| s.exact));
    assert!(rec.holds(), "{:?}", rec.steps);
    // 1 + v_1 = 2 < 2 sqrt 2
    assert!(rec.steps[0].chain_bound);
    // v_7 <= sum of increments <= sqrt 14
    let v7 = &rec.v[6];
    let chain = &rec.increments[6];
    assert!(v7 <= chain);
    assert!(chain * chain <= int(14));
    // the same DP value as a direct call under the recursion's distribution
    let direct =
        optimal_online_value(7, &DpDistribution::Adversarial(rec.p.clone()), DpCriterion::Girls, None)
            .unwrap();
    assert_eq!(&direct.value, v7);
    assert!((v7 * v7) < int(14));
}

#[test]
fn uniform_optimum_dominates_every_policy() {
    let n = 6;
    let dp = optimal_online_value(n, &DpDistribution::Uniform, DpCriterion::Boys, None).unwrap();
    let bound = dp.value.to_f64().unwrap();
    let instance = Instance::balanced(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["classic", "rwy", "rwy-r0", "girls", "pairs", "reduce-girls:rwy", "reduce-boys:girls"] {
        let spec: PolicySpec = name.parse().unwrap();
        let trials = 20_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut perm: Vec<usize> = (1..=n).collect();
        for t in 0..trials {
            perm.shuffle(&mut rng);
            let trace = run_online(&instance, &perm, &spec, t).unwrap();
            let s = satisfaction(&instance, &trace.final_matching).unwrap().satisfied_boys.len() as f64;
            sum += s;
            sq += s * s;
        }
        let mean = sum / trials as f64;
        let se = ((sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!(mean - 4.0 * se <= bound, "{name}: {mean} vs {bound}");
    }
}

#[test]
fn auxiliary_bound_table() {
    assert_eq!(auxiliary_game_bound(2).unwrap().value, BigRational::one());
    let mut prev = BigRational::zero();
    for n in (2..=500).step_by(2) {
        let b = auxiliary_game_bound(n).unwrap();
        assert!(b.value > prev, "not increasing at {n}");
        if n >= 200 {
            assert!((0.8..=1.2).contains(&b.ratio), "n={n}: {}", b.ratio);
        }
        prev = b.value;
    }
    let r200 = auxiliary_game_bound(200).unwrap().ratio;
    let r500 = auxiliary_game_bound(500).unwrap().ratio;
    assert!(r500 > r200 && r500 < 1.0);
}

/// Oracle: Pr(E_i) by enumerating every red set R.
fn event_probabilities_by_enumeration(in_a: &[bool]) -> Vec<BigRational> {
    let n = in_a.len();
    let mut hits = vec![0i64; n];
    let mut sets = 0i64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        sets += 1;
        for i in 0..n {
            let r_before = (0..i).filter(|&j| mask >> j & 1 == 1).count();
            let r_after = (i + 1..n).filter(|&j| mask >> j & 1 == 1).count();
            let a_before = in_a[..i].iter().filter(|&&x| x).count();
            let a_after = in_a[i + 1..].iter().filter(|&&x| x).count();
            if r_before == a_before && r_after == a_after {
                hits[i] += 1;
            }
        }
    }
    hits.into_iter().map(|h| rat(h, sets)).collect()
}

#[test]
fn auxiliary_optimum_below_bound() {
    for n in (2..=12).step_by(2) {
        let opt = auxiliary_game_optimal(n, None).unwrap();
        let bound = auxiliary_game_bound(n).unwrap();
        assert!(opt.value <= bound.value, "n={n}");
        for p in &opt.probabilities {
            assert!(*p >= BigRational::zero() && *p <= BigRational::one());
        }
        let mut in_a = vec![false; n];
        for &g in &opt.best {
            in_a[g - 1] = true;
        }
        assert_eq!(opt.probabilities, event_probabilities_by_enumeration(&in_a));
    }
    assert!(matches!(auxiliary_game_optimal(14, None), Err(stabsec_core::Error::TooLarge { .. })));
}

#[test]
fn auxiliary_simulation_agrees_with_exact_value() {
    let n = 10;
    let opt = auxiliary_game_optimal(n, None).unwrap();
    let exact = opt.value.to_f64().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 100_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..trials {
        let s = play_auxiliary_game(n, &opt.best, &mut rng).unwrap() as f64;
        sum += s;
        sq += s * s;
    }
    let mean = sum / trials as f64;
    let se = ((sq / trials as f64 - mean * mean) / trials as f64).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} vs {exact} (se {se})");
}

#[test]
fn good_event_matches_enumeration() {
    for k in 1..=12usize {
        for l in 1..=k {
            let q = k.div_ceil(l);
            let mut hits = 0i64;
            let mut total = 0i64;
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
            assert_eq!(good_event_exact(k, l).unwrap(), rat(hits, total), "k={k} l={l}");
        }
    }
}

#[test]
fn good_event_thresholds_and_simulation() {
    let thirteenth = rat(1, 13);
    for (k, l) in [(10_000, 100), (100_000, 1_000), (1_000_000, 1_000)] {
        assert!(good_event_exact(k, l).unwrap() > thirteenth);
    }
    let exact = good_event_exact(1_000, 50).unwrap().to_f64().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mc =
        good_event_probability(1_000, 50, GoodEventMode::MonteCarlo { trials: 1_000_000 }, &mut rng).unwrap();
    assert!((mc.probability - exact).abs() <= 3.0 * mc.std_error, "{mc:?} vs {exact}");
}

/// Always hands the arrival the most preferred free girl.
struct Greedy;

impl OnlinePolicy for Greedy {
    fn decide(&mut self, _: &ArrivalEvent, free: &FreeGirls, _: &mut dyn rand::RngCore) -> Action {
        free.most_preferred().map_or(Action::Skip, Action::Match)
    }
}

impl PolicyFactory for Greedy {
    fn build(
        &self,
        _: &PublicInfo,
        _: &mut dyn rand::RngCore,
    ) -> stabsec_core::Result<Box<dyn OnlinePolicy>> {
        Ok(Box::new(Greedy))
    }

    fn name(&self) -> String {
        "greedy".into()
    }
}

#[test]
fn greedy_attack_leaves_one_girl() {
    for n in 1..=12 {
        let inst = Instance::balanced(n).unwrap();
        let out = deterministic_adversary_attack(&inst, &Greedy, 0).unwrap();
        assert_eq!(out.t_star, n);
        assert_eq!(out.satisfied_girls, 1, "n={n}");
    }
}

#[test]
fn two_boy_attack_by_hand() {
    // greedy gives g1 then g2 = g_n at time 2: permutation [2, 1]
    let inst = Instance::balanced(2).unwrap();
    let out = deterministic_adversary_attack(&inst, &Greedy, 0).unwrap();
    assert_eq!(out.permutation, vec![2, 1]);
    assert_eq!(out.trace.final_matching.girl_of(2), Some(1));
    assert_eq!(out.satisfied_girls, 1);
}

#[test]
fn attack_beats_every_builtin_policy() {
    for n in [4, 5, 10, 50] {
        let plain = Instance::balanced(n).unwrap();
        let girls_w = Instance::balanced(n).unwrap().with_girl_weights(vec![1.0; n]).unwrap();
        let boys_w = Instance::balanced(n).unwrap().with_boy_weights(vec![1.0; n]).unwrap();
        for name in [
            "classic",
            "rwy",
            "rwy-r0",
            "girls",
            "pairs",
            "reduce-girls:rwy",
            "reduce-boys:girls",
            "weighted-girls",
            "weighted-boys",
        ] {
            let spec: PolicySpec = name.parse().unwrap();
            let inst = match name {
                "weighted-girls" => &girls_w,
                "weighted-boys" => &boys_w,
                _ => &plain,
            };
            for seed in 0..5 {
                let out = deterministic_adversary_attack(inst, &spec, seed).unwrap();
                assert!(out.satisfied_girls <= 1, "{name} n={n} seed={seed}: {}", out.satisfied_girls);
            }
        }
    }
}
