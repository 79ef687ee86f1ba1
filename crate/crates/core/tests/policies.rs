use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabsec_core::algorithms::{
    ClassicSecretary, PolicySpec, RankOffset, RwyParams, RwyPolicy, WeightClasses,
};
use stabsec_core::online::{conservativeness, run_online, run_online_with, sample_arrival, ArrivalProcess};
use stabsec_core::*;

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    p.shuffle(rng);
    p
}

fn spec(name: &str) -> PolicySpec {
    name.parse().unwrap()
}

#[test]
fn classic_two_boys_wins_half_the_orders() {
    let inst = Instance::new(1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let wins = [[1, 2], [2, 1]]
        .iter()
        .filter(|perm| {
            let mut p = ClassicSecretary::new(2, 1);
            let t = run_online_with(&inst, &perm[..], &mut p, &mut rng).unwrap();
            t.final_matching.boy_of(1) == Some(1)
        })
        .count();
    assert_eq!(wins, 1);
}

#[test]
fn classic_success_rate_near_inverse_e() {
    let n = 200;
    let inst = Instance::new(1, n).unwrap();
    let classic = spec("classic");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 20_000;
    let wins = (0..trials)
        .filter(|&s| {
            let perm = shuffled(n, &mut rng);
            run_online(&inst, &perm, &classic, s).unwrap().final_matching.boy_of(1) == Some(1)
        })
        .count();
    let rate = wins as f64 / trials as f64;
    // 1/e, a few standard errors wide
    assert!((rate - (-1.0f64).exp()).abs() < 0.015, "{rate}");
}

#[test]
fn rwy_without_catastrophe_is_perfect_and_places_whites() {
    let n = 1_000;
    let inst = Instance::balanced(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for offset in [RankOffset::Shifted, RankOffset::Zero] {
        let params = RwyParams::new(0.15, offset).unwrap();
        let mut clean = 0;
        for _ in 0..60 {
            let perm = shuffled(n, &mut rng);
            let mut policy = RwyPolicy::new(n, params, &mut rng);
            let trace = run_online_with(&inst, &perm, &mut policy, &mut rng).unwrap();
            assert!(conservativeness(&trace, &inst).holds());
            if trace.catastrophe().is_some() {
                continue;
            }
            clean += 1;
            assert_eq!(trace.final_matching.len(), n);
            let stats = trace.diagnostics.rwy.unwrap();
            let s = satisfaction(&inst, &trace.final_matching).unwrap();
            assert!(s.satisfied_boys.len() >= stats.placed_by_rank);
        }
        assert!(clean > 30, "{offset:?}: only {clean} clean runs");
    }
}

#[test]
fn catastrophes_become_rarer_with_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rwy = spec("rwy");
    let mut rates = Vec::new();
    for (n, trials) in [(100, 1_000), (1_000, 400), (10_000, 100)] {
        let inst = Instance::balanced(n).unwrap();
        let hits = (0..trials)
            .filter(|&s| {
                let perm = shuffled(n, &mut rng);
                run_online(&inst, &perm, &rwy, s).unwrap().catastrophe().is_some()
            })
            .count();
        rates.push(hits as f64 / trials as f64);
    }
    assert!(rates[0] > rates[1] && rates[1] >= rates[2], "{rates:?}");
}

#[test]
fn surplus_girls_are_ignored() {
    let inst = Instance::new(10, 4).unwrap();
    let policy = spec("reduce-girls:rwy");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for s in 0..200 {
        let perm = shuffled(4, &mut rng);
        let m = run_online(&inst, &perm, &policy, s).unwrap().final_matching;
        assert_eq!(m.len(), 4);
        assert!((5..=10).all(|g| m.boy_of(g).is_none()));
    }
}

#[test]
fn girl_filter_event_is_common() {
    let (n, m) = (100, 10_000);
    let inst = Instance::new(n, m).unwrap();
    let policy = spec("reduce-girls:rwy");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 2_000;
    let mut good = 0;
    for s in 0..trials {
        let perm = shuffled(m, &mut rng);
        let trace = run_online(&inst, &perm, &policy, s).unwrap();
        let f = trace.diagnostics.filter.unwrap();
        assert_eq!(f.filter_size, 100);
        if 5 * f.x_size >= n && f.x_size < n {
            good += 1;
        }
    }
    assert!(good as f64 / trials as f64 > 1.0 / 13.0);
}

#[test]
fn boy_filter_event_and_weights() {
    let (n, m) = (100, 50_000);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let weights: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..100.0)).collect();
    let inst = Instance::new(n, m).unwrap().with_boy_weights(weights).unwrap();
    let heaviest: f64 = inst.heaviest_boys().iter().map(|&b| inst.boy_weight(b)).sum();
    let policy = spec("weighted-boys");
    let trials = 300;
    let (mut good, mut x_sum, mut y_sum) = (0, 0.0, 0.0);
    for s in 0..trials {
        let perm = shuffled(m, &mut rng);
        let trace = run_online(&inst, &perm, &policy, s).unwrap();
        let f = trace.diagnostics.filter.unwrap();
        if f.x_size >= n && f.x_size < 5 * n {
            good += 1;
            assert!(f.x_weight >= heaviest - 1e-6);
            x_sum += f.x_weight;
            y_sum += f.y_weight;
        }
    }
    assert!(good as f64 / trials as f64 > 1.0 / 13.0);
    // E[w(Y)] >= E[w(X)] / 5 on the good event, allowing 5%
    assert!(y_sum >= 0.95 * x_sum / 5.0, "{y_sum} vs {x_sum}");
}

#[test]
fn unit_weight_boys_run_plain_rwy_r0() {
    let n = 300;
    let plain = Instance::balanced(n).unwrap();
    let weighted = Instance::balanced(n).unwrap().with_boy_weights(vec![1.0; n]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 0..20 {
        let perm = shuffled(n, &mut rng);
        let a = run_online(&weighted, &perm, &spec("weighted-boys"), s).unwrap();
        let b = run_online(&plain, &perm, &spec("rwy-r0"), s).unwrap();
        assert_eq!(a.final_matching, b.final_matching);
        assert_eq!(a.diagnostics, b.diagnostics);
    }
}

#[test]
fn equal_girl_weights_run_the_girls_policy() {
    let n = 300;
    let plain = Instance::balanced(n).unwrap();
    let weighted = Instance::balanced(n).unwrap().with_girl_weights(vec![3.0; n]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in 0..20 {
        let perm = shuffled(n, &mut rng);
        let a = run_online(&weighted, &perm, &spec("weighted-girls"), s).unwrap();
        let b = run_online(&plain, &perm, &spec("girls"), s).unwrap();
        assert_eq!(a.final_matching, b.final_matching);
        let wc = a.diagnostics.weight_class.unwrap();
        assert_eq!((wc.class_index, wc.class_size), (1, n));
    }
}

#[test]
fn halving_girl_weights_fall_back_to_the_classic_rule() {
    let n = 1_024;
    let weights: Vec<f64> = (0..n).map(|j| 0.5f64.powi(j as i32)).collect();
    let inst = Instance::balanced(n).unwrap().with_girl_weights(weights).unwrap();
    let policy = spec("weighted-girls");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trials = 3_000;
    let mut wins = 0;
    for s in 0..trials {
        let perm = shuffled(n, &mut rng);
        let trace = run_online(&inst, &perm, &policy, s).unwrap();
        let wc = trace.diagnostics.weight_class.unwrap();
        assert_eq!((wc.class_index, wc.class_size), (1, 1));
        if trace.final_matching.boy_of(1) == Some(1) {
            wins += 1;
        }
    }
    let rate = wins as f64 / trials as f64;
    assert!((rate - (-1.0f64).exp()).abs() < 0.04, "{rate}");
}

#[test]
fn heavy_boy_is_satisfied_often() {
    let n = 1_000;
    let mut weights = vec![1.0; n];
    weights[n - 1] = 1e6;
    let inst = Instance::balanced(n).unwrap().with_boy_weights(weights).unwrap();
    let policy = spec("weighted-boys");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let trials = 2_000;
    let mut hits = 0;
    for s in 0..trials {
        let perm = shuffled(n, &mut rng);
        let trace = run_online(&inst, &perm, &policy, s).unwrap();
        let sat = satisfaction(&inst, &trace.final_matching).unwrap();
        if sat.satisfied_boys.binary_search(&n).is_ok() {
            hits += 1;
        }
    }
    assert!(hits as f64 / trials as f64 > 0.01, "{hits}");
}

#[test]
fn pairs_stay_below_the_auxiliary_bound() {
    let n = 100;
    let inst = Instance::balanced(n).unwrap();
    let pairs = spec("pairs");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 5_000;
    let total: usize = (0..trials)
        .map(|s| {
            let perm = shuffled(n, &mut rng);
            let m = run_online(&inst, &perm, &pairs, s).unwrap().final_matching;
            satisfaction(&inst, &m).unwrap().satisfied_pairs.len()
        })
        .sum();
    let mean = total as f64 / trials as f64;
    assert!(mean >= 2.0 / std::f64::consts::E - 0.1, "{mean}");
    assert!(mean <= (n as f64 * std::f64::consts::PI / 2.0).sqrt());
}

#[test]
fn adversarial_arrivals_follow_their_probabilities() {
    // D(p_2) for 2 boys: boy 1 first with probability p_2
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let process = ArrivalProcess::adversarial(vec![0.3]).unwrap();
    let trials = 100_000;
    let firsts = (0..trials).filter(|_| sample_arrival(&process, &mut rng)[0] == 1).count();
    let rate = firsts as f64 / trials as f64;
    assert!((rate - 0.3).abs() < 0.01, "{rate}");
}

proptest! {
    #[test]
    fn weight_classes_cover_half_the_benchmark(
        n in 1usize..=300,
        seed in any::<u64>(),
        spread in 0.0f64..30.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..n).map(|_| 2f64.powf(-rng.random_range(0.0..spread))).collect();
        let wc = WeightClasses::new(&weights, n);
        prop_assert!(wc.covered_weight() >= wc.total_weight / 2.0 - 1e-12);
        let best = wc.best_class();
        for w in &wc.class_weights {
            prop_assert!(*w <= wc.class_weights[best - 1]);
        }
        // every class member lies in its weight band
        for (i, class) in wc.classes.iter().enumerate() {
            let hi = wc.heaviest_weight / 2f64.powi(i as i32);
            for &g in class {
                prop_assert!(weights[g - 1] <= hi && weights[g - 1] > hi / 2.0);
            }
        }
    }

    #[test]
    fn policies_are_conservative_on_balanced_instances(n in 4usize..=60, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = Instance::balanced(n).unwrap();
        let perm = shuffled(n, &mut rng);
        for name in ["rwy", "rwy-r0", "girls", "pairs"] {
            let trace = run_online(&inst, &perm, &spec(name), seed).unwrap();
            prop_assert!(conservativeness(&trace, &inst).holds(), "{}", name);
            prop_assert_eq!(trace.final_matching.len(), n);
        }
    }
}
