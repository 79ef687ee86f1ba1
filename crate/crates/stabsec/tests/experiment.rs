use stabsec::experiment::{prepare, run_experiment, write_csv, ArrivalSpec, ExperimentConfig, CSV_HEADER};
use stabsec::{HarnessError, WeightsSpec};
use stabsec_core::Criterion;

fn csv_bytes(config: &ExperimentConfig) -> Vec<u8> {
    let out = run_experiment(config).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &out.records).unwrap();
    buf
}

#[test]
fn single_trial_reruns_give_identical_csv_bytes() {
    let config = ExperimentConfig::new("rwy", Criterion::Boys, 200, 1, 42);
    let a = csv_bytes(&config);
    assert_eq!(a, csv_bytes(&config));
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 1);
}

#[test]
fn parallel_and_sequential_runs_agree() {
    for policy in ["classic", "rwy", "girls", "pairs", "reduce-girls:rwy"] {
        let base = ExperimentConfig::new(policy, Criterion::Pairs, 60, 300, 9);
        let one = run_experiment(&base.clone().with_threads(1)).unwrap();
        let four = run_experiment(&base.with_threads(4)).unwrap();
        assert_eq!(one.records, four.records, "{policy}");
        assert_eq!(one.summary, four.summary);
    }
}

#[test]
fn seeds_change_the_records() {
    let a = run_experiment(&ExperimentConfig::new("rwy", Criterion::Boys, 100, 20, 1)).unwrap();
    let b = run_experiment(&ExperimentConfig::new("rwy", Criterion::Boys, 100, 20, 2)).unwrap();
    assert_ne!(a.records, b.records);
}

#[test]
fn records_are_consistent() {
    let config = ExperimentConfig::new("weighted-boys", Criterion::BoyWeight, 50, 100, 3)
        .with_weights(WeightsSpec::AdversarialHeavy);
    let out = run_experiment(&config).unwrap();
    let optimum: f64 = (1..=50).map(f64::from).sum();
    for (i, r) in out.records.iter().enumerate() {
        assert_eq!(r.trial, i);
        assert_eq!(r.seed, stabsec::trial_seed(3, i));
        assert_eq!(r.optimum, optimum);
        assert!((r.ratio - r.sat_boy_w / optimum).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&r.ratio));
        assert!(r.sat_pairs <= r.sat_girls.min(r.sat_boys));
    }
    let s = &out.summary;
    assert_eq!(s.trials, 100);
    assert!(s.quantiles.p5 <= s.quantiles.p50 && s.quantiles.p50 <= s.quantiles.p95);
    let json = serde_json::to_value(s).unwrap();
    for key in ["mean_ratio", "std", "quantiles", "catastrophe_rate", "trials"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn explicit_and_adversarial_arrivals() {
    let perm: Vec<usize> = (1..=10).rev().collect();
    let config =
        ExperimentConfig::new("rwy", Criterion::Boys, 10, 5, 0).with_arrival(ArrivalSpec::Explicit(perm));
    let out = run_experiment(&config).unwrap();
    assert_eq!(out.first_trace.decisions.len(), 10);
    // the best boy arrives last and always sees relative rank 1
    assert_eq!(out.first_trace.decisions[9].relative_rank, 1);

    let top = ExperimentConfig::new("pairs", Criterion::Pairs, 8, 5, 0)
        .with_arrival(ArrivalSpec::Adversarial(vec![1.0; 7]));
    let out = run_experiment(&top).unwrap();
    assert!(out.first_trace.decisions.iter().all(|d| d.relative_rank == d.time));
}

#[test]
fn bad_configurations_fail_before_running() {
    let err = |c: ExperimentConfig| prepare(&c).unwrap_err();
    assert!(matches!(err(ExperimentConfig::new("rwy", Criterion::Boys, 10, 0, 0)), HarnessError::Config(_)));
    assert!(matches!(err(ExperimentConfig::new("nope", Criterion::Boys, 10, 1, 0)), HarnessError::Core(_)));
    // weighted criterion without weights
    assert!(matches!(
        err(ExperimentConfig::new("rwy", Criterion::BoyWeight, 10, 1, 0)),
        HarnessError::Config(_)
    ));
    assert!(matches!(
        err(ExperimentConfig::new("weighted-girls", Criterion::GirlWeight, 10, 1, 0)),
        HarnessError::Config(_)
    ));
    // rwy needs a balanced instance
    assert!(matches!(
        err(ExperimentConfig::new("rwy", Criterion::Boys, 10, 1, 0).with_m(12)),
        HarnessError::Core(_)
    ));
    // arrival size must match the boys
    let short = ExperimentConfig::new("rwy", Criterion::Boys, 10, 1, 0)
        .with_arrival(ArrivalSpec::Explicit(vec![2, 1]));
    assert!(matches!(err(short), HarnessError::Config(_)));
    let bad_perm = ExperimentConfig::new("rwy", Criterion::Boys, 3, 1, 0)
        .with_arrival(ArrivalSpec::Explicit(vec![1, 1, 2]));
    assert!(matches!(err(bad_perm), HarnessError::Core(_)));
    let missing = ExperimentConfig::new("weighted-girls", Criterion::GirlWeight, 4, 1, 0)
        .with_weights(WeightsSpec::File("/nonexistent/weights.txt".into()));
    assert!(matches!(err(missing), HarnessError::Io { .. }));
    assert!(matches!(err(ExperimentConfig::new("pairs", Criterion::Pairs, 3, 1, 0)), HarnessError::Core(_)));
}

#[test]
fn reductions_run_on_unbalanced_instances() {
    let girls = ExperimentConfig::new("reduce-girls:rwy", Criterion::Girls, 30, 50, 1).with_m(10);
    let out = run_experiment(&girls).unwrap();
    assert!(out.records.iter().all(|r| r.n == 30 && r.m == 10 && r.optimum == 10.0));
    let boys = ExperimentConfig::new("reduce-boys:girls", Criterion::Boys, 10, 50, 1).with_m(30);
    assert!(run_experiment(&boys).is_ok());
}
