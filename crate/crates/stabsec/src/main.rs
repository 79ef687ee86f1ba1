use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stabsec::checks;
use stabsec::experiment::{default_criterion, run_experiment, write_csv, ArrivalSpec, ExperimentConfig};
use stabsec::formats::{self, WeightsSpec};
use stabsec_core::algorithms::PolicySpec;
use stabsec_core::analysis::{
    adversarial_recursion, auxiliary_game_bound, auxiliary_game_optimal, deterministic_adversary_attack,
    good_event_exact, good_event_probability, optimal_online_value, stirling_estimate, DpCriterion,
    DpDistribution, GoodEventMode,
};
use stabsec_core::Criterion;

#[derive(Parser)]
#[command(name = "stabsec", version, about = "Online stable matching with secretary-style arrivals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo trials of one policy; per-trial CSV plus a JSON summary.
    Simulate(SimulateArgs),
    /// Exact small-n analysis.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Builds the adaptive attack on a seeded policy and replays it.
    Attack {
        #[arg(long)]
        policy: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs an acceptance suite: core-oracles, rwy-guarantee, adversarial-exact, bounds or all.
    Check { suite: String },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    policy: String,
    /// Girls (boys for `classic`).
    #[arg(long)]
    n: usize,
    /// Boys; defaults to n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: usize,
    /// uniform | d:half | d:<p-file> | perm:<file>
    #[arg(long, default_value = "uniform")]
    arrival: String,
    /// Cg, Cb, Cp, CgW or CbW; defaults to the policy's own criterion.
    #[arg(long)]
    criterion: Option<Criterion>,
    #[arg(long, default_value_t = stabsec_core::algorithms::DEFAULT_GAMMA)]
    gamma: f64,
    /// unit | geometric(q) | adversarial-heavy | <file>
    #[arg(long)]
    weights: Option<WeightsSpec>,
    #[arg(long)]
    seed: u64,
    /// Per-trial CSV.
    #[arg(long)]
    out: PathBuf,
    /// JSON summary; printed to stdout when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// JSON-lines decisions of trial 0.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, env = "STABSEC_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Analysis {
    /// Optimal online value by backward induction over the game tree.
    Dp {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "Cg")]
        criterion: Criterion,
        /// uniform | half | recursion | <p-file>
        #[arg(long, default_value = "half")]
        dist: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// The recursion p_(k+1) = 1/(1 + v_k) and its inequalities.
    Recursion {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dp_cap: Option<usize>,
    },
    /// Exact bound on the auxiliary game for even n.
    AuxBound {
        #[arg(long)]
        n: usize,
    },
    /// Best simple strategy of the auxiliary game by brute force.
    AuxOpt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Pr(l/5 < R <= l) for the best of the first ceil(k/l) of k.
    GoodEvent {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Monte Carlo trials instead of the exact product.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_arrival(text: &str, boys: usize) -> Result<ArrivalSpec> {
    if text == "uniform" {
        return Ok(ArrivalSpec::Uniform);
    }
    if text == "d:half" {
        return Ok(ArrivalSpec::Adversarial(vec![0.5; boys.saturating_sub(1)]));
    }
    if let Some(path) = text.strip_prefix("d:") {
        let p = formats::read_probabilities(path.as_ref())?;
        return Ok(ArrivalSpec::Adversarial(p.iter().map(formats::to_f64).collect()));
    }
    if let Some(path) = text.strip_prefix("perm:") {
        return Ok(ArrivalSpec::Explicit(formats::read_permutation(path.as_ref())?));
    }
    bail!("unknown arrival {text:?}; expected uniform, d:half, d:<file> or perm:<file>")
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let spec = PolicySpec::parse(&args.policy, args.gamma)?;
    let criterion = args.criterion.unwrap_or_else(|| default_criterion(&spec));
    let boys = if matches!(spec, PolicySpec::Classic { .. }) { args.n } else { args.m.unwrap_or(args.n) };
    let config = ExperimentConfig {
        policy: args.policy,
        criterion,
        n: args.n,
        m: args.m,
        trials: args.trials,
        arrival: parse_arrival(&args.arrival, boys)?,
        gamma: args.gamma,
        weights: args.weights,
        master_seed: args.seed,
        threads: args.threads,
    };
    let outcome = run_experiment(&config)?;
    let mut out = create(&args.out)?;
    write_csv(&mut out, &outcome.records)?;
    out.flush()?;
    if let Some(path) = &args.trace {
        let mut w = create(path)?;
        formats::write_trace_jsonl(&mut w, &outcome.first_trace)?;
        w.flush()?;
    }
    let summary = serde_json::to_string_pretty(&outcome.summary)?;
    match &args.summary {
        Some(path) => {
            std::fs::write(path, summary + "\n").with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{summary}"),
    }
    Ok(())
}

fn exact(x: &BigRational) -> (String, String, f64) {
    (x.numer().to_string(), x.denom().to_string(), x.to_f64().unwrap_or(f64::NAN))
}

fn analyze(what: Analysis) -> Result<Value> {
    Ok(match what {
        Analysis::Dp { n, criterion, dist, cap } => {
            let dp_criterion = DpCriterion::try_from(criterion)?;
            let distribution = match dist.as_str() {
                "uniform" => DpDistribution::Uniform,
                "half" => DpDistribution::half(n),
                "recursion" => DpDistribution::Adversarial(adversarial_recursion(n, cap)?.p),
                path => DpDistribution::Adversarial(formats::read_probabilities(path.as_ref())?),
            };
            let r = optimal_online_value(n, &distribution, dp_criterion, cap)?;
            let (num, den, value) = exact(&r.value);
            let adversarial = matches!(distribution, DpDistribution::Adversarial(_));
            // the upper bounds proved for D: sqrt(2n) for girls, 1 for pairs
            let (bound, satisfied) = match (adversarial, dp_criterion) {
                (true, DpCriterion::Girls) => (
                    json!((2.0 * n as f64).sqrt()),
                    json!(&r.value * &r.value < BigRational::from_integer(BigInt::from(2 * n))),
                ),
                (true, DpCriterion::Pairs) => (json!(1), json!(r.value <= BigRational::one())),
                _ => (Value::Null, Value::Null),
            };
            json!({
                "n": n,
                "criterion": criterion.name(),
                "distribution": distribution.to_string(),
                "value_num": num,
                "value_den": den,
                "value": value,
                "bound": bound,
                "satisfied": satisfied,
                "strategy_states": r.strategy.len(),
            })
        }
        Analysis::Recursion { n, dp_cap } => {
            let rec = adversarial_recursion(n, dp_cap)?;
            let (num, den, value) = exact(&rec.v[n - 1]);
            json!({
                "n": n,
                "criterion": "Cg",
                "distribution": DpDistribution::Adversarial(rec.p.clone()).to_string(),
                "value_num": num,
                "value_den": den,
                "value": value,
                "bound": (2.0 * n as f64).sqrt(),
                "satisfied": rec.holds(),
                "p": rec.p.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "v": rec.v.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "steps": rec.steps.iter().map(|s| json!({
                    "k": s.k,
                    "exact": s.exact,
                    "step_bound": s.step_bound,
                    "chain_bound": s.chain_bound,
                    "sqrt_bound": s.sqrt_bound,
                })).collect::<Vec<_>>(),
            })
        }
        Analysis::AuxBound { n } => {
            let b = auxiliary_game_bound(n)?;
            let (num, den, value) = exact(&b.value);
            json!({
                "n": n,
                "criterion": "Cp",
                "distribution": "uniform",
                "value_num": num,
                "value_den": den,
                "value": value,
                "bound": stirling_estimate(n),
                "ratio": b.ratio,
                "satisfied": (0.8..=1.2).contains(&b.ratio),
            })
        }
        Analysis::AuxOpt { n, cap } => {
            let opt = auxiliary_game_optimal(n, cap)?;
            let bound = auxiliary_game_bound(n)?;
            let (num, den, value) = exact(&opt.value);
            json!({
                "n": n,
                "criterion": "Cp",
                "distribution": "uniform",
                "value_num": num,
                "value_den": den,
                "value": value,
                "bound": bound.value_f64(),
                "satisfied": opt.value <= bound.value,
                "best": opt.best,
            })
        }
        Analysis::GoodEvent { k, l, trials, seed } => {
            let thirteenth = 1.0 / 13.0;
            match trials {
                None => {
                    let p = good_event_exact(k, l)?;
                    let (num, den, value) = exact(&p);
                    json!({
                        "k": k,
                        "l": l,
                        "value_num": num,
                        "value_den": den,
                        "value": value,
                        "bound": thirteenth,
                        "satisfied": p > BigRational::new(BigInt::one(), BigInt::from(13)),
                    })
                }
                Some(trials) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let est = good_event_probability(k, l, GoodEventMode::MonteCarlo { trials }, &mut rng)?;
                    json!({
                        "k": k,
                        "l": l,
                        "trials": trials,
                        "value": est.probability,
                        "std_error": est.std_error,
                        "bound": thirteenth,
                        "satisfied": est.probability > thirteenth,
                    })
                }
            }
        }
    })
}

fn attack(policy: &str, n: usize, seed: u64) -> Result<Value> {
    let spec: PolicySpec = policy.parse()?;
    let inst = checks::attack_instance(policy, n)?;
    let out = deterministic_adversary_attack(&inst, &spec, seed)?;
    Ok(json!({
        "policy": policy,
        "n": n,
        "seed": seed,
        "t_star": out.t_star,
        "permutation": out.permutation,
        "satisfied_girls": out.satisfied_girls,
        "satisfied": out.satisfied_girls <= 1,
    }))
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => simulate(args)?,
        Command::Analyze { what } => println!("{}", serde_json::to_string_pretty(&analyze(what)?)?),
        Command::Attack { policy, n, seed } => {
            println!("{}", serde_json::to_string_pretty(&attack(&policy, n, seed)?)?)
        }
        Command::Check { suite } => {
            let reports = checks::run_suite(&suite, |r| print!("{r}"))?;
            let failed = reports.iter().filter(|r| !r.passed()).count();
            println!("{} of {} criteria passed", reports.len() - failed, reports.len());
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
