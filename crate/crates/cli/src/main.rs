//! `fairvote`: committee voting rules, exact distributions, stability
//! comparisons, dynamic maintenance, instance generation, and axiom checks
//! over JSON election documents.
//!
//! Exit codes: 0 success, 2 usage error, 3 input/format error, 4 resource
//! cap exceeded. All diagnostics go to standard error; standard output
//! carries exactly one JSON document. Output bytes are fully determined by
//! the input, flags, and seed.

mod election_io;

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairvote_core::{
    adversary_sequence, dynamic_gjcr, dynamic_reduce, generate_instance, monte_carlo_distribution,
    pad_committee, rng_for, selection_probabilities, stability_report, AdversaryModel,
    AxiomVerdict, Committee, DistMode, Distribution, DynamicTrace, Election, ElectionSequence,
    Error, GreedyParams, InstanceFamily, Result, Rule, DEFAULT_EPS_GRID,
};
use serde_json::{json, Value};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "fairvote", version, about = "Randomized proportional committee voting rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleName {
    Gjcr,
    SoftmaxGjcr,
    GreedyJr,
    SoftmaxPav,
    UniformEjr,
}

/// Rule-tuning flags shared by the sampling and analysis subcommands.
#[derive(Args, Clone)]
struct RuleOpts {
    /// Slack factor α in (0, 1] for the softmax greedy rule
    #[arg(long)]
    alpha: Option<f64>,
    /// Highest representation level the softmax greedy rule targets
    #[arg(long)]
    ell_max: Option<usize>,
    /// Assumed per-voter change bound Δ for the softmax greedy rule
    #[arg(long)]
    delta: Option<usize>,
    /// Softmax temperature for the PAV rule (default: built-in formula)
    #[arg(long)]
    a: Option<f64>,
}

impl RuleOpts {
    fn build(&self, name: RuleName) -> Rule {
        match name {
            RuleName::Gjcr => Rule::Gjcr,
            RuleName::SoftmaxGjcr | RuleName::GreedyJr => {
                let mut params = GreedyParams::default();
                if let Some(alpha) = self.alpha {
                    params.alpha = alpha;
                }
                params.ell_max = if name == RuleName::GreedyJr {
                    Some(1)
                } else {
                    self.ell_max
                };
                params.delta = self.delta;
                Rule::SoftmaxGjcr(params)
            }
            RuleName::SoftmaxPav => Rule::SoftmaxPav { a: self.a },
            RuleName::UniformEjr => Rule::UniformEjrPlus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Blocks,
    JrLb,
    PairsLb,
    Obs53,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one committee and report its axiom verdict
    Run {
        #[arg(long, value_enum)]
        rule: RuleName,
        /// Election document path
        #[arg(long)]
        input: String,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        opts: RuleOpts,
        /// Fill the committee to size k with uniform random non-members
        #[arg(long)]
        pad: bool,
    },
    /// Exact or Monte-Carlo output distribution of a rule
    Dist {
        #[arg(long, value_enum)]
        rule: RuleName,
        #[arg(long)]
        input: String,
        /// Compute the exact distribution
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Estimate from this many Monte-Carlo samples
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, required_if_eq("exact", "false"))]
        seed: Option<u64>,
        #[command(flatten)]
        opts: RuleOpts,
    },
    /// Stability report of a rule across two neighboring elections
    Compare {
        #[arg(long, value_enum)]
        rule: RuleName,
        #[arg(long)]
        input_a: String,
        #[arg(long)]
        input_b: String,
        /// Comma-separated ε grid for the privacy audit
        #[arg(long)]
        eps_grid: Option<String>,
        /// Use Monte-Carlo distributions with this many samples
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        opts: RuleOpts,
    },
    /// Maintain a committee across a perturbation sequence
    Dynamic {
        /// `softmax-gjcr` or `reduce:<rule>`
        #[arg(long)]
        rule: String,
        /// Base election document path
        #[arg(long)]
        base: String,
        /// Perturbation steps document path
        #[arg(long)]
        steps_file: String,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        opts: RuleOpts,
    },
    /// Generate an adversarial instance family
    Gen {
        #[arg(long, value_enum)]
        family: FamilyName,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
        /// Instead of the family's built-in perturbations, generate this
        /// many random single-approval adversary steps
        #[arg(long)]
        adversary_steps: Option<usize>,
        #[arg(long, required_if_eq_any([("adversary_steps", "0")]))]
        seed: Option<u64>,
    },
    /// Check a committee against the proportionality axiom
    Check {
        #[arg(long)]
        input: String,
        /// Comma-separated candidate ids
        #[arg(long)]
        committee: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        ell_max: Option<usize>,
    },
}

fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
}

fn load_election(path: &str) -> Result<Election> {
    election_io::parse_election(&read_file(path)?)
}

fn committee_json(e: &Election, w: Committee) -> Value {
    Value::from(e.committee_ids(w))
}

fn verdict_json(v: &AxiomVerdict) -> Value {
    match &v.witness {
        None => json!({"satisfied": v.satisfied, "witness": Value::Null}),
        Some(w) => json!({
            "satisfied": v.satisfied,
            "witness": {"candidate": w.candidate, "level": w.level, "voters": w.voters},
        }),
    }
}

fn distribution_json(e: &Election, d: &Distribution<Committee>) -> (Value, Value) {
    let support: Vec<Value> = d
        .iter()
        .map(|(&w, p)| json!({"committee": committee_json(e, w), "prob": p}))
        .collect();
    let pi = selection_probabilities(d, e);
    let pi_json: Value = e
        .candidates()
        .iter()
        .zip(pi)
        .map(|(c, p)| (c.clone(), Value::from(p)))
        .collect::<serde_json::Map<_, _>>()
        .into();
    (Value::from(support), pi_json)
}

fn trace_json(e: &Election, trace: &DynamicTrace, seed: u64) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "committees": trace
            .committees
            .iter()
            .map(|&w| committee_json(e, w))
            .collect::<Vec<_>>(),
        "per_step_recourse": trace.per_step_recourse,
        "total_recourse": trace.total_recourse(),
    })
}

fn parse_eps_grid(spec: Option<&str>) -> Result<Vec<f64>> {
    match spec {
        None => Ok(DEFAULT_EPS_GRID.to_vec()),
        Some(s) => s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad ε value {x:?} in --eps-grid")))
            })
            .collect(),
    }
}

fn execute(command: Command) -> Result<Value> {
    match command {
        Command::Run {
            rule,
            input,
            seed,
            opts,
            pad,
        } => {
            let e = load_election(&input)?;
            let rule = opts.build(rule);
            let mut rng = rng_for(seed, "run");
            let w = rule.sample(&e, &mut rng)?;
            let (alpha, ell_max) = rule.guaranteed_axiom(&e);
            let verdict = e.check_proportionality(w, alpha, ell_max)?;
            let mut out = json!({
                "schema_version": SCHEMA_VERSION,
                "seed": seed,
                "committee": committee_json(&e, w),
                "axiom": verdict_json(&verdict),
            });
            if pad {
                let mut pad_rng = rng_for(seed, "pad");
                let padded = pad_committee(&e, w, &mut pad_rng);
                out["padded"] = Value::from(true);
                out["committee"] = committee_json(&e, padded);
                out["unpadded_committee"] = committee_json(&e, w);
            }
            Ok(out)
        }
        Command::Dist {
            rule,
            input,
            exact,
            mc,
            seed,
            opts,
        } => {
            let e = load_election(&input)?;
            let rule = opts.build(rule);
            match (exact, mc) {
                (true, None) => {
                    let d = rule.exact_distribution(&e)?;
                    let (support, pi) = distribution_json(&e, &d);
                    Ok(json!({
                        "schema_version": SCHEMA_VERSION,
                        "mode": "exact",
                        "support": support,
                        "pi": pi,
                    }))
                }
                (false, Some(samples)) => {
                    let seed = seed.ok_or_else(|| {
                        Error::InvalidInput("--mc requires --seed".into())
                    })?;
                    let est = monte_carlo_distribution(&e, &rule, samples, seed)?;
                    let d = est.distribution()?;
                    let support: Vec<Value> = d
                        .iter()
                        .map(|(&w, p)| {
                            let (lo, hi) = est.wilson_99(&w);
                            json!({
                                "committee": committee_json(&e, w),
                                "prob": p,
                                "ci99": [lo, hi],
                            })
                        })
                        .collect();
                    let pi = selection_probabilities(&d, &e);
                    let pi_json: Value = e
                        .candidates()
                        .iter()
                        .zip(pi)
                        .map(|(c, p)| (c.clone(), Value::from(p)))
                        .collect::<serde_json::Map<_, _>>()
                        .into();
                    Ok(json!({
                        "schema_version": SCHEMA_VERSION,
                        "mode": "mc",
                        "samples": samples,
                        "seed": seed,
                        "support": support,
                        "pi": pi_json,
                    }))
                }
                _ => Err(Error::InvalidInput(
                    "pass exactly one of --exact or --mc N".into(),
                )),
            }
        }
        Command::Compare {
            rule,
            input_a,
            input_b,
            eps_grid,
            mc,
            seed,
            opts,
        } => {
            let a = load_election(&input_a)?;
            let b = load_election(&input_b)?;
            let rule = opts.build(rule);
            let grid = parse_eps_grid(eps_grid.as_deref())?;
            let mode = match mc {
                None => DistMode::Exact,
                Some(samples) => DistMode::MonteCarlo {
                    samples,
                    seed: seed
                        .ok_or_else(|| Error::InvalidInput("--mc requires --seed".into()))?,
                },
            };
            let report = stability_report(&a, &b, &rule, mode, &grid)?;
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "tv": report.tv,
                "per_candidate_delta": report
                    .per_candidate_delta
                    .iter()
                    .map(|(c, d)| (c.clone(), Value::from(*d)))
                    .collect::<serde_json::Map<_, _>>(),
                "delta_hat": report
                    .kl_delta_hat
                    .iter()
                    .map(|&(eps, d)| json!({"eps": eps, "delta": d}))
                    .collect::<Vec<_>>(),
            }))
        }
        Command::Dynamic {
            rule,
            base,
            steps_file,
            seed,
            opts,
        } => {
            let e = load_election(&base)?;
            let steps = election_io::parse_steps(&read_file(&steps_file)?)?;
            let seq = ElectionSequence {
                base: e.clone(),
                steps,
            };
            let mut rng = rng_for(seed, "dynamic");
            let trace = if rule == "softmax-gjcr" {
                let Rule::SoftmaxGjcr(params) = opts.build(RuleName::SoftmaxGjcr) else {
                    unreachable!()
                };
                dynamic_gjcr(&seq, &params, &mut rng)?
            } else if let Some(inner) = rule.strip_prefix("reduce:") {
                let name = RuleName::from_str(inner, true).map_err(|_| {
                    Error::InvalidInput(format!("unknown rule {inner:?} after reduce:"))
                })?;
                dynamic_reduce(&opts.build(name), &seq, &mut rng)?
            } else {
                return Err(Error::InvalidInput(format!(
                    "--rule must be softmax-gjcr or reduce:<rule>, got {rule:?}"
                )));
            };
            Ok(trace_json(&e, &trace, seed))
        }
        Command::Gen {
            family,
            n,
            k,
            m,
            adversary_steps,
            seed,
        } => {
            let family = match family {
                FamilyName::Blocks => InstanceFamily::Blocks,
                FamilyName::JrLb => InstanceFamily::JrLb,
                FamilyName::PairsLb => InstanceFamily::PairsLb,
                FamilyName::Obs53 => InstanceFamily::Obs53,
            };
            let (e, mut perturbations) = generate_instance(family, n, k, m)?;
            if let Some(steps) = adversary_steps {
                let seed = seed.ok_or_else(|| {
                    Error::InvalidInput("--adversary-steps requires --seed".into())
                })?;
                let mut rng = rng_for(seed, "gen-adversary");
                let seq =
                    adversary_sequence(&e, steps, AdversaryModel::SingleApproval, &mut rng)?;
                perturbations = seq.steps;
            }
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "election": election_io::election_to_value(&e),
                "perturbations": election_io::steps_to_value(&perturbations)["steps"],
            }))
        }
        Command::Check {
            input,
            committee,
            alpha,
            ell_max,
        } => {
            let e = load_election(&input)?;
            let members: Vec<&str> = committee
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            let w = e.committee(members)?;
            let verdict = e.check_proportionality(
                w,
                alpha.unwrap_or(1.0),
                ell_max.unwrap_or_else(|| e.k()),
            )?;
            let mut out = verdict_json(&verdict);
            out["schema_version"] = Value::from(SCHEMA_VERSION);
            out["committee"] = committee_json(&e, w);
            Ok(out)
        }
    }
}

impl RuleName {
    fn from_str(s: &str, ignore_case: bool) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, ignore_case)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(value) => {
            let mut out = serde_json::to_string_pretty(&value).expect("serializable output");
            let _ = writeln!(out);
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidInput(_) => ExitCode::from(3),
                Error::ResourceCap(_) => ExitCode::from(4),
                Error::Internal(_) => ExitCode::from(1),
            }
        }
    }
}
