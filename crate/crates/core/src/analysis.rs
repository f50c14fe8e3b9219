//! Exact and Monte-Carlo committee distributions, selection probabilities,
//! stability reports with privacy audits, theoretical stability ceilings,
//! and generators for the adversarial instance families used by the tests.

use std::collections::BTreeMap;

use crate::dist::{max_kl_audit, tv_distance, Distribution};
use crate::election::{Committee, Election, PerturbationSpec};
use crate::error::{input_err, Error, Result};
use crate::greedy::{default_a_ell, step_distribution, GreedyParams, Pick};
use crate::rng::rng_for_indexed;
use crate::rule::Rule;

/// Default cap on the number of live committee states in the exact dynamic
/// program.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Exact output distribution of the softmax greedy rule, by a forward
/// dynamic program over partial committees. The per-round transition law
/// depends only on the current committee and epoch, so tracking the set of
/// reachable committees with their probabilities at each (epoch, round) is
/// exact.
pub fn exact_committee_distribution(
    e: &Election,
    params: &GreedyParams,
) -> Result<Distribution<Committee>> {
    exact_committee_distribution_capped(e, params, DEFAULT_STATE_CAP)
}

/// [`exact_committee_distribution`] with an explicit state cap.
pub fn exact_committee_distribution_capped(
    e: &Election,
    params: &GreedyParams,
    state_cap: usize,
) -> Result<Distribution<Committee>> {
    params.validate(e)?;
    let mut states: BTreeMap<Committee, f64> = [(Committee::EMPTY, 1.0)].into_iter().collect();
    for level in (1..=params.ell_max(e)).rev() {
        for _round in 0..e.k() {
            let mut next: BTreeMap<Committee, f64> = BTreeMap::new();
            for (&w, &p) in &states {
                let dist = step_distribution(e, w, level, params)?;
                for (pick, q) in dist.support() {
                    let w2 = match pick {
                        Pick::Candidate(c) => w.with(c),
                        Pick::Bottom => w,
                    };
                    *next.entry(w2).or_insert(0.0) += p * q;
                }
            }
            if next.len() > state_cap {
                return Err(Error::ResourceCap(format!(
                    "{} committee states exceed cap {state_cap}",
                    next.len()
                )));
            }
            states = next;
        }
    }
    Distribution::new(states)
}

/// Candidate selection probabilities π_c = Σ_{W ∋ c} d(W), indexed in
/// canonical candidate order.
pub fn selection_probabilities(d: &Distribution<Committee>, e: &Election) -> Vec<f64> {
    let mut pi = vec![0.0; e.num_candidates()];
    for (w, p) in d.iter() {
        for c in w.indices() {
            pi[c] += p;
        }
    }
    pi
}

/// z-score of the two-sided 99% confidence level.
const Z_99: f64 = 2.5758293035489004;

/// An empirical committee distribution with per-cell 99% Wilson intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct McDistribution {
    counts: BTreeMap<Committee, u64>,
    pub samples: u64,
}

impl McDistribution {
    pub fn frequency(&self, w: &Committee) -> f64 {
        self.counts.get(w).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    pub fn counts(&self) -> impl Iterator<Item = (&Committee, u64)> {
        self.counts.iter().map(|(w, &c)| (w, c))
    }

    /// The empirical frequencies as a distribution.
    pub fn distribution(&self) -> Result<Distribution<Committee>> {
        let n = self.samples as f64;
        Distribution::new(self.counts.iter().map(|(&w, &c)| (w, c as f64 / n)))
    }

    /// 99% Wilson score interval for the probability of one committee.
    pub fn wilson_99(&self, w: &Committee) -> (f64, f64) {
        let n = self.samples as f64;
        let p = self.frequency(w);
        let z2 = Z_99 * Z_99;
        let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z_99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
        ((center - half).max(0.0), (center + half).min(1.0))
    }
}

/// Empirical output distribution from `samples` independent replays of a
/// rule. Each replay draws from its own labelled child stream, so enlarging
/// `samples` never perturbs earlier draws.
pub fn monte_carlo_distribution(
    e: &Election,
    rule: &Rule,
    samples: u64,
    seed: u64,
) -> Result<McDistribution> {
    if samples == 0 {
        return input_err("sample count must be at least 1");
    }
    let mut counts: BTreeMap<Committee, u64> = BTreeMap::new();
    for i in 0..samples {
        let mut rng = rng_for_indexed(seed, "mc", i);
        let w = rule.sample(e, &mut rng)?;
        *counts.entry(w).or_insert(0) += 1;
    }
    Ok(McDistribution { counts, samples })
}

/// The adversarial instance families used by the stability and privacy
/// experiments. Each generator returns a base election together with a
/// sequence of single-voter perturbations, to be applied cumulatively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFamily {
    /// k equal voter blocks, each behind its own candidate, plus unapproved
    /// dummies; the single perturbation deletes one supporter's approval.
    Blocks,
    /// k+1 singleton-supported candidates with slightly-too-small groups
    /// plus empty voters; perturbations grow the last candidate's group one
    /// empty voter at a time.
    JrLb,
    /// The pairs analog of `JrLb`: k+1 candidate pairs, each approved
    /// jointly by its group; perturbations add approvals of one designated
    /// pair member.
    PairsLb,
    /// k equal blocks with no dummies; the perturbation empties one
    /// supporter's approval set.
    Obs53,
}

/// Identifier of the designated candidate c* whose selection probability the
/// lower-bound families track.
pub fn designated_candidate(family: InstanceFamily, k: usize) -> String {
    match family {
        InstanceFamily::Blocks | InstanceFamily::Obs53 => "c1".to_string(),
        InstanceFamily::JrLb | InstanceFamily::PairsLb => format!("c{}", k + 1),
    }
}

/// Build one instance of a family. `m` is only meaningful for `Blocks`
/// (total candidate count, default k+2); the other families fix their own
/// candidate sets.
pub fn generate_instance(
    family: InstanceFamily,
    n: usize,
    k: usize,
    m: Option<usize>,
) -> Result<(Election, Vec<PerturbationSpec>)> {
    if n == 0 || k == 0 {
        return input_err("n and k must be positive");
    }
    match family {
        InstanceFamily::Blocks => {
            if n % k != 0 {
                return input_err(format!("blocks family requires k | n, got n={n}, k={k}"));
            }
            let m = m.unwrap_or(k + 2);
            if m < k {
                return input_err(format!("blocks family requires m >= k, got m={m}, k={k}"));
            }
            let mut candidates: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
            candidates.extend((1..=m - k).map(|i| format!("d{i}")));
            let block = n / k;
            let voters = (0..n)
                .map(|j| (format!("v{}", j + 1), vec![format!("c{}", j / block + 1)]))
                .collect();
            let e = Election::new(candidates, voters, k)?;
            let perturbations = vec![PerturbationSpec {
                voter: "v1".into(),
                new_approvals: vec![],
            }];
            Ok((e, perturbations))
        }
        InstanceFamily::JrLb | InstanceFamily::PairsLb => {
            if n % (k * k) != 0 {
                return input_err(format!(
                    "this family requires k^2 | n, got n={n}, k={k}"
                ));
            }
            if m.is_some() {
                return input_err("candidate count is fixed for this family");
            }
            let group = n / k - n / (k * k);
            if group == 0 {
                return input_err("group size n/k - n/k^2 must be positive");
            }
            let pairs = family == InstanceFamily::PairsLb;
            let mut candidates: Vec<String> = (1..=k + 1).map(|i| format!("c{i}")).collect();
            if pairs {
                candidates.extend((1..=k + 1).map(|i| format!("d{i}")));
            }
            let mut voters = Vec::with_capacity(n);
            for g in 1..=k + 1 {
                for _ in 0..group {
                    let mut approved = vec![format!("c{g}")];
                    if pairs {
                        approved.push(format!("d{g}"));
                    }
                    voters.push((format!("v{}", voters.len() + 1), approved));
                }
            }
            let empty = n / (k * k);
            let first_empty = voters.len();
            for _ in 0..empty {
                voters.push((format!("v{}", voters.len() + 1), vec![]));
            }
            let e = Election::new(candidates, voters, k)?;
            let star = designated_candidate(family, k);
            let perturbations = (0..empty)
                .map(|i| PerturbationSpec {
                    voter: format!("v{}", first_empty + i + 1),
                    new_approvals: vec![star.clone()],
                })
                .collect();
            Ok((e, perturbations))
        }
        InstanceFamily::Obs53 => {
            if n % k != 0 {
                return input_err(format!("this family requires k | n, got n={n}, k={k}"));
            }
            if let Some(m) = m {
                if m != k {
                    return input_err("candidate count is fixed at k for this family");
                }
            }
            let candidates: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
            let block = n / k;
            let voters = (0..n)
                .map(|j| (format!("v{}", j + 1), vec![format!("c{}", j / block + 1)]))
                .collect();
            let e = Election::new(candidates, voters, k)?;
            let perturbations = vec![PerturbationSpec {
                voter: "v1".into(),
                new_approvals: vec![],
            }];
            Ok((e, perturbations))
        }
    }
}

/// Default ε grid for privacy audits.
pub const DEFAULT_EPS_GRID: [f64; 6] = [0.0, 0.01, 0.1, 0.5, 1.0, 2.0];

/// How a stability report obtains its two distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Stability comparison of a rule across one single-voter change: TV
/// distance, per-candidate selection-probability deltas, and the privacy
/// audit curve.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub tv: f64,
    /// |π′_c − π_c| in canonical candidate order, as (id, delta) pairs.
    pub per_candidate_delta: Vec<(String, f64)>,
    /// (ε, δ̂) pairs on the audited grid; δ̂ is the larger of the two
    /// audit directions.
    pub kl_delta_hat: Vec<(f64, f64)>,
}

impl StabilityReport {
    pub fn max_candidate_delta(&self) -> f64 {
        self.per_candidate_delta
            .iter()
            .map(|&(_, d)| d)
            .fold(0.0, f64::max)
    }
}

/// Compare a rule's output distributions on two neighboring elections.
pub fn stability_report(
    e: &Election,
    e_prime: &Election,
    rule: &Rule,
    mode: DistMode,
    eps_grid: &[f64],
) -> Result<StabilityReport> {
    e.neighbor_voter(e_prime)?;
    let (mu, nu) = match mode {
        DistMode::Exact => (rule.exact_distribution(e)?, rule.exact_distribution(e_prime)?),
        DistMode::MonteCarlo { samples, seed } => (
            monte_carlo_distribution(e, rule, samples, seed)?.distribution()?,
            monte_carlo_distribution(e_prime, rule, samples, seed.wrapping_add(1))?
                .distribution()?,
        ),
    };
    let pi = selection_probabilities(&mu, e);
    let pi_prime = selection_probabilities(&nu, e);
    let per_candidate_delta = e
        .candidates()
        .iter()
        .zip(pi.iter().zip(&pi_prime))
        .map(|(c, (&p, &q))| (c.clone(), (q - p).abs()))
        .collect();
    let kl_delta_hat = eps_grid
        .iter()
        .map(|&eps| {
            let d = max_kl_audit(&mu, &nu, eps).max(max_kl_audit(&nu, &mu, eps));
            (eps, d)
        })
        .collect();
    Ok(StabilityReport {
        tv: tv_distance(&mu, &nu),
        per_candidate_delta,
        kl_delta_hat,
    })
}

/// Theoretical ceiling on the TV distance between one round's pick
/// distributions across a single-voter change with `delta_v` flipped
/// approvals: min(1, 4(2e−1)·a_ℓ + 4·exp(ln Δ_v − a_ℓ·nℓ/(k(k+1)) + a_ℓ)).
pub fn per_step_tv_ceiling(e: &Election, level: usize, params: &GreedyParams, delta_v: usize) -> f64 {
    let a = default_a_ell(e, level, params);
    let n = e.num_voters() as f64;
    let k = e.k() as f64;
    let l = level as f64;
    let tail = ((delta_v as f64).ln() - a * n * l / (k * (k + 1.0)) + a).exp();
    (4.0 * (2.0 * std::f64::consts::E - 1.0) * a + 4.0 * tail).min(1.0)
}

/// Theoretical end-to-end ceiling on the TV distance between the softmax
/// greedy rule's committee distributions on neighboring elections:
/// min(1, Σ over all k·ℓmax rounds of (12e−4)·a_ℓ).
pub fn end_to_end_tv_ceiling(e: &Election, params: &GreedyParams) -> f64 {
    let per_round_constant = 12.0 * std::f64::consts::E - 4.0;
    let sum: f64 = (1..=params.ell_max(e))
        .map(|level| e.k() as f64 * per_round_constant * default_a_ell(e, level, params))
        .sum();
    sum.min(1.0)
}
