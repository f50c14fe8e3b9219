//! The greedy rule family: deterministic GJCR and the softmax greedy rules
//! (full EJR+, JR-only via `ell_max = 1`, and the `alpha`-slack variant),
//! built around the per-step next-candidate distribution that the analysis
//! and dynamic modules reuse.

use std::collections::BTreeMap;

use rand::Rng as _;

use crate::election::{Committee, Election};
use crate::error::{input_err, Result};
use crate::rng::Rng;

/// Parameters of the softmax greedy rules.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyParams {
    /// Slack factor α ∈ (0,1]; 1 targets exact EJR+.
    pub alpha: f64,
    /// Highest representation level checked; `None` means `k` (full EJR+),
    /// 1 gives the JR-only rule.
    pub ell_max: Option<usize>,
    /// Assumed per-voter change bound Δ ∈ [1, m]; `None` means `m`.
    pub delta: Option<usize>,
    /// Per-level override of the softmax temperature a_ℓ.
    pub a_override: Option<BTreeMap<usize, f64>>,
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams {
            alpha: 1.0,
            ell_max: None,
            delta: None,
            a_override: None,
        }
    }
}

impl GreedyParams {
    pub fn with_alpha(alpha: f64) -> Self {
        GreedyParams {
            alpha,
            ..Default::default()
        }
    }

    /// JR-only configuration: a single epoch at level 1.
    pub fn greedy_jr() -> Self {
        GreedyParams {
            ell_max: Some(1),
            ..Default::default()
        }
    }

    pub fn ell_max(&self, e: &Election) -> usize {
        self.ell_max.unwrap_or(e.k())
    }

    pub fn delta(&self, e: &Election) -> usize {
        self.delta.unwrap_or(e.num_candidates())
    }

    pub fn validate(&self, e: &Election) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return input_err(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if let Some(l) = self.ell_max {
            if l < 1 || l > e.k() {
                return input_err(format!("ell_max must lie in [1, k={}], got {l}", e.k()));
            }
        }
        if let Some(d) = self.delta {
            if d < 1 || d > e.num_candidates() {
                return input_err(format!(
                    "delta must lie in [1, m={}], got {d}",
                    e.num_candidates()
                ));
            }
        }
        if let Some(over) = &self.a_override {
            for (&level, &a) in over {
                if level < 1 || level > e.k() {
                    return input_err(format!("a_override level {level} outside [1, k]"));
                }
                if !(a.is_finite() && a >= 0.0) {
                    return input_err(format!("a_override value {a} must be finite nonnegative"));
                }
            }
        }
        Ok(())
    }
}

/// The softmax temperature a_ℓ for one level (natural logarithm throughout).
///
/// With α = 1 this is k(k+1)/(nℓ)·ln(nΔ); with slack it is
/// (k+1)/(nℓ·(1−α+(2−α)/k))·ln(nΔ), which reduces to the exact formula at
/// α = 1 since 1−α+(2−α)/k = 1/k there. An override for ℓ wins if present.
pub fn default_a_ell(e: &Election, level: usize, params: &GreedyParams) -> f64 {
    if let Some(over) = &params.a_override {
        if let Some(&a) = over.get(&level) {
            return a;
        }
    }
    let n = e.num_voters() as f64;
    let k = e.k() as f64;
    let delta = params.delta(e) as f64;
    let l = level as f64;
    let log_term = (n * delta).ln();
    if params.alpha >= 1.0 {
        k * (k + 1.0) / (n * l) * log_term
    } else {
        let denom = 1.0 - params.alpha + (2.0 - params.alpha) / k;
        (k + 1.0) / (n * l * denom) * log_term
    }
}

/// Deterministic greedy rule: for each level ℓ from k down to 1, repeatedly
/// add the canonically first candidate outside the committee whose
/// under-represented supporter count meets n_{cℓ} ≥ nℓ/k. The result
/// satisfies EJR+ and has size at most k.
pub fn gjcr(e: &Election) -> Committee {
    let n = e.num_voters();
    let k = e.k();
    let mut w = Committee::EMPTY;
    for level in (1..=k).rev() {
        loop {
            let pick = (0..e.num_candidates()).find(|&c| {
                !w.contains(c) && e.underrepresented_count(w, c, level) * k >= level * n
            });
            match pick {
                Some(c) => w = w.with(c),
                None => break,
            }
        }
    }
    w
}

/// One pick of a softmax greedy round: a candidate index or the no-selection
/// symbol ⊥. `Candidate(i)` sorts before `Bottom`, matching the canonical
/// sampling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pick {
    Candidate(usize),
    Bottom,
}

/// The distribution of one sampling round: per-candidate probabilities in
/// canonical order, plus the probability of ⊥.
#[derive(Debug, Clone, PartialEq)]
pub struct NextCandidateDistribution {
    /// `(candidate index, probability)` for the eligible candidates, in
    /// canonical order. Ineligible candidates carry probability zero and are
    /// omitted.
    pub probabilities: Vec<(usize, f64)>,
    pub bottom: f64,
    pub epoch: usize,
    pub partial_committee: Committee,
}

impl NextCandidateDistribution {
    /// Point mass on ⊥ (used when the committee is already full).
    pub fn bottom_only(level: usize, w: Committee) -> Self {
        NextCandidateDistribution {
            probabilities: Vec::new(),
            bottom: 1.0,
            epoch: level,
            partial_committee: w,
        }
    }

    /// Probability of a pick.
    pub fn probability(&self, pick: Pick) -> f64 {
        match pick {
            Pick::Bottom => self.bottom,
            Pick::Candidate(c) => self
                .probabilities
                .iter()
                .find(|&&(d, _)| d == c)
                .map_or(0.0, |&(_, p)| p),
        }
    }

    /// One categorical draw: cumulative-sum inversion over candidates in
    /// canonical order with ⊥ last, consuming a single uniform variate. When
    /// ⊥ has probability exactly zero, the last candidate absorbs any
    /// cumulative rounding slack.
    pub fn sample(&self, rng: &mut Rng) -> Pick {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for &(c, p) in &self.probabilities {
            cum += p;
            if u < cum {
                return Pick::Candidate(c);
            }
        }
        if self.bottom == 0.0 {
            if let Some(&(c, _)) = self.probabilities.last() {
                return Pick::Candidate(c);
            }
        }
        Pick::Bottom
    }

    /// All picks with nonzero probability, canonical order, ⊥ last.
    pub fn support(&self) -> Vec<(Pick, f64)> {
        let mut out: Vec<(Pick, f64)> = self
            .probabilities
            .iter()
            .filter(|&&(_, p)| p > 0.0)
            .map(|&(c, p)| (Pick::Candidate(c), p))
            .collect();
        if self.bottom > 0.0 {
            out.push((Pick::Bottom, self.bottom));
        }
        out
    }
}

/// The distribution the softmax rule samples from at state `(W, ℓ)`.
///
/// Eligible candidates are those outside `W` with n_{cℓ} > nℓ/(k+1)
/// (strict, exact integer comparison). Each gets probability
/// exp(a_ℓ·n_{cℓ}) / max(Σ_d exp(a_ℓ·n_{dℓ}), exp(a_ℓ·nℓ/(αk))), evaluated
/// in log space; the remainder goes to ⊥.
pub fn next_candidate_distribution(
    e: &Election,
    w: Committee,
    level: usize,
    params: &GreedyParams,
) -> Result<NextCandidateDistribution> {
    params.validate(e)?;
    if level < 1 || level > e.k() {
        return input_err(format!("level must lie in [1, k={}], got {level}", e.k()));
    }
    let n = e.num_voters();
    let k = e.k();
    let a = default_a_ell(e, level, params);

    let mut eligible: Vec<(usize, usize)> = Vec::new();
    for c in 0..e.num_candidates() {
        if w.contains(c) {
            continue;
        }
        let count = e.underrepresented_count(w, c, level);
        if count * (k + 1) > n * level {
            eligible.push((c, count));
        }
    }

    // Work with weights shifted by the largest log weight: algebraically the
    // same as exp(a·n_{cℓ} − logsumexp denominator) but immune to overflow
    // and exact in the common symmetric and single-witness cases.
    let floor_log = a * (n * level) as f64 / (params.alpha * k as f64);
    let logs: Vec<f64> = eligible.iter().map(|&(_, count)| a * count as f64).collect();
    let shift = logs.iter().cloned().fold(floor_log, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&lw| (lw - shift).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let floor_weight = (floor_log - shift).exp();
    let denom = sum.max(floor_weight);

    let probabilities: Vec<(usize, f64)> = eligible
        .iter()
        .zip(&weights)
        .map(|(&(c, _), &w)| (c, w / denom))
        .collect();
    let total: f64 = probabilities.iter().map(|&(_, p)| p).sum();
    // When the witness weights meet the denominator floor, ⊥ has probability
    // exactly zero; don't let rounding dust in `total` leak mass onto it.
    let bottom = if sum >= floor_weight {
        0.0
    } else {
        (1.0 - total).max(0.0)
    };
    Ok(NextCandidateDistribution {
        probabilities,
        bottom,
        epoch: level,
        partial_committee: w,
    })
}

/// The effective round distribution: ⊥ with certainty once the committee is
/// full, otherwise [`next_candidate_distribution`].
pub fn step_distribution(
    e: &Election,
    w: Committee,
    level: usize,
    params: &GreedyParams,
) -> Result<NextCandidateDistribution> {
    if w.size() >= e.k() {
        return Ok(NextCandidateDistribution::bottom_only(level, w));
    }
    next_candidate_distribution(e, w, level, params)
}

/// Record of every round's pick, in (epoch, round) order; the committee is
/// the set of non-⊥ entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionSequence {
    pub entries: Vec<Pick>,
}

impl SelectionSequence {
    pub fn committee(&self) -> Committee {
        let mut w = Committee::EMPTY;
        for &p in &self.entries {
            if let Pick::Candidate(c) = p {
                w = w.with(c);
            }
        }
        w
    }
}

/// The randomized greedy rule: epochs ℓ = ell_max down to 1 with k sampling
/// rounds each. Non-⊥ picks join the committee; once it reaches size k all
/// remaining rounds yield ⊥ (a defensive guard — the sampling probabilities
/// already make a (k+1)-th pick impossible).
pub fn softmax_gjcr(
    e: &Election,
    params: &GreedyParams,
    rng: &mut Rng,
) -> Result<(Committee, SelectionSequence)> {
    params.validate(e)?;
    let k = e.k();
    let mut w = Committee::EMPTY;
    let mut entries = Vec::with_capacity(params.ell_max(e) * k);
    for level in (1..=params.ell_max(e)).rev() {
        for _round in 0..k {
            let dist = step_distribution(e, w, level, params)?;
            let pick = dist.sample(rng);
            if let Pick::Candidate(c) = pick {
                debug_assert!(w.size() < k, "pick emitted for a full committee");
                w = w.with(c);
            }
            entries.push(pick);
        }
    }
    Ok((w, SelectionSequence { entries }))
}

/// Optional post-processing: fill a committee up to size k with uniformly
/// chosen non-members. Off by default everywhere; padded committees are not
/// covered by the proportionality guarantees.
pub fn pad_committee(e: &Election, w: Committee, rng: &mut Rng) -> Committee {
    let mut w = w;
    let mut outside: Vec<usize> = (0..e.num_candidates()).filter(|&c| !w.contains(c)).collect();
    while w.size() < e.k() {
        let i = rng.gen_range(0..outside.len());
        w = w.with(outside.swap_remove(i));
    }
    w
}
