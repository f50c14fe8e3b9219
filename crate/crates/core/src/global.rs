//! Enumeration-based randomized rules: Softmax-PAV (exponential weights on
//! the PAV score over the size-k proportional committees) and Uniform-EJR+
//! (uniform over all proportional committees of size at most k). Exact by
//! construction at enumeration scale.

use crate::dist::Distribution;
use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Default softmax temperature for the PAV rule:
/// a = (k²/n)·(k·ln m + ln(n/k²)), clamped below at 0 (the formula can go
/// negative when n < k²).
pub fn default_pav_a(e: &Election) -> f64 {
    let n = e.num_voters() as f64;
    let m = e.num_candidates() as f64;
    let k2 = (e.k() * e.k()) as f64;
    let a = k2 / n * ((e.k() as f64) * m.ln() + (n / k2).ln());
    a.max(0.0)
}

/// Privacy-oriented temperature preset: a = 2(k²/n)·(k·ln m + κ·ln n).
pub fn privacy_pav_a(e: &Election, kappa: f64) -> f64 {
    let n = e.num_voters() as f64;
    let m = e.num_candidates() as f64;
    let k2 = (e.k() * e.k()) as f64;
    (2.0 * k2 / n * ((e.k() as f64) * m.ln() + kappa * n.ln())).max(0.0)
}

/// The exact Softmax-PAV output distribution: support is every size-exactly-k
/// committee passing the EJR+ checker, with P(W) ∝ exp(a·PAV(W)), normalized
/// in log space. PAV scores are exact rationals until they enter the
/// exponential.
pub fn softmax_pav_distribution(e: &Election, a: f64) -> Result<Distribution<Committee>> {
    let support = e.enumerate_proportional_committees(1.0, e.k(), true, None)?;
    if support.is_empty() {
        // The PAV maximizer always satisfies EJR+, so this cannot happen.
        return Err(Error::Internal(
            "no size-k committee satisfies the proportionality axiom".into(),
        ));
    }
    // Shift by the largest log weight before exponentiating: equivalent to
    // log-sum-exp normalization, overflow-free, and exactly uniform at a = 0.
    let logs: Vec<f64> = support.iter().map(|&w| a * e.pav_score(w)).collect();
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&lw| (lw - shift).exp()).collect();
    let sum: f64 = weights.iter().sum();
    Distribution::new(
        support
            .into_iter()
            .zip(weights)
            .map(|(w, weight)| (w, weight / sum)),
    )
}

/// One draw from [`softmax_pav_distribution`].
pub fn softmax_pav(e: &Election, a: f64, rng: &mut Rng) -> Result<Committee> {
    Ok(softmax_pav_distribution(e, a)?.sample(rng))
}

/// The exact Uniform-EJR+ output distribution: uniform over every committee
/// of size at most k passing the EJR+ checker.
pub fn uniform_ejr_distribution(e: &Election) -> Result<Distribution<Committee>> {
    let support = e.enumerate_proportional_committees(1.0, e.k(), false, None)?;
    if support.is_empty() {
        return Err(Error::Internal(
            "no committee of size at most k satisfies the proportionality axiom".into(),
        ));
    }
    Distribution::uniform(support)
}

/// One draw from [`uniform_ejr_distribution`].
pub fn uniform_ejr_plus(e: &Election, rng: &mut Rng) -> Result<Committee> {
    Ok(uniform_ejr_distribution(e)?.sample(rng))
}
