//! A uniform handle over all implemented committee rules, with sampling and
//! (where feasible) exact output distributions.

use crate::analysis::exact_committee_distribution;
use crate::dist::Distribution;
use crate::election::{Committee, Election};
use crate::error::Result;
use crate::global::{
    default_pav_a, softmax_pav_distribution, uniform_ejr_distribution,
};
use crate::greedy::{gjcr, softmax_gjcr, GreedyParams};
use crate::rng::Rng;

/// One of the implemented committee rules.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// Deterministic greedy rule.
    Gjcr,
    /// Randomized greedy rule; covers the JR-only and slack variants via
    /// the parameters.
    SoftmaxGjcr(GreedyParams),
    /// Exponential weights on the PAV score over size-k proportional
    /// committees; `a = None` uses the default temperature.
    SoftmaxPav { a: Option<f64> },
    /// Uniform over proportional committees of size at most k.
    UniformEjrPlus,
}

impl Rule {
    /// The (α, ℓmax) pair whose proportionality axiom this rule guarantees
    /// ex post.
    pub fn guaranteed_axiom(&self, e: &Election) -> (f64, usize) {
        match self {
            Rule::SoftmaxGjcr(p) => (p.alpha, p.ell_max(e)),
            _ => (1.0, e.k()),
        }
    }

    /// One committee draw.
    pub fn sample(&self, e: &Election, rng: &mut Rng) -> Result<Committee> {
        match self {
            Rule::Gjcr => Ok(gjcr(e)),
            Rule::SoftmaxGjcr(p) => Ok(softmax_gjcr(e, p, rng)?.0),
            Rule::SoftmaxPav { a } => {
                crate::global::softmax_pav(e, a.unwrap_or_else(|| default_pav_a(e)), rng)
            }
            Rule::UniformEjrPlus => crate::global::uniform_ejr_plus(e, rng),
        }
    }

    /// The exact output distribution: a point mass for the deterministic
    /// rule, a forward dynamic program for the softmax greedy rule, and
    /// direct enumeration for the global rules.
    pub fn exact_distribution(&self, e: &Election) -> Result<Distribution<Committee>> {
        match self {
            Rule::Gjcr => Ok(Distribution::point_mass(gjcr(e))),
            Rule::SoftmaxGjcr(p) => exact_committee_distribution(e, p),
            Rule::SoftmaxPav { a } => {
                softmax_pav_distribution(e, a.unwrap_or_else(|| default_pav_a(e)))
            }
            Rule::UniformEjrPlus => uniform_ejr_distribution(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::e0;
    use crate::rng::rng_for;

    #[test]
    fn all_rules_agree_on_toy_election() {
        let e = e0();
        let target = e.committee(["c1", "c2"]).unwrap();
        for rule in [
            Rule::Gjcr,
            Rule::SoftmaxGjcr(GreedyParams::default()),
            Rule::SoftmaxPav { a: None },
            Rule::UniformEjrPlus,
        ] {
            let d = rule.exact_distribution(&e).unwrap();
            assert!((d.probability(&target) - 1.0).abs() < 1e-12, "{rule:?}");
            let mut rng = rng_for(5, "rule");
            assert_eq!(rule.sample(&e, &mut rng).unwrap(), target);
        }
    }
}
