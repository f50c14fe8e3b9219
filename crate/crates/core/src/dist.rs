//! Finite probability distributions over ordered outcome spaces, their
//! total-variation distance, optimal couplings, and the max-KL privacy
//! audit. Generic over the outcome type: the same machinery serves committee
//! distributions and per-round pick distributions.

use std::collections::BTreeMap;

use rand::Rng as _;

use crate::error::{input_err, Error, Result};
use crate::rng::Rng;

/// A finite probability distribution with canonicalized keys. Zero-mass
/// entries are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T: Ord + Clone> {
    mass: BTreeMap<T, f64>,
}

impl<T: Ord + Clone> Distribution<T> {
    /// Build from outcome/mass pairs; masses for repeated outcomes add up.
    /// The total must be 1 within 1e-10.
    pub fn new(entries: impl IntoIterator<Item = (T, f64)>) -> Result<Distribution<T>> {
        let mut mass: BTreeMap<T, f64> = BTreeMap::new();
        for (x, p) in entries {
            if !(p.is_finite() && p >= 0.0) {
                return input_err(format!("probability {p} must be a finite nonnegative real"));
            }
            if p > 0.0 {
                *mass.entry(x).or_insert(0.0) += p;
            }
        }
        let total: f64 = mass.values().sum();
        if (total - 1.0).abs() > 1e-10 {
            return input_err(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(Distribution { mass })
    }

    pub fn point_mass(x: T) -> Distribution<T> {
        Distribution {
            mass: [(x, 1.0)].into_iter().collect(),
        }
    }

    /// Uniform distribution over distinct outcomes.
    pub fn uniform(outcomes: impl IntoIterator<Item = T>) -> Result<Distribution<T>> {
        let outcomes: Vec<T> = outcomes.into_iter().collect();
        if outcomes.is_empty() {
            return input_err("uniform distribution over an empty set");
        }
        let p = 1.0 / outcomes.len() as f64;
        Distribution::new(outcomes.into_iter().map(|x| (x, p)))
    }

    pub fn probability(&self, x: &T) -> f64 {
        self.mass.get(x).copied().unwrap_or(0.0)
    }

    /// Support/mass pairs in canonical outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.mass.iter().map(|(x, &p)| (x, p))
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// One draw by cumulative-sum inversion in canonical outcome order,
    /// consuming a single uniform variate. The last support element absorbs
    /// any rounding slack.
    pub fn sample(&self, rng: &mut Rng) -> T {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut last = None;
        for (x, p) in self.mass.iter() {
            cum += p;
            if u < cum {
                return x.clone();
            }
            last = Some(x);
        }
        last.expect("distribution has nonempty support").clone()
    }

    /// Apply a measurable map, merging the mass of collided outcomes.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Distribution<U> {
        let mut mass: BTreeMap<U, f64> = BTreeMap::new();
        for (x, &p) in &self.mass {
            *mass.entry(f(x)).or_insert(0.0) += p;
        }
        Distribution { mass }
    }
}

/// Total-variation distance ½ Σ |μ(x) − ν(x)|.
pub fn tv_distance<T: Ord + Clone>(mu: &Distribution<T>, nu: &Distribution<T>) -> f64 {
    let mut keys: Vec<&T> = mu.mass.keys().chain(nu.mass.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|x| (mu.probability(x) - nu.probability(x)).abs())
        .sum::<f64>()
}

/// A coupling of two distributions: a joint law over outcome pairs whose
/// first marginal is `left` and second marginal is `right`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T: Ord + Clone> {
    joint: BTreeMap<(T, T), f64>,
    left: Distribution<T>,
    right: Distribution<T>,
}

impl<T: Ord + Clone> Coupling<T> {
    pub fn left_marginal(&self) -> &Distribution<T> {
        &self.left
    }

    pub fn right_marginal(&self) -> &Distribution<T> {
        &self.right
    }

    pub fn joint(&self) -> impl Iterator<Item = (&(T, T), f64)> {
        self.joint.iter().map(|(xy, &p)| (xy, p))
    }

    /// Total mass on pairs (x, y) with x ≠ y; for the optimal coupling this
    /// equals the TV distance of the marginals.
    pub fn off_diagonal_mass(&self) -> f64 {
        self.joint
            .iter()
            .filter(|((x, y), _)| x != y)
            .map(|(_, &p)| p)
            .sum()
    }

    /// The conditional law of the second coordinate given the first.
    pub fn conditional_row(&self, given_left: &T) -> Result<Distribution<T>> {
        let row: Vec<(T, f64)> = self
            .joint
            .iter()
            .filter(|((x, _), _)| x == given_left)
            .map(|((_, y), &p)| (y.clone(), p))
            .collect();
        let total: f64 = row.iter().map(|&(_, p)| p).sum();
        if total <= 0.0 {
            return input_err("conditioning on a zero-probability outcome");
        }
        Distribution::new(row.into_iter().map(|(y, p)| (y, p / total)))
    }

    /// Audit both marginals against the joint, with tolerance 1e-12.
    pub fn verify_marginals(&self) -> Result<()> {
        let mut row: BTreeMap<T, f64> = BTreeMap::new();
        let mut col: BTreeMap<T, f64> = BTreeMap::new();
        for ((x, y), &p) in &self.joint {
            *row.entry(x.clone()).or_insert(0.0) += p;
            *col.entry(y.clone()).or_insert(0.0) += p;
        }
        for (name, sums, marginal) in [("left", &row, &self.left), ("right", &col, &self.right)] {
            let mut keys: Vec<&T> = sums.keys().chain(marginal.mass.keys()).collect();
            keys.sort();
            keys.dedup();
            for x in keys {
                let got = sums.get(x).copied().unwrap_or(0.0);
                if (got - marginal.probability(x)).abs() > 1e-12 {
                    return Err(Error::Internal(format!(
                        "{name} marginal mismatch: {got} vs {}",
                        marginal.probability(x)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The optimal coupling of two finite distributions: put min(μ(x), ν(x)) on
/// the diagonal, then match the excess μ-mass to the excess ν-mass greedily
/// in canonical outcome order. Its disagreement probability equals the TV
/// distance exactly; the fixed matching order makes the joint reproducible.
pub fn optimal_coupling<T: Ord + Clone>(
    mu: &Distribution<T>,
    nu: &Distribution<T>,
) -> Coupling<T> {
    let mut joint: BTreeMap<(T, T), f64> = BTreeMap::new();
    let mut mu_excess: Vec<(T, f64)> = Vec::new();
    let mut nu_excess: Vec<(T, f64)> = Vec::new();
    let mut keys: Vec<&T> = mu.mass.keys().chain(nu.mass.keys()).collect();
    keys.sort();
    keys.dedup();
    for x in keys {
        let p = mu.probability(x);
        let q = nu.probability(x);
        let d = p.min(q);
        if d > 0.0 {
            joint.insert((x.clone(), x.clone()), d);
        }
        if p > q {
            mu_excess.push((x.clone(), p - q));
        } else if q > p {
            nu_excess.push((x.clone(), q - p));
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < mu_excess.len() && j < nu_excess.len() {
        let take = mu_excess[i].1.min(nu_excess[j].1);
        if take > 0.0 {
            *joint
                .entry((mu_excess[i].0.clone(), nu_excess[j].0.clone()))
                .or_insert(0.0) += take;
        }
        mu_excess[i].1 -= take;
        nu_excess[j].1 -= take;
        if mu_excess[i].1 <= 1e-15 {
            i += 1;
        }
        if j < nu_excess.len() && nu_excess[j].1 <= 1e-15 {
            j += 1;
        }
    }
    Coupling {
        joint,
        left: mu.clone(),
        right: nu.clone(),
    }
}

/// Draw the second coordinate given a realized first coordinate.
pub fn conditional_coupling_sample<T: Ord + Clone>(
    c: &Coupling<T>,
    given_left: &T,
    rng: &mut Rng,
) -> Result<T> {
    Ok(c.conditional_row(given_left)?.sample(rng))
}

/// δ̂(ε) = Σ_x max(0, μ(x) − e^ε ν(x)): the tight additive slack in the
/// max-KL (differential-privacy) inequality μ(R) ≤ e^ε ν(R) + δ over all
/// events R. The maximizing event is exactly {x : μ(x) > e^ε ν(x)}.
pub fn max_kl_audit<T: Ord + Clone>(
    mu: &Distribution<T>,
    nu: &Distribution<T>,
    epsilon: f64,
) -> f64 {
    let scale = epsilon.exp();
    mu.mass
        .iter()
        .map(|(x, &p)| (p - scale * nu.probability(x)).max(0.0))
        .sum()
}
