//! Election data model, approval-profile algebra, proportionality-axiom
//! checkers, and PAV scoring.
//!
//! Candidates and voters keep their declared order; that order is the
//! determinism anchor for every sampling routine and every reported witness.
//! Committees are bitmasks over candidate indices, so the crate supports at
//! most 64 candidates — far more than the enumeration-based analysis can
//! handle anyway.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed};

use crate::error::{input_err, Error, Result};

/// An approval-based committee election: candidates, voters, an approval
/// profile, and a target committee size `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<String>,
    voters: Vec<String>,
    /// Approval set of each voter, as a bitmask over candidate indices.
    approvals: Vec<u64>,
    k: usize,
    candidate_index: BTreeMap<String, usize>,
    voter_index: BTreeMap<String, usize>,
}

/// A committee: a set of at most `k` candidates, stored as a bitmask over the
/// election's candidate indices.
///
/// `Ord` compares the underlying mask integers; that ordering is the canonical
/// committee order used for distribution keys and coupling construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Committee(pub u64);

impl Committee {
    pub const EMPTY: Committee = Committee(0);

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Committee {
        let mut mask = 0u64;
        for i in indices {
            mask |= 1 << i;
        }
        Committee(mask)
    }

    pub fn contains(self, candidate: usize) -> bool {
        self.0 >> candidate & 1 == 1
    }

    pub fn with(self, candidate: usize) -> Committee {
        Committee(self.0 | 1 << candidate)
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Candidate indices in canonical (ascending) order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1)
    }

    /// Size of the symmetric difference with another committee.
    pub fn symmetric_difference(self, other: Committee) -> usize {
        (self.0 ^ other.0).count_ones() as usize
    }
}

/// Outcome of a proportionality check. When violated, the witness certifies
/// the violation and can be re-checked independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub satisfied: bool,
    pub witness: Option<ViolationWitness>,
}

/// A certified axiom violation: candidate `candidate` outside the committee,
/// level `level`, and the full set of its supporters represented by fewer
/// than `level` committee members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationWitness {
    pub candidate: String,
    pub level: usize,
    pub voters: Vec<String>,
}

/// A single-voter change: replace `voter`'s approval set with
/// `new_approvals`. Applying it must change the base election on exactly that
/// one voter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub voter: String,
    pub new_approvals: Vec<String>,
}

impl Election {
    /// Build an election from declared candidate order, voters with their
    /// approval sets (in declared order), and committee size `k`.
    pub fn new(
        candidates: Vec<String>,
        voters: Vec<(String, Vec<String>)>,
        k: usize,
    ) -> Result<Election> {
        let m = candidates.len();
        if m == 0 {
            return input_err("election must have at least one candidate");
        }
        if m > 64 {
            return input_err(format!("at most 64 candidates supported, got {m}"));
        }
        if voters.is_empty() {
            return input_err("election must have at least one voter");
        }
        if k < 1 || k > m {
            return input_err(format!("k must satisfy 1 <= k <= m: k={k}, m={m}"));
        }
        let mut candidate_index = BTreeMap::new();
        for (i, c) in candidates.iter().enumerate() {
            if candidate_index.insert(c.clone(), i).is_some() {
                return input_err(format!("duplicate candidate id {c:?}"));
            }
        }
        let mut voter_index = BTreeMap::new();
        let mut approvals = Vec::with_capacity(voters.len());
        let mut voter_ids = Vec::with_capacity(voters.len());
        for (i, (v, approved)) in voters.iter().enumerate() {
            if voter_index.insert(v.clone(), i).is_some() {
                return input_err(format!("duplicate voter id {v:?}"));
            }
            let mut mask = 0u64;
            for c in approved {
                let Some(&ci) = candidate_index.get(c) else {
                    return input_err(format!("voter {v:?} approves unknown candidate {c:?}"));
                };
                mask |= 1 << ci;
            }
            approvals.push(mask);
            voter_ids.push(voters[i].0.clone());
        }
        Ok(Election {
            candidates,
            voters: voter_ids,
            approvals,
            k,
            candidate_index,
            voter_index,
        })
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn voters(&self) -> &[String] {
        &self.voters
    }

    pub fn candidate_name(&self, index: usize) -> &str {
        &self.candidates[index]
    }

    pub fn candidate_index(&self, id: &str) -> Result<usize> {
        match self.candidate_index.get(id) {
            Some(&i) => Ok(i),
            None => input_err(format!("unknown candidate id {id:?}")),
        }
    }

    pub fn voter_index(&self, id: &str) -> Result<usize> {
        match self.voter_index.get(id) {
            Some(&i) => Ok(i),
            None => input_err(format!("unknown voter id {id:?}")),
        }
    }

    /// Approval mask of the voter at `index`.
    pub fn approval_mask(&self, index: usize) -> u64 {
        self.approvals[index]
    }

    /// Approved candidate ids of the voter at `index`, in canonical order.
    pub fn approval_ids(&self, index: usize) -> Vec<String> {
        Committee(self.approvals[index])
            .indices()
            .map(|c| self.candidates[c].clone())
            .collect()
    }

    /// Build a committee from candidate ids.
    pub fn committee(&self, members: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Committee> {
        let mut mask = 0u64;
        for c in members {
            mask |= 1 << self.candidate_index(c.as_ref())?;
        }
        let w = Committee(mask);
        if w.size() > self.k {
            return input_err(format!(
                "committee of size {} exceeds k = {}",
                w.size(),
                self.k
            ));
        }
        Ok(w)
    }

    /// Candidate ids of a committee, in canonical order.
    pub fn committee_ids(&self, w: Committee) -> Vec<String> {
        w.indices().map(|c| self.candidates[c].clone()).collect()
    }

    /// The supporters N_c of a candidate: all voters approving it.
    pub fn supporters(&self, candidate: &str) -> Result<Vec<String>> {
        let c = self.candidate_index(candidate)?;
        Ok(self
            .voters
            .iter()
            .zip(&self.approvals)
            .filter(|(_, &a)| a >> c & 1 == 1)
            .map(|(v, _)| v.clone())
            .collect())
    }

    /// n_{cℓ}: the number of supporters of candidate index `c` approving
    /// fewer than `level` members of `w`.
    pub fn underrepresented_count(&self, w: Committee, c: usize, level: usize) -> usize {
        self.approvals
            .iter()
            .filter(|&&a| a >> c & 1 == 1 && (a & w.0).count_ones() < level as u32)
            .count()
    }

    /// Same as [`underrepresented_count`](Self::underrepresented_count), by
    /// candidate id, with input validation.
    pub fn underrepresented_supporters(
        &self,
        w: Committee,
        candidate: &str,
        level: usize,
    ) -> Result<usize> {
        let c = self.candidate_index(candidate)?;
        if level < 1 || level > self.k {
            return input_err(format!("level must lie in [1, k={}], got {level}", self.k));
        }
        Ok(self.underrepresented_count(w, c, level))
    }

    /// Exact PAV score of a committee: each voter contributes the harmonic
    /// number of its approved winners. Denominators never exceed `k`, so
    /// `i64` rationals are ample.
    pub fn pav_score_exact(&self, w: Committee) -> Ratio<i64> {
        let mut total = Ratio::new(0, 1);
        for &a in &self.approvals {
            let hits = (a & w.0).count_ones() as i64;
            for r in 1..=hits {
                total += Ratio::new(1, r);
            }
        }
        total
    }

    /// PAV score as a float; see [`pav_score_exact`](Self::pav_score_exact).
    pub fn pav_score(&self, w: Committee) -> f64 {
        let r = self.pav_score_exact(w);
        *r.numer() as f64 / *r.denom() as f64
    }

    /// Check `ℓmax`-capped `α`-EJR+ (α = 1, ℓmax = k is exact EJR+;
    /// α = 1, ℓmax = 1 is JR).
    ///
    /// A violation at level ℓ exists iff some candidate c outside `w` has
    /// n_{cℓ} ≥ (ℓ/α)·(n/k). The quantification over under-represented voter
    /// groups reduces to this single count: the maximal group approving c
    /// whose members all have coverage below ℓ is exactly the n_{cℓ} voters.
    /// The threshold comparison is exact — `α` is converted to the rational
    /// it denotes as a float and compared by integer cross-multiplication.
    pub fn check_proportionality(
        &self,
        w: Committee,
        alpha: f64,
        ell_max: usize,
    ) -> Result<AxiomVerdict> {
        let (alpha_num, alpha_den) = validate_alpha(alpha)?;
        if ell_max < 1 || ell_max > self.k {
            return input_err(format!(
                "ell_max must lie in [1, k={}], got {ell_max}",
                self.k
            ));
        }
        let n = self.num_voters();
        let k = self.k;
        let exact = alpha == 1.0;
        for level in 1..=ell_max {
            for c in 0..self.num_candidates() {
                if w.contains(c) {
                    continue;
                }
                let count = self.underrepresented_count(w, c, level);
                // count ≥ (ℓ/α)·(n/k)  ⇔  count·α_num·k ≥ ℓ·n·α_den
                let violated = if exact {
                    count * k >= level * n
                } else {
                    BigInt::from(count) * &alpha_num * BigInt::from(k)
                        >= BigInt::from(level) * BigInt::from(n) * &alpha_den
                };
                if violated {
                    let voters = self
                        .voters
                        .iter()
                        .zip(&self.approvals)
                        .filter(|(_, &a)| {
                            a >> c & 1 == 1 && (a & w.0).count_ones() < level as u32
                        })
                        .map(|(v, _)| v.clone())
                        .collect();
                    return Ok(AxiomVerdict {
                        satisfied: false,
                        witness: Some(ViolationWitness {
                            candidate: self.candidates[c].clone(),
                            level,
                            voters,
                        }),
                    });
                }
            }
        }
        Ok(AxiomVerdict {
            satisfied: true,
            witness: None,
        })
    }

    /// All committees of size exactly `k` (or at most `k`) that pass
    /// [`check_proportionality`](Self::check_proportionality). Refuses when
    /// the number of subsets to scan exceeds `cap` (default 10⁶).
    pub fn enumerate_proportional_committees(
        &self,
        alpha: f64,
        ell_max: usize,
        exact_size: bool,
        cap: Option<u64>,
    ) -> Result<Vec<Committee>> {
        let cap = cap.unwrap_or(1_000_000);
        let m = self.num_candidates();
        let k = self.k;
        let total: u64 = if exact_size {
            binomial(m, k)
        } else {
            (0..=k).map(|i| binomial(m, i)).sum()
        };
        if total > cap {
            return Err(Error::ResourceCap(format!(
                "{total} committees to enumerate exceeds cap {cap}"
            )));
        }
        let mut out = Vec::new();
        let mut scan = |w: Committee| -> Result<()> {
            if self.check_proportionality(w, alpha, ell_max)?.satisfied {
                out.push(w);
            }
            Ok(())
        };
        if exact_size {
            for w in subsets_of_size(m, k) {
                scan(w)?;
            }
        } else {
            for size in 0..=k {
                for w in subsets_of_size(m, size) {
                    scan(w)?;
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Replace one voter's approval set (possibly with the same set).
    pub fn with_voter_approvals(&self, voter: &str, approvals: &[String]) -> Result<Election> {
        let v = self.voter_index(voter)?;
        let mut mask = 0u64;
        for c in approvals {
            mask |= 1 << self.candidate_index(c)?;
        }
        let mut next = self.clone();
        next.approvals[v] = mask;
        Ok(next)
    }

    /// Apply a single-voter perturbation, validating that the result differs
    /// from this election on exactly that voter.
    pub fn apply_perturbation(&self, spec: &PerturbationSpec) -> Result<Election> {
        let v = self.voter_index(&spec.voter)?;
        let next = self.with_voter_approvals(&spec.voter, &spec.new_approvals)?;
        if next.approvals[v] == self.approvals[v] {
            return input_err(format!(
                "perturbation of voter {:?} leaves its approvals unchanged",
                spec.voter
            ));
        }
        Ok(next)
    }

    /// The voter on which two elections differ, or an error if they are not
    /// neighbors (same candidates, voters, and k; exactly one approval set
    /// differs).
    pub fn neighbor_voter(&self, other: &Election) -> Result<usize> {
        if self.candidates != other.candidates
            || self.voters != other.voters
            || self.k != other.k
        {
            return input_err("elections differ beyond a single voter's approvals");
        }
        let mut differing = None;
        for (i, (a, b)) in self.approvals.iter().zip(&other.approvals).enumerate() {
            if a != b {
                if differing.is_some() {
                    return input_err("elections differ on more than one voter");
                }
                differing = Some(i);
            }
        }
        match differing {
            Some(i) => Ok(i),
            None => input_err("elections are identical, not neighbors"),
        }
    }

    /// Δ_v = |A_v ⊕ A_v′| for a neighboring pair.
    pub fn neighbor_delta(&self, other: &Election) -> Result<usize> {
        let v = self.neighbor_voter(other)?;
        Ok((self.approvals[v] ^ other.approvals[v]).count_ones() as usize)
    }

    /// Relabel candidates by a permutation of indices: new candidate `i` is
    /// old candidate `perm[i]`. Voter order is unchanged.
    pub fn relabel_candidates(&self, perm: &[usize]) -> Result<Election> {
        let m = self.num_candidates();
        if perm.len() != m {
            return input_err("permutation length does not match candidate count");
        }
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || seen[p] {
                return input_err("not a permutation of candidate indices");
            }
            seen[p] = true;
        }
        let candidates: Vec<String> = perm.iter().map(|&p| self.candidates[p].clone()).collect();
        let voters = self
            .voters
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let old = self.approvals[i];
                let approved = (0..m)
                    .filter(|&new| old >> perm[new] & 1 == 1)
                    .map(|new| candidates[new].clone())
                    .collect();
                (v.clone(), approved)
            })
            .collect();
        Election::new(candidates, voters, self.k)
    }
}

/// Validate α ∈ (0,1] and return the exact rational it denotes as a float
/// (every finite f64 is a dyadic rational).
pub(crate) fn validate_alpha(alpha: f64) -> Result<(BigInt, BigInt)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return input_err(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let r = BigRational::from_f64(alpha)
        .ok_or_else(|| Error::InvalidInput(format!("alpha {alpha} is not finite")))?;
    Ok((r.numer().abs(), r.denom().clone()))
}

/// All subsets of `{0, .., m-1}` of the given size, as committees in
/// ascending mask order.
pub(crate) fn subsets_of_size(m: usize, size: usize) -> Vec<Committee> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(m: usize, size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Committee>) {
        if current.len() == size {
            out.push(Committee::from_indices(current.iter().copied()));
            return;
        }
        for c in start..m {
            if m - c < size - current.len() {
                break;
            }
            current.push(c);
            rec(m, size, c + 1, current, out);
            current.pop();
        }
    }
    rec(m, size, 0, &mut current, &mut out);
    out.sort();
    out
}

pub(crate) fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (m - i) as u128 / (i + 1) as u128;
    }
    result.min(u64::MAX as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn e0() -> Election {
        Election::new(
            vec!["c1".into(), "c2".into(), "d1".into(), "d2".into()],
            vec![
                ("v1".into(), vec!["c1".into()]),
                ("v2".into(), vec!["c1".into()]),
                ("v3".into(), vec!["c2".into()]),
                ("v4".into(), vec!["c2".into()]),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn supporters_of_toy_election() {
        let e = e0();
        assert_eq!(e.supporters("c1").unwrap(), vec!["v1", "v2"]);
        assert_eq!(e.supporters("d1").unwrap(), Vec::<String>::new());
        assert!(e.supporters("zz").is_err());
    }

    #[test]
    fn underrepresented_counts() {
        let e = e0();
        let empty = Committee::EMPTY;
        let c1 = e.committee(["c1"]).unwrap();
        assert_eq!(e.underrepresented_supporters(empty, "c1", 1).unwrap(), 2);
        assert_eq!(e.underrepresented_supporters(c1, "c1", 1).unwrap(), 0);
        assert_eq!(e.underrepresented_supporters(c1, "c2", 1).unwrap(), 2);
    }

    #[test]
    fn pav_scores() {
        let e = e0();
        assert_eq!(e.pav_score(e.committee(["c1", "c2"]).unwrap()), 4.0);
        assert_eq!(e.pav_score(e.committee(["c1"]).unwrap()), 2.0);

        let single = Election::new(
            vec!["a".into(), "b".into()],
            vec![("v".into(), vec!["a".into(), "b".into()])],
            2,
        )
        .unwrap();
        assert_eq!(single.pav_score(single.committee(["a", "b"]).unwrap()), 1.5);
    }

    #[test]
    fn pav_marginal_gain_identity() {
        let e = e0();
        for w in e
            .enumerate_proportional_committees(1.0, 1, false, None)
            .unwrap()
        {
            for c in 0..e.num_candidates() {
                if w.contains(c) || w.size() == e.k() {
                    continue;
                }
                let gain = e.pav_score_exact(w.with(c)) - e.pav_score_exact(w);
                let mut expect = Ratio::new(0, 1);
                for v in 0..e.num_voters() {
                    let a = e.approval_mask(v);
                    if a >> c & 1 == 1 {
                        expect += Ratio::new(1, (a & w.0).count_ones() as i64 + 1);
                    }
                }
                assert_eq!(gain, expect);
            }
        }
    }

    #[test]
    fn proportionality_of_toy_committees() {
        let e = e0();
        let good = e.committee(["c1", "c2"]).unwrap();
        assert!(e.check_proportionality(good, 1.0, 2).unwrap().satisfied);

        let bad = e.committee(["c1", "d1"]).unwrap();
        let verdict = e.check_proportionality(bad, 1.0, 1).unwrap();
        assert!(!verdict.satisfied);
        let w = verdict.witness.unwrap();
        assert_eq!(w.candidate, "c2");
        assert_eq!(w.level, 1);
        assert_eq!(w.voters, vec!["v3", "v4"]);
    }

    #[test]
    fn enumeration_on_toy_election() {
        let e = e0();
        let all = e
            .enumerate_proportional_committees(1.0, 2, false, None)
            .unwrap();
        assert_eq!(all, vec![e.committee(["c1", "c2"]).unwrap()]);
    }

    #[test]
    fn full_committee_vacuously_proportional() {
        let e = Election::new(
            vec!["a".into(), "b".into()],
            vec![("v".into(), vec!["a".into()])],
            2,
        )
        .unwrap();
        let exact = e
            .enumerate_proportional_committees(1.0, 2, true, None)
            .unwrap();
        assert_eq!(exact, vec![e.committee(["a", "b"]).unwrap()]);
    }

    #[test]
    fn perturbation_round_trip() {
        let e = e0();
        let spec = PerturbationSpec {
            voter: "v1".into(),
            new_approvals: vec![],
        };
        let e2 = e.apply_perturbation(&spec).unwrap();
        assert_eq!(e.neighbor_voter(&e2).unwrap(), 0);
        assert_eq!(e.neighbor_delta(&e2).unwrap(), 1);

        let noop = PerturbationSpec {
            voter: "v1".into(),
            new_approvals: vec!["c1".into()],
        };
        assert!(e.apply_perturbation(&noop).is_err());
    }

    #[test]
    fn relabeling_is_covariant() {
        let e = e0();
        let perm = vec![1, 0, 3, 2];
        let r = e.relabel_candidates(&perm).unwrap();
        assert_eq!(r.candidates(), ["c2", "c1", "d2", "d1"]);
        assert_eq!(r.supporters("c1").unwrap(), vec!["v1", "v2"]);
        let w = r.committee(["c1", "c2"]).unwrap();
        assert!(r.check_proportionality(w, 1.0, 2).unwrap().satisfied);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(subsets_of_size(4, 2).len(), 6);
    }
}
