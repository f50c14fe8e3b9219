//! Online dynamic committee maintenance against an oblivious adversary: a
//! generic dynamic-to-stable reduction for rules with computable exact
//! distributions, and the per-round-coupled dynamic variant of the softmax
//! greedy rule. Both keep the marginal law of every maintained committee
//! equal to the static rule's law while minimizing expected recourse.

use rand::Rng as _;

use crate::dist::{conditional_coupling_sample, optimal_coupling, Distribution};
use crate::election::{Committee, Election, PerturbationSpec};
use crate::error::{input_err, Result};
use crate::greedy::{softmax_gjcr, step_distribution, GreedyParams, Pick, SelectionSequence};
use crate::rng::Rng;
use crate::rule::Rule;

/// A base election plus a sequence of single-voter changes, applied
/// cumulatively. Steps that leave the election unchanged are permitted (the
/// constant sequence is a useful baseline).
#[derive(Debug, Clone, PartialEq)]
pub struct ElectionSequence {
    pub base: Election,
    pub steps: Vec<PerturbationSpec>,
}

impl ElectionSequence {
    /// Materialize the elections E¹, …, E^T (T = steps + 1).
    pub fn elections(&self) -> Result<Vec<Election>> {
        let mut out = vec![self.base.clone()];
        for spec in &self.steps {
            let next = out
                .last()
                .unwrap()
                .with_voter_approvals(&spec.voter, &spec.new_approvals)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Result of a dynamic run: the maintained committees, per-step recourse,
/// and (for the greedy variant) the per-step selection sequences the
/// coupling logic conditions on.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicTrace {
    pub committees: Vec<Committee>,
    pub per_step_recourse: Vec<usize>,
    pub sequences: Vec<SelectionSequence>,
}

impl DynamicTrace {
    pub fn total_recourse(&self) -> usize {
        self.per_step_recourse.iter().sum()
    }
}

/// Total and per-step recourse R(W) = Σ_t |W^t ⊕ W^{t+1}| of a committee
/// sequence.
pub fn recourse(committees: &[Committee]) -> Result<(usize, Vec<usize>)> {
    if committees.is_empty() {
        return input_err("recourse of an empty trace");
    }
    let per_step: Vec<usize> = committees
        .windows(2)
        .map(|w| w[0].symmetric_difference(w[1]))
        .collect();
    Ok((per_step.iter().sum(), per_step))
}

/// The oblivious adversary's update model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryModel {
    /// Toggle one uniformly chosen approval of one uniformly chosen voter.
    SingleApproval,
    /// Redraw one uniformly chosen voter's full approval set uniformly,
    /// rejecting draws equal to the current set.
    FullResample,
}

/// Generate a T-step perturbation sequence up front (the adversary never
/// sees the algorithm's random choices).
pub fn adversary_sequence(
    e: &Election,
    steps: usize,
    model: AdversaryModel,
    rng: &mut Rng,
) -> Result<ElectionSequence> {
    let m = e.num_candidates();
    let full_mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut current = e.clone();
    let mut specs = Vec::with_capacity(steps);
    for _ in 0..steps {
        let v = rng.gen_range(0..e.num_voters());
        let old = current.approval_mask(v);
        let new_mask = match model {
            AdversaryModel::SingleApproval => old ^ (1 << rng.gen_range(0..m)),
            AdversaryModel::FullResample => loop {
                let draw = rng.gen::<u64>() & full_mask;
                if draw != old {
                    break draw;
                }
            },
        };
        let new_approvals = Committee(new_mask)
            .indices()
            .map(|c| e.candidate_name(c).to_string())
            .collect();
        let spec = PerturbationSpec {
            voter: e.voters()[v].clone(),
            new_approvals,
        };
        current = current.with_voter_approvals(&spec.voter, &spec.new_approvals)?;
        specs.push(spec);
    }
    Ok(ElectionSequence {
        base: e.clone(),
        steps: specs,
    })
}

/// Dynamic-to-stable reduction: W¹ is drawn from the rule's exact
/// distribution on E¹; each later W^t is drawn from the optimal coupling of
/// the previous and current exact distributions, conditioned on the realized
/// W^{t−1}. Each W^t is marginally distributed exactly as the static rule on
/// E^t, and expected per-step recourse is at most 2k times the per-step TV
/// distance.
pub fn dynamic_reduce(rule: &Rule, seq: &ElectionSequence, rng: &mut Rng) -> Result<DynamicTrace> {
    let elections = seq.elections()?;
    let mut distributions = Vec::with_capacity(elections.len());
    for e in &elections {
        distributions.push(rule.exact_distribution(e)?);
    }
    let mut committees = Vec::with_capacity(elections.len());
    committees.push(distributions[0].sample(rng));
    for t in 1..elections.len() {
        let coupling = optimal_coupling(&distributions[t - 1], &distributions[t]);
        let prev = *committees.last().unwrap();
        committees.push(conditional_coupling_sample(&coupling, &prev, rng)?);
    }
    let (_, per_step_recourse) = recourse(&committees)?;
    Ok(DynamicTrace {
        committees,
        per_step_recourse,
        sequences: Vec::new(),
    })
}

fn pick_distribution(
    e: &Election,
    w: Committee,
    level: usize,
    params: &GreedyParams,
) -> Result<Distribution<Pick>> {
    Distribution::new(step_distribution(e, w, level, params)?.support())
}

/// The dynamic softmax greedy rule. Step 1 runs the static rule and stores
/// its selection sequence. At each later step the rounds are replayed
/// against the stored sequence: while every pick so far agrees with the old
/// one, the next pick is drawn from the optimal coupling of the old and new
/// round distributions conditioned on the old pick; after the first
/// disagreement the remaining picks are drawn fresh from the new round
/// distributions. Marginally each committee is distributed exactly as the
/// static rule on its election.
pub fn dynamic_gjcr(
    seq: &ElectionSequence,
    params: &GreedyParams,
    rng: &mut Rng,
) -> Result<DynamicTrace> {
    let elections = seq.elections()?;
    params.validate(&elections[0])?;
    let k = elections[0].k();
    let ell_max = params.ell_max(&elections[0]);

    let (w1, s1) = softmax_gjcr(&elections[0], params, rng)?;
    let mut committees = vec![w1];
    let mut sequences = vec![s1];

    for t in 1..elections.len() {
        let old_e = &elections[t - 1];
        let new_e = &elections[t];
        let old_seq = sequences.last().unwrap().clone();

        let mut w_old = Committee::EMPTY;
        let mut w_new = Committee::EMPTY;
        let mut agree = true;
        let mut entries = Vec::with_capacity(ell_max * k);
        let mut idx = 0;
        for level in (1..=ell_max).rev() {
            for _round in 0..k {
                let new_dist = pick_distribution(new_e, w_new, level, params)?;
                let pick = if agree {
                    let old_dist = pick_distribution(old_e, w_old, level, params)?;
                    let coupling = optimal_coupling(&old_dist, &new_dist);
                    let old_pick = old_seq.entries[idx];
                    let new_pick = conditional_coupling_sample(&coupling, &old_pick, rng)?;
                    if new_pick != old_pick {
                        agree = false;
                    }
                    if let Pick::Candidate(c) = old_pick {
                        w_old = w_old.with(c);
                    }
                    new_pick
                } else {
                    new_dist.sample(rng)
                };
                if let Pick::Candidate(c) = pick {
                    w_new = w_new.with(c);
                }
                entries.push(pick);
                idx += 1;
            }
        }
        committees.push(w_new);
        sequences.push(SelectionSequence { entries });
    }

    let (_, per_step_recourse) = recourse(&committees)?;
    Ok(DynamicTrace {
        committees,
        per_step_recourse,
        sequences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{generate_instance, InstanceFamily};
    use crate::fixtures::{e0, e0_prime};
    use crate::rng::rng_for;

    fn constant_sequence(e: &Election, steps: usize) -> ElectionSequence {
        let spec = PerturbationSpec {
            voter: e.voters()[0].clone(),
            new_approvals: e.approval_ids(0),
        };
        ElectionSequence {
            base: e.clone(),
            steps: vec![spec; steps],
        }
    }

    #[test]
    fn recourse_arithmetic() {
        let e = e0();
        let w1 = e.committee(["c1", "c2"]).unwrap();
        let w2 = e.committee(["c2", "d1"]).unwrap();
        assert_eq!(recourse(&[w1, w1]).unwrap().0, 0);
        assert_eq!(recourse(&[w1, w2]).unwrap().0, 2);
        assert_eq!(recourse(&[w1]).unwrap().0, 0);
        assert!(recourse(&[]).is_err());
    }

    #[test]
    fn adversary_sequences_are_single_voter_steps() {
        let e = e0();
        for (seed, model) in [
            (1, AdversaryModel::SingleApproval),
            (2, AdversaryModel::FullResample),
        ] {
            let mut rng = rng_for(seed, "adv");
            let seq = adversary_sequence(&e, 20, model, &mut rng).unwrap();
            let elections = seq.elections().unwrap();
            assert_eq!(elections.len(), 21);
            for pair in elections.windows(2) {
                let v = pair[0].neighbor_voter(&pair[1]).unwrap();
                let delta = pair[0].neighbor_delta(&pair[1]).unwrap();
                assert!(delta >= 1);
                if model == AdversaryModel::SingleApproval {
                    assert_eq!(delta, 1);
                }
                let _ = v;
            }
        }
    }

    #[test]
    fn zero_step_sequence() {
        let e = e0();
        let mut rng = rng_for(0, "adv0");
        let seq = adversary_sequence(&e, 0, AdversaryModel::SingleApproval, &mut rng).unwrap();
        assert_eq!(seq.elections().unwrap().len(), 1);
    }

    #[test]
    fn reduce_on_constant_sequence_has_no_recourse() {
        let e = e0_prime();
        let seq = constant_sequence(&e, 5);
        for seed in 0..10 {
            let mut rng = rng_for(seed, "reduce");
            let trace = dynamic_reduce(&Rule::UniformEjrPlus, &seq, &mut rng).unwrap();
            assert_eq!(trace.total_recourse(), 0);
            assert_eq!(trace.committees.len(), 6);
        }
    }

    #[test]
    fn reduce_on_toy_pair() {
        let e = e0();
        let seq = ElectionSequence {
            base: e.clone(),
            steps: vec![PerturbationSpec {
                voter: "v1".into(),
                new_approvals: vec![],
            }],
        };
        let rule = Rule::SoftmaxGjcr(GreedyParams::default());
        let mut rng = rng_for(3, "reduce2");
        let trace = dynamic_reduce(&rule, &seq, &mut rng).unwrap();
        assert_eq!(trace.committees[0], e.committee(["c1", "c2"]).unwrap());
        assert_eq!(trace.committees[1], e.committee(["c2"]).unwrap());
        assert_eq!(trace.total_recourse(), 1);
    }

    #[test]
    fn dynamic_gjcr_on_constant_sequence_has_no_recourse() {
        let e = e0();
        let seq = constant_sequence(&e, 5);
        for seed in 0..10 {
            let mut rng = rng_for(seed, "dgjcr");
            let trace = dynamic_gjcr(&seq, &GreedyParams::default(), &mut rng).unwrap();
            assert_eq!(trace.total_recourse(), 0);
        }
    }

    #[test]
    fn dynamic_gjcr_on_toy_pair() {
        let e = e0();
        let seq = ElectionSequence {
            base: e.clone(),
            steps: vec![PerturbationSpec {
                voter: "v1".into(),
                new_approvals: vec![],
            }],
        };
        for seed in 0..20 {
            let mut rng = rng_for(seed, "dgjcr2");
            let trace = dynamic_gjcr(&seq, &GreedyParams::default(), &mut rng).unwrap();
            assert_eq!(trace.committees[0], e.committee(["c1", "c2"]).unwrap());
            assert_eq!(trace.committees[1], e.committee(["c2"]).unwrap());
            assert_eq!(trace.total_recourse(), 1);
        }
    }

    #[test]
    fn dynamic_gjcr_outputs_stay_proportional() {
        let (e, _) = generate_instance(InstanceFamily::Blocks, 12, 2, Some(5)).unwrap();
        let params = GreedyParams::default();
        for seed in 0..10 {
            let mut adv_rng = rng_for(seed, "adv-seq");
            let seq =
                adversary_sequence(&e, 10, AdversaryModel::SingleApproval, &mut adv_rng).unwrap();
            let mut rng = rng_for(seed, "dgjcr-run");
            let trace = dynamic_gjcr(&seq, &params, &mut rng).unwrap();
            let elections = seq.elections().unwrap();
            for (et, &wt) in elections.iter().zip(&trace.committees) {
                assert!(wt.size() <= et.k());
                assert!(et.check_proportionality(wt, 1.0, et.k()).unwrap().satisfied);
            }
        }
    }
}
