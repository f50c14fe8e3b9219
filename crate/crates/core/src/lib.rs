//! Randomized, proportional approval-based committee voting rules and the
//! exact analysis machinery needed to verify their properties at desk scale:
//! proportionality axiom checkers, exact output distributions,
//! total-variation stability, optimal couplings, privacy audits, and dynamic
//! committee maintenance with low recourse.

pub mod analysis;
pub mod dist;
pub mod dynamic;
pub mod election;
pub mod error;
pub mod global;
pub mod greedy;
pub mod rng;
pub mod rule;

pub use analysis::{
    end_to_end_tv_ceiling, exact_committee_distribution, generate_instance,
    monte_carlo_distribution, per_step_tv_ceiling, selection_probabilities, stability_report,
    DistMode, InstanceFamily, McDistribution, StabilityReport, DEFAULT_EPS_GRID,
};
pub use dist::{
    conditional_coupling_sample, max_kl_audit, optimal_coupling, tv_distance, Coupling,
    Distribution,
};
pub use dynamic::{
    adversary_sequence, dynamic_gjcr, dynamic_reduce, recourse, AdversaryModel, DynamicTrace,
    ElectionSequence,
};
pub use election::{AxiomVerdict, Committee, Election, PerturbationSpec, ViolationWitness};
pub use error::{Error, Result};
pub use global::{
    default_pav_a, privacy_pav_a, softmax_pav, softmax_pav_distribution, uniform_ejr_distribution,
    uniform_ejr_plus,
};
pub use greedy::{
    default_a_ell, gjcr, next_candidate_distribution, pad_committee, softmax_gjcr,
    step_distribution, GreedyParams, NextCandidateDistribution, Pick, SelectionSequence,
};
pub use rng::{derive_seed, rng_for, rng_for_indexed, rng_from_seed, Rng};
pub use rule::Rule;

/// Shared toy elections for the unit tests.
#[cfg(test)]
pub(crate) mod fixtures {
    use crate::election::Election;

    /// Two blocks of two voters behind c1 and c2, two unapproved dummies,
    /// k = 2.
    pub fn e0() -> Election {
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

    /// `e0` with v1's approval of c1 deleted.
    pub fn e0_prime() -> Election {
        e0().with_voter_approvals("v1", &[]).unwrap()
    }
}
