mod common;

use common::*;
use fairdiv::mechanisms::{Mechanism, MechanismKind};
use fairdiv::model::Limits;
use fairdiv::strategic::{osp_falsify, sp_falsify, verify_deviation, BidGrid};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

#[test]
fn normalization_holds() {
    normalization().unwrap();
}

#[test]
fn mechanisms_are_non_wasteful() {
    non_wastefulness().unwrap();
}

#[test]
fn like_marginals() {
    like_marginal_law().unwrap();
}

#[test]
fn shared_envy_matches_envy_on_positive_utilities() {
    sef_equals_ef_on_non_zero().unwrap();
}

#[test]
fn ex_post_envy_freeness_implies_ex_ante() {
    efp_implies_efa().unwrap();
}

#[test]
fn ex_post_equivalence_implies_ex_ante() {
    ex_post_implies_ex_ante().unwrap();
}

fn small_spec() -> impl Strategy<Value = fairdiv::instances::DomainSpec> {
    (
        0..fairdiv::instances::Domain::ALL.len(),
        2..=3usize,
        1..=3usize,
        any::<u64>(),
    )
        .prop_map(|(d, n, m, seed)| {
            fairdiv::instances::DomainSpec::new(fairdiv::instances::Domain::ALL[d], n, m, seed)
                .with_values(3, 1)
        })
}

proptest! {
    #![proptest_config(Config { cases: 200, rng_seed: RngSeed::Fixed(7), failure_persistence: None, ..Config::default() })]

    #[test]
    fn strategy_proof_mechanisms_have_no_online_deviation(spec in small_spec()) {
        let inst = instance(&spec);
        let limits = Limits::default();
        let grid = BidGrid::for_instance(&inst, &[]);
        for mech in [MechanismKind::Like, MechanismKind::Orp] {
            prop_assert!(osp_falsify(&mech, &inst, &grid, &limits).unwrap().is_none(), "{} {}", mech, spec);
        }
    }

    #[test]
    fn found_deviations_replay(spec in small_spec()) {
        let inst = instance(&spec);
        let limits = Limits::default();
        let grid = BidGrid::for_instance(&inst, &[]);
        for mech in [MechanismKind::MaximumLike, MechanismKind::ParetoLike, MechanismKind::BalancedLike] {
            if let Some(dev) = sp_falsify(&mech, &inst, &grid, &limits).unwrap() {
                prop_assert!(verify_deviation(&mech, &inst, &dev, &limits).unwrap(), "{}", mech.name());
                prop_assert!(dev.gain() > num_traits::Zero::zero());
            }
            if let Some(dev) = osp_falsify(&mech, &inst, &grid, &limits).unwrap() {
                prop_assert!(verify_deviation(&mech, &inst, &dev, &limits).unwrap(), "{}", mech.name());
            }
        }
    }
}
