#![allow(dead_code)]

use fairdiv::axioms::{
    check_efa, check_efp, check_sefa, check_sefp, ex_ante_equivalent, ex_post_equivalent,
};
use fairdiv::instances::{generate, Domain, DomainSpec};
use fairdiv::mechanisms::{run_sincere, Mechanism, MechanismKind};
use fairdiv::model::{int, marginals, ratio, BidProfile, Instance, Limits, Matrix, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

pub fn runner(seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn any_spec() -> impl Strategy<Value = DomainSpec> {
    (0..Domain::ALL.len(), 1..=3usize, 0..=4usize, any::<u64>())
        .prop_map(|(d, n, m, seed)| DomainSpec::new(Domain::ALL[d], n, m, seed))
}

pub fn non_zero_spec() -> impl Strategy<Value = DomainSpec> {
    let domains = [
        Domain::NonZero,
        Domain::IdenticalCardinal,
        Domain::IdenticalOrdinal,
        Domain::Borda,
        Domain::Lexicographic,
    ];
    (0..domains.len(), 1..=3usize, 0..=4usize, any::<u64>())
        .prop_map(move |(d, n, m, seed)| DomainSpec::new(domains[d], n, m, seed))
}

/// Bid profiles with arbitrary zero columns.
pub fn any_bids() -> impl Strategy<Value = BidProfile> {
    (1..=3usize, 0..=4usize).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(0..=3i64, m), n)
            .prop_map(|rows| BidProfile::new(Matrix::from_integers(&rows).unwrap()))
    })
}

pub fn instance(spec: &DomainSpec) -> Instance {
    generate(spec).unwrap()
}

pub fn mechanisms(agents: usize) -> Vec<MechanismKind> {
    MechanismKind::all(agents)
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn finish(
    result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>,
) -> Result<(), String> {
    result.map_err(|e| e.to_string())
}

/// Probabilities are positive and sum to one.
pub fn normalization() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(1).run(&any_bids(), |bids| {
        for mech in mechanisms(bids.agents()) {
            let dist = mech.run(&bids, &limits).map_err(fail)?;
            let total: Rational = dist.iter().map(|(_, p)| p.clone()).sum();
            prop_assert_eq!(total, Rational::one(), "{}", mech);
            prop_assert!(dist.iter().all(|(_, p)| *p > Rational::zero()));
        }
        Ok(())
    }))
}

/// Items go only to positive bidders and are discarded only when nobody bids.
pub fn non_wastefulness() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(2).run(&any_bids(), |bids| {
        for mech in mechanisms(bids.agents()) {
            let dist = mech.run(&bids, &limits).map_err(fail)?;
            for alloc in dist.support() {
                for j in 0..bids.items() {
                    let anyone = (0..bids.agents()).any(|i| *bids.bid(i, j) > Rational::zero());
                    match alloc.owner(j) {
                        Some(i) => {
                            prop_assert!(*bids.bid(i, j) > Rational::zero(), "{} item {}", mech, j)
                        }
                        None => prop_assert!(!anyone, "{} discarded item {}", mech, j),
                    }
                }
            }
        }
        Ok(())
    }))
}

/// Like gives each item to each positive bidder with probability one over
/// the number of positive bidders.
pub fn like_marginal_law() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(3).run(&any_bids(), |bids| {
        let p = marginals(&MechanismKind::Like.run(&bids, &limits).map_err(fail)?);
        for j in 0..bids.items() {
            let k = (0..bids.agents())
                .filter(|&i| *bids.bid(i, j) > Rational::zero())
                .count();
            for i in 0..bids.agents() {
                let want = if *bids.bid(i, j) > Rational::zero() {
                    ratio(1, k as i64)
                } else {
                    int(0)
                };
                prop_assert_eq!(p.get(i, j), &want);
            }
        }
        Ok(())
    }))
}

/// With all utilities positive the shared-item variants coincide with the
/// plain ones.
pub fn sef_equals_ef_on_non_zero() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(4).run(&non_zero_spec(), |spec| {
        let inst = instance(&spec);
        for mech in mechanisms(inst.agents()) {
            let dist = run_sincere(&mech, &inst, &limits).map_err(fail)?;
            let efa = check_efa(&dist, &inst).map_err(fail)?;
            let sefa = check_sefa(&dist, &inst).map_err(fail)?;
            let efp = check_efp(&dist, &inst).map_err(fail)?;
            let sefp = check_sefp(&dist, &inst).map_err(fail)?;
            prop_assert_eq!(efa.holds, sefa.holds, "{} {}", mech, spec);
            prop_assert_eq!(efp.holds, sefp.holds, "{} {}", mech, spec);
        }
        Ok(())
    }))
}

pub fn efp_implies_efa() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(5).run(&any_spec(), |spec| {
        let inst = instance(&spec);
        for mech in mechanisms(inst.agents()) {
            let dist = run_sincere(&mech, &inst, &limits).map_err(fail)?;
            if check_efp(&dist, &inst).map_err(fail)?.holds {
                prop_assert!(
                    check_efa(&dist, &inst).map_err(fail)?.holds,
                    "{} {}",
                    mech,
                    spec
                );
            }
        }
        Ok(())
    }))
}

/// Over all pairs of mechanisms; identical-utility instances make many
/// pairs ex post equivalent.
pub fn ex_post_implies_ex_ante() -> Result<(), String> {
    let limits = Limits::default();
    finish(runner(6).run(&any_spec(), |spec| {
        let inst = instance(&spec);
        let bids = inst.sincere_bids();
        let all = mechanisms(inst.agents());
        for a in &all {
            for b in &all {
                if ex_post_equivalent(a, b, &bids, &limits).map_err(fail)? {
                    prop_assert!(ex_ante_equivalent(a, b, &bids, &limits).map_err(fail)?);
                }
            }
        }
        Ok(())
    }))
}

pub type Property = fn() -> Result<(), String>;

pub const PROPERTIES: [(&str, Property); 6] = [
    ("normalization", normalization),
    ("non-wastefulness", non_wastefulness),
    ("like marginal law", like_marginal_law),
    ("sef equals ef on non-zero", sef_equals_ef_on_non_zero),
    ("efp implies efa", efp_implies_efa),
    ("ex post implies ex ante", ex_post_implies_ex_ante),
];
