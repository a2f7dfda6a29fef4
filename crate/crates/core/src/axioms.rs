//! Fairness and efficiency checkers.
//!
//! Checkers audit a distribution against the true utilities of an
//! instance. They never look at the mechanism that produced it, so hand-built
//! distributions can be audited the same way. A failing verdict carries a
//! witness and the exact size of the worst violation.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{
    bundle_utility, expected_utilities, marginals, Allocation, AllocationDistribution,
    AssignmentMatrix, BidProfile, Instance, Limits, Rational,
};
use crate::oracle::{self, LpSolution};
use crate::simplex::{self, LinearProgram, LpOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Efp,
    Efa,
    Sefp,
    Sefa,
    Befp,
    Pep,
    Pea,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Efa,
        Axiom::Sefa,
        Axiom::Efp,
        Axiom::Sefp,
        Axiom::Befp,
        Axiom::Pea,
        Axiom::Pep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Efp => "efp",
            Axiom::Efa => "efa",
            Axiom::Sefp => "sefp",
            Axiom::Sefa => "sefa",
            Axiom::Befp => "befp",
            Axiom::Pep => "pep",
            Axiom::Pea => "pea",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_uppercase())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "axiom",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `envious` prefers `envied`'s bundle; `allocation` is `None` for the
    /// ex ante properties.
    Envy {
        allocation: Option<Allocation>,
        envious: usize,
        envied: usize,
    },
    /// A returned allocation and an allocation that Pareto dominates it.
    Dominated {
        allocation: Allocation,
        by: Allocation,
    },
    /// A lottery whose expected utilities Pareto dominate the outcome.
    Lottery(LpSolution),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Size of the worst violation; zero when the property holds.
    pub margin: Rational,
}

impl AxiomVerdict {
    fn from_worst(axiom: Axiom, worst: Option<(Rational, Witness)>) -> Self {
        match worst {
            Some((margin, witness)) => AxiomVerdict {
                axiom,
                holds: false,
                witness: Some(witness),
                margin,
            },
            None => AxiomVerdict {
                axiom,
                holds: true,
                witness: None,
                margin: Rational::zero(),
            },
        }
    }
}

/// Keeps the largest positive violation, first one among ties.
fn consider(
    worst: &mut Option<(Rational, Witness)>,
    margin: Rational,
    witness: impl FnOnce() -> Witness,
) {
    if margin.is_positive() && worst.as_ref().is_none_or(|(m, _)| margin > *m) {
        *worst = Some((margin, witness()));
    }
}

fn check_items(dist: &AllocationDistribution, instance: &Instance) -> Result<()> {
    if dist.agents() != instance.agents() || dist.items() != instance.items() {
        return Err(Error::ShapeMismatch {
            expected_agents: instance.agents(),
            expected_items: instance.items(),
            agents: dist.agents(),
            items: dist.items(),
        });
    }
    Ok(())
}

/// `u^SEFP_{ik}(π)`: agent `i`'s value for its own items that `k` also likes.
pub fn shared_utility_ex_post(
    alloc: &Allocation,
    i: usize,
    k: usize,
    instance: &Instance,
) -> Rational {
    alloc
        .bundle(i)
        .into_iter()
        .filter(|&h| instance.utility(k, h).is_positive())
        .map(|h| instance.utility(i, h))
        .sum()
}

/// `ū^SEFA_{ik}`: agent `i`'s expected value for the items `k` likes.
pub fn shared_utility_ex_ante(
    p: &AssignmentMatrix,
    i: usize,
    k: usize,
    instance: &Instance,
) -> Rational {
    (0..p.items())
        .filter(|&h| instance.utility(k, h).is_positive())
        .map(|h| p.get(i, h) * instance.utility(i, h))
        .sum()
}

fn ex_post_envy<F>(
    axiom: Axiom,
    dist: &AllocationDistribution,
    instance: &Instance,
    envy: F,
) -> Result<AxiomVerdict>
where
    F: Fn(&Allocation, usize, usize) -> Rational,
{
    check_items(dist, instance)?;
    let n = instance.agents();
    let mut worst = None;
    for alloc in dist.support() {
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    consider(&mut worst, envy(alloc, i, k), || Witness::Envy {
                        allocation: Some(alloc.clone()),
                        envious: i,
                        envied: k,
                    });
                }
            }
        }
    }
    Ok(AxiomVerdict::from_worst(axiom, worst))
}

fn ex_ante_envy<F>(
    axiom: Axiom,
    dist: &AllocationDistribution,
    instance: &Instance,
    envy: F,
) -> Result<AxiomVerdict>
where
    F: Fn(&AssignmentMatrix, usize, usize) -> Rational,
{
    check_items(dist, instance)?;
    let n = instance.agents();
    let p = marginals(dist);
    let mut worst = None;
    for i in 0..n {
        for k in 0..n {
            if i != k {
                consider(&mut worst, envy(&p, i, k), || Witness::Envy {
                    allocation: None,
                    envious: i,
                    envied: k,
                });
            }
        }
    }
    Ok(AxiomVerdict::from_worst(axiom, worst))
}

fn value(alloc: &Allocation, i: usize, k: usize, instance: &Instance) -> Rational {
    bundle_utility(alloc, i, k, instance.utilities()).expect("agents checked against instance")
}

pub fn check_efp(dist: &AllocationDistribution, instance: &Instance) -> Result<AxiomVerdict> {
    ex_post_envy(Axiom::Efp, dist, instance, |a, i, k| {
        value(a, i, k, instance) - value(a, i, i, instance)
    })
}

pub fn check_efa(dist: &AllocationDistribution, instance: &Instance) -> Result<AxiomVerdict> {
    check_items(dist, instance)?;
    let ubar = expected_utilities(&marginals(dist), instance.utilities())?;
    ex_ante_envy(Axiom::Efa, dist, instance, |_, i, k| {
        ubar.get(i, k) - ubar.get(i, i)
    })
}

pub fn check_sefp(dist: &AllocationDistribution, instance: &Instance) -> Result<AxiomVerdict> {
    ex_post_envy(Axiom::Sefp, dist, instance, |a, i, k| {
        value(a, i, k, instance) - shared_utility_ex_post(a, i, k, instance)
    })
}

pub fn check_sefa(dist: &AllocationDistribution, instance: &Instance) -> Result<AxiomVerdict> {
    check_items(dist, instance)?;
    let ubar = expected_utilities(&marginals(dist), instance.utilities())?;
    ex_ante_envy(Axiom::Sefa, dist, instance, |p, i, k| {
        ubar.get(i, k) - shared_utility_ex_ante(p, i, k, instance)
    })
}

/// `u_ii(π) + bound >= u_ik(π)` on every returned allocation, for any
/// utilities. [`check_befp`] is the 0/1 special case with bound one.
pub fn check_bounded_envy(
    dist: &AllocationDistribution,
    instance: &Instance,
    bound: &Rational,
) -> Result<AxiomVerdict> {
    ex_post_envy(Axiom::Befp, dist, instance, |a, i, k| {
        value(a, i, k, instance) - value(a, i, i, instance) - bound
    })
}

pub fn check_befp(dist: &AllocationDistribution, instance: &Instance) -> Result<AxiomVerdict> {
    if !instance.utilities().is_binary() {
        return Err(Error::NonBinaryUtilities);
    }
    check_bounded_envy(dist, instance, &Rational::one())
}

pub fn check_pep(
    dist: &AllocationDistribution,
    instance: &Instance,
    limits: &Limits,
) -> Result<AxiomVerdict> {
    check_items(dist, instance)?;
    let values = instance.utilities();
    let mut worst = None;
    for alloc in dist.support() {
        if let Some(by) = oracle::dominating_allocation(alloc, values, limits)? {
            let own = alloc.utility_vector(values);
            let gain: Rational = by
                .utility_vector(values)
                .iter()
                .zip(&own)
                .map(|(x, y)| x - y)
                .sum();
            consider(&mut worst, gain, || Witness::Dominated {
                allocation: alloc.clone(),
                by,
            });
        }
    }
    Ok(AxiomVerdict::from_worst(Axiom::Pep, worst))
}

pub fn check_pea(
    dist: &AllocationDistribution,
    instance: &Instance,
    limits: &Limits,
) -> Result<AxiomVerdict> {
    check_items(dist, instance)?;
    let ubar = expected_utilities(&marginals(dist), instance.utilities())?;
    let outcome = oracle::is_pea(&ubar.diagonal(), instance.utilities(), limits)?;
    let worst = (!outcome.efficient).then(|| {
        (
            outcome.solution.objective.clone(),
            Witness::Lottery(outcome.solution),
        )
    });
    Ok(AxiomVerdict::from_worst(Axiom::Pea, worst))
}

pub fn check(
    axiom: Axiom,
    dist: &AllocationDistribution,
    instance: &Instance,
    limits: &Limits,
) -> Result<AxiomVerdict> {
    match axiom {
        Axiom::Efp => check_efp(dist, instance),
        Axiom::Efa => check_efa(dist, instance),
        Axiom::Sefp => check_sefp(dist, instance),
        Axiom::Sefa => check_sefa(dist, instance),
        Axiom::Befp => check_befp(dist, instance),
        Axiom::Pep => check_pep(dist, instance, limits),
        Axiom::Pea => check_pea(dist, instance, limits),
    }
}

/// Same per-item marginals on `bids`.
pub fn ex_ante_equivalent<A, B>(a: &A, b: &B, bids: &BidProfile, limits: &Limits) -> Result<bool>
where
    A: Mechanism + ?Sized,
    B: Mechanism + ?Sized,
{
    Ok(marginals(&a.run(bids, limits)?) == marginals(&b.run(bids, limits)?))
}

/// Same distribution over allocations on `bids`.
pub fn ex_post_equivalent<A, B>(a: &A, b: &B, bids: &BidProfile, limits: &Limits) -> Result<bool>
where
    A: Mechanism + ?Sized,
    B: Mechanism + ?Sized,
{
    Ok(a.run(bids, limits)? == b.run(bids, limits)?)
}

/// Marginals that envy-freeness ex ante on every item prefix leaves to a
/// non-wasteful mechanism, fixed round by round: for each item the exact LP
/// bounds on every `p_ij` must coincide given the earlier rounds.
///
/// `None` when some round leaves a choice or admits no envy-free column.
pub fn efa_forced_marginals(instance: &Instance) -> Result<Option<AssignmentMatrix>> {
    let n = instance.agents();
    let m = instance.items();
    let u = instance.utilities();
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for j in 0..m {
        let bidders = u.positive_agents(j);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
            .collect();
        let vars = bidders.len() + pairs.len();
        let slot = |a: usize| bidders.iter().position(|&b| b == a);
        let mut constraints = Vec::new();
        let mut rhs = Vec::new();
        for (row, &(i, k)) in pairs.iter().enumerate() {
            let mut coeffs = vec![Rational::zero(); vars];
            if let Some(s) = slot(i) {
                coeffs[s] += u.get(i, j);
            }
            if let Some(s) = slot(k) {
                coeffs[s] -= u.get(i, j);
            }
            coeffs[bidders.len() + row] = -Rational::one();
            let earlier: Rational = columns
                .iter()
                .enumerate()
                .map(|(h, col)| (&col[i] - &col[k]) * u.get(i, h))
                .sum();
            constraints.push(coeffs);
            rhs.push(-earlier);
        }
        let mut total = vec![Rational::zero(); vars];
        for t in total.iter_mut().take(bidders.len()) {
            *t = Rational::one();
        }
        constraints.push(total);
        rhs.push(Rational::one());

        let mut column = vec![Rational::zero(); n];
        for (s, &a) in bidders.iter().enumerate() {
            let mut bounds = Vec::with_capacity(2);
            for sign in [Rational::one(), -Rational::one()] {
                let mut objective = vec![Rational::zero(); vars];
                objective[s] = sign.clone();
                let lp = LinearProgram {
                    constraints: constraints.clone(),
                    rhs: rhs.clone(),
                    objective,
                };
                match simplex::solve(&lp) {
                    LpOutcome::Optimal { value, .. } => bounds.push(value * sign),
                    _ => return Ok(None),
                }
            }
            if bounds[0] != bounds[1] {
                return Ok(None);
            }
            column[a] = bounds.swap_remove(0);
        }
        columns.push(column);
    }
    let rows = (0..n)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    AssignmentMatrix::new(rows).map(Some)
}
