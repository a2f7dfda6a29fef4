//! The sequential allocation engine and the six online mechanisms.
//!
//! Items arrive in order. For each arriving item a [`FeasibilityRule`]
//! picks the agents that may receive it given the allocation so far, and the
//! item goes to one of them uniformly at random. The engine expands every
//! branch exactly, so a run yields the full [`AllocationDistribution`].

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{
    Allocation, AllocationDistribution, BidProfile, Instance, Limits, Matrix, PriorityOrder,
    Rational,
};
use crate::oracle::maximal_vectors;

/// Per-round choice of agents allowed to receive the arriving item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeasibilityRule {
    /// First agent in the priority order that bids positively.
    Osd(PriorityOrder),
    /// Every positive bidder.
    Like,
    /// Positive bidders holding the fewest items so far.
    BalancedLike,
    /// Highest bidders, if the highest bid is positive.
    MaximumLike,
    /// Positive bidders whose receipt of the item leaves the partial
    /// allocation extendable to a Pareto efficient allocation of all
    /// reported items (judged on the bids).
    ParetoLike,
    /// Positive bidders whose receipt of the item keeps the partial
    /// allocation Pareto efficient on the items seen so far. Can leave no
    /// feasible agent; the run then fails with
    /// [`Error::EmptyFeasibleSet`].
    ParetoLikePrefix,
}

pub fn osd_rule(sigma: PriorityOrder) -> FeasibilityRule {
    FeasibilityRule::Osd(sigma)
}

pub fn like_rule() -> FeasibilityRule {
    FeasibilityRule::Like
}

pub fn balanced_like_rule() -> FeasibilityRule {
    FeasibilityRule::BalancedLike
}

pub fn maximum_like_rule() -> FeasibilityRule {
    FeasibilityRule::MaximumLike
}

pub fn pareto_like_rule() -> FeasibilityRule {
    FeasibilityRule::ParetoLike
}

pub fn pareto_like_prefix_rule() -> FeasibilityRule {
    FeasibilityRule::ParetoLikePrefix
}

impl fmt::Display for FeasibilityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityRule::Osd(sigma) => write!(f, "osd{sigma}"),
            FeasibilityRule::Like => write!(f, "like"),
            FeasibilityRule::BalancedLike => write!(f, "balanced-like"),
            FeasibilityRule::MaximumLike => write!(f, "maximum-like"),
            FeasibilityRule::ParetoLike => write!(f, "pareto-like"),
            FeasibilityRule::ParetoLikePrefix => write!(f, "pareto-like-prefix"),
        }
    }
}

/// Outcome of a rule for one item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasible {
    Agents(Vec<usize>),
    Discard,
}

/// A node of the expansion tree: a partial allocation and the probability
/// of reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchNode {
    pub partial: Allocation,
    pub probability: Rational,
}

/// Bid-valued utility vectors accepted after each item. `accepted[j]` holds
/// the vectors of allocations of items `0..=j` that a Pareto rule lets
/// through.
#[derive(Debug)]
struct ParetoTable<T> {
    /// `bids[a][h]`
    bids: Vec<Vec<T>>,
    accepted: Vec<HashSet<Vec<T>>>,
}

trait Value: Clone + Ord + Hash + Zero + for<'x> AddAssign<&'x Self> {}

impl<T: Clone + Ord + Hash + Zero + for<'x> AddAssign<&'x T>> Value for T {}

impl<T: Value> ParetoTable<T> {
    fn new(bids: Vec<Vec<T>>, items: usize, completable: bool) -> Self {
        let agents = bids.len();
        let bidders: Vec<Vec<usize>> = (0..items)
            .map(|h| (0..agents).filter(|&a| bids[a][h] > T::zero()).collect())
            .collect();
        let extend = |v: &[T], a: usize, h: usize| {
            let mut w = v.to_vec();
            w[a] += &bids[a][h];
            w
        };
        // Every achievable vector of each prefix.
        let mut reach: Vec<HashSet<Vec<T>>> = Vec::with_capacity(items);
        let mut current: HashSet<Vec<T>> = HashSet::from([vec![T::zero(); agents]]);
        for (h, who) in bidders.iter().enumerate() {
            if !who.is_empty() {
                current = current
                    .iter()
                    .flat_map(|v| who.iter().map(move |&a| (v, a)))
                    .map(|(v, a)| extend(v, a, h))
                    .collect();
            }
            reach.push(current.clone());
        }
        let maximal = |set: &HashSet<Vec<T>>| -> HashSet<Vec<T>> {
            maximal_vectors(set.iter().cloned().collect())
                .into_iter()
                .collect()
        };
        let accepted = if completable {
            let mut accepted: Vec<HashSet<Vec<T>>> = vec![HashSet::new(); items];
            if let Some(last) = reach.last() {
                accepted[items - 1] = maximal(last);
            }
            for h in (0..items.saturating_sub(1)).rev() {
                let next = &bidders[h + 1];
                let keep: HashSet<Vec<T>> = reach[h]
                    .iter()
                    .filter(|v| {
                        if next.is_empty() {
                            accepted[h + 1].contains(*v)
                        } else {
                            next.iter()
                                .any(|&a| accepted[h + 1].contains(&extend(v, a, h + 1)))
                        }
                    })
                    .cloned()
                    .collect();
                accepted[h] = keep;
            }
            accepted
        } else {
            reach.iter().map(maximal).collect()
        };
        ParetoTable { bids, accepted }
    }

    fn feasible(&self, item: usize, owners: &[Option<usize>], bidders: Vec<usize>) -> Vec<usize> {
        let mut values = vec![T::zero(); self.bids.len()];
        for (h, owner) in owners.iter().enumerate().take(item) {
            if let Some(a) = *owner {
                values[a] += &self.bids[a][h];
            }
        }
        bidders
            .into_iter()
            .filter(|&a| {
                let mut w = values.clone();
                w[a] += &self.bids[a][item];
                self.accepted[item].contains(&w)
            })
            .collect()
    }
}

/// Machine-integer table when the bids scaled to a common denominator fit,
/// exact rationals otherwise.
#[derive(Debug)]
enum Pareto {
    Small(ParetoTable<i64>),
    Exact(ParetoTable<Rational>),
}

impl Pareto {
    fn new(bids: &Matrix, completable: bool) -> Self {
        let items = bids.items();
        let entries = bids.rows();
        let scale = entries
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let bound = BigInt::from(i64::MAX / (items.max(1) as i64));
        let scaled: Option<Vec<Vec<i64>>> = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let s = v.numer() * (&scale / v.denom());
                        (s <= bound).then(|| s.to_i64()).flatten()
                    })
                    .collect()
            })
            .collect();
        match scaled {
            Some(small) => Pareto::Small(ParetoTable::new(small, items, completable)),
            None => Pareto::Exact(ParetoTable::new(entries, items, completable)),
        }
    }

    fn feasible(&self, item: usize, owners: &[Option<usize>], bidders: Vec<usize>) -> Vec<usize> {
        match self {
            Pareto::Small(t) => t.feasible(item, owners, bidders),
            Pareto::Exact(t) => t.feasible(item, owners, bidders),
        }
    }
}

/// Bids plus whatever the rule precomputes from them.
struct RuleContext<'a> {
    rule: &'a FeasibilityRule,
    bids: &'a Matrix,
    pareto: Option<Pareto>,
}

impl<'a> RuleContext<'a> {
    fn new(rule: &'a FeasibilityRule, bids: &'a Matrix) -> Result<Self> {
        if let FeasibilityRule::Osd(sigma) = rule {
            if sigma.agents() != bids.agents() {
                return Err(Error::InvalidPriority(format!(
                    "{sigma} orders {} agents, instance has {}",
                    sigma.agents(),
                    bids.agents()
                )));
            }
        }
        let pareto = match rule {
            FeasibilityRule::ParetoLike => Some(Pareto::new(bids, true)),
            FeasibilityRule::ParetoLikePrefix => Some(Pareto::new(bids, false)),
            _ => None,
        };
        Ok(RuleContext { rule, bids, pareto })
    }

    /// `owners` holds the allocation of the earlier items and `sizes` the
    /// number of items each agent holds.
    fn feasible(&self, item: usize, sizes: &[usize], owners: &[Option<usize>]) -> Feasible {
        let bidders = self.bids.positive_agents(item);
        if bidders.is_empty() {
            return Feasible::Discard;
        }
        let agents = match self.rule {
            FeasibilityRule::Osd(sigma) => sigma
                .as_slice()
                .iter()
                .copied()
                .find(|&a| self.bids.get(a, item).is_positive())
                .into_iter()
                .collect(),
            FeasibilityRule::Like => bidders,
            FeasibilityRule::BalancedLike => {
                let fewest = bidders.iter().map(|&a| sizes[a]).min().unwrap_or(0);
                bidders
                    .into_iter()
                    .filter(|&a| sizes[a] == fewest)
                    .collect()
            }
            FeasibilityRule::MaximumLike => {
                let top = bidders
                    .iter()
                    .map(|&a| self.bids.get(a, item))
                    .max()
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                bidders
                    .into_iter()
                    .filter(|&a| *self.bids.get(a, item) == top)
                    .collect()
            }
            FeasibilityRule::ParetoLike | FeasibilityRule::ParetoLikePrefix => self
                .pareto
                .as_ref()
                .expect("pareto table built for pareto rules")
                .feasible(item, owners, bidders),
        };
        Feasible::Agents(agents)
    }
}

/// Feasible set for `item` given the allocation of the earlier items.
pub fn feasible_set(
    rule: &FeasibilityRule,
    bids: &BidProfile,
    item: usize,
    partial: &Allocation,
) -> Result<Feasible> {
    if item >= bids.items() {
        return Err(Error::ItemOutOfRange {
            index: item + 1,
            items: bids.items(),
        });
    }
    let ctx = RuleContext::new(rule, bids.matrix())?;
    let owners: Vec<Option<usize>> = (0..item).map(|h| partial.owner(h)).collect();
    let mut sizes = vec![0; bids.agents()];
    for a in owners.iter().flatten() {
        sizes[*a] += 1;
    }
    Ok(ctx.feasible(item, &sizes, &owners))
}

/// Upper bound on the number of leaves any rule can produce on `bids`.
fn leaf_bound(bids: &Matrix) -> u128 {
    (0..bids.items())
        .map(|h| bids.positive_agents(h).len().max(1) as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

/// Runs `rule` on `bids` for `instance` with the default work bound.
pub fn allocate(
    rule: &FeasibilityRule,
    instance: &Instance,
    bids: &BidProfile,
) -> Result<AllocationDistribution> {
    check_shape(instance, bids)?;
    allocate_with(rule, bids, &Limits::default())
}

pub(crate) fn check_shape(instance: &Instance, bids: &BidProfile) -> Result<()> {
    if instance.agents() != bids.agents() || instance.items() != bids.items() {
        return Err(Error::ShapeMismatch {
            expected_agents: instance.agents(),
            expected_items: instance.items(),
            agents: bids.agents(),
            items: bids.items(),
        });
    }
    Ok(())
}

pub fn allocate_with(
    rule: &FeasibilityRule,
    bids: &BidProfile,
    limits: &Limits,
) -> Result<AllocationDistribution> {
    limits.check(&format!("{rule} expansion"), leaf_bound(bids.matrix()))?;
    let ctx = RuleContext::new(rule, bids.matrix())?;
    let n = bids.agents();
    let mut walk = Walk {
        ctx: &ctx,
        owners: Vec::with_capacity(bids.items()),
        sizes: vec![0; n],
        leaves: Vec::new(),
    };
    walk.expand(1)?;
    Ok(AllocationDistribution::from_leaves(
        n,
        bids.items(),
        walk.leaves,
    ))
}

struct Walk<'c, 'a> {
    ctx: &'c RuleContext<'a>,
    owners: Vec<Option<usize>>,
    sizes: Vec<usize>,
    leaves: Vec<(Allocation, Rational)>,
}

impl Walk<'_, '_> {
    /// `denominator`: the branch is reached with probability
    /// `1 / denominator`. It divides the leaf bound, so it fits.
    fn expand(&mut self, denominator: u128) -> Result<()> {
        let item = self.owners.len();
        if item == self.ctx.bids.items() {
            let node = BranchNode {
                partial: Allocation::new(self.owners.clone()),
                probability: Rational::new_raw(BigInt::one(), BigInt::from(denominator)),
            };
            self.leaves.push((node.partial, node.probability));
            return Ok(());
        }
        match self.ctx.feasible(item, &self.sizes, &self.owners) {
            Feasible::Discard => {
                self.owners.push(None);
                self.expand(denominator)?;
                self.owners.pop();
            }
            Feasible::Agents(agents) => {
                if agents.is_empty() {
                    return Err(Error::EmptyFeasibleSet {
                        rule: self.ctx.rule.to_string(),
                        item: item + 1,
                    });
                }
                let share = denominator * agents.len() as u128;
                for a in agents {
                    self.owners.push(Some(a));
                    self.sizes[a] += 1;
                    self.expand(share)?;
                    self.sizes[a] -= 1;
                    self.owners.pop();
                }
            }
        }
        Ok(())
    }
}

/// Online Random Priority: the uniform mixture of OSD over all `n!` orders.
pub fn orp_distribution(instance: &Instance, bids: &BidProfile) -> Result<AllocationDistribution> {
    check_shape(instance, bids)?;
    orp_with(bids, &Limits::default())
}

pub fn orp_with(bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
    let n = bids.agents();
    let orders: u128 = (1..=n as u128).product();
    limits.check("orp priority orders", orders)?;
    let weight = Rational::new(1.into(), orders.into());
    let parts = PriorityOrder::all(n)
        .into_iter()
        .map(|sigma| allocate_with(&osd_rule(sigma), bids, limits))
        .collect::<Result<Vec<_>>>()?;
    AllocationDistribution::mixture(n, bids.items(), parts.iter().map(|d| (weight.clone(), d)))
}

/// Anything that maps a bid profile to a distribution over allocations.
pub trait Mechanism {
    fn name(&self) -> String;
    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution>;
}

/// The six built-in mechanisms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    Osd(PriorityOrder),
    Orp,
    ParetoLike,
    Like,
    BalancedLike,
    MaximumLike,
}

impl MechanismKind {
    /// CLI names: `osd`, `orp`, `like`, `balanced-like`, `maximum-like`,
    /// `pareto-like`. `osd` requires a 1-based priority such as `1,2`.
    pub fn parse(name: &str, sigma: Option<&str>) -> Result<Self> {
        Ok(match name {
            "osd" => {
                let sigma = sigma.ok_or_else(|| {
                    Error::InvalidPriority("osd requires a priority order (--sigma)".into())
                })?;
                MechanismKind::Osd(PriorityOrder::parse(sigma)?)
            }
            "orp" => MechanismKind::Orp,
            "like" => MechanismKind::Like,
            "balanced-like" => MechanismKind::BalancedLike,
            "maximum-like" => MechanismKind::MaximumLike,
            "pareto-like" => MechanismKind::ParetoLike,
            other => {
                return Err(Error::Unknown {
                    kind: "mechanism",
                    name: other.to_string(),
                })
            }
        })
    }

    /// OSD (identity order), ORP, ParetoLike, Like, BalancedLike, MaximumLike.
    pub fn all(agents: usize) -> Vec<MechanismKind> {
        vec![
            MechanismKind::Osd(PriorityOrder::identity(agents)),
            MechanismKind::Orp,
            MechanismKind::ParetoLike,
            MechanismKind::Like,
            MechanismKind::BalancedLike,
            MechanismKind::MaximumLike,
        ]
    }

    pub fn rule(&self) -> Option<FeasibilityRule> {
        match self {
            MechanismKind::Osd(sigma) => Some(osd_rule(sigma.clone())),
            MechanismKind::Orp => None,
            MechanismKind::ParetoLike => Some(pareto_like_rule()),
            MechanismKind::Like => Some(like_rule()),
            MechanismKind::BalancedLike => Some(balanced_like_rule()),
            MechanismKind::MaximumLike => Some(maximum_like_rule()),
        }
    }

    /// Short name without the priority order.
    pub fn family(&self) -> &'static str {
        match self {
            MechanismKind::Osd(_) => "osd",
            MechanismKind::Orp => "orp",
            MechanismKind::ParetoLike => "pareto-like",
            MechanismKind::Like => "like",
            MechanismKind::BalancedLike => "balanced-like",
            MechanismKind::MaximumLike => "maximum-like",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismKind::Osd(sigma) => write!(f, "osd{sigma}"),
            other => f.write_str(other.family()),
        }
    }
}

impl Mechanism for MechanismKind {
    fn name(&self) -> String {
        self.to_string()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        match self.rule() {
            Some(rule) => allocate_with(&rule, bids, limits),
            None => orp_with(bids, limits),
        }
    }
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        (**self).run(bids, limits)
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        (**self).run(bids, limits)
    }
}

/// Runs `mech` on the sincere bids of `instance`.
pub fn run_sincere<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    limits: &Limits,
) -> Result<AllocationDistribution> {
    mech.run(&instance.sincere_bids(), limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn example1() -> Instance {
        Instance::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap()
    }

    fn pi(owners: &[usize]) -> Allocation {
        Allocation::from_owners(owners)
    }

    fn dist(entries: &[(&[usize], Rational)]) -> AllocationDistribution {
        AllocationDistribution::new(2, 2, entries.iter().map(|(o, p)| (pi(o), p.clone()))).unwrap()
    }

    // π^1 = [0,0], π^2 = [1,1], π^3 = [0,1], π^4 = [1,0]
    const P1: &[usize] = &[0, 0];
    const P2: &[usize] = &[1, 1];
    const P3: &[usize] = &[0, 1];
    const P4: &[usize] = &[1, 0];

    #[test]
    fn example1_rules() {
        let inst = example1();
        let bids = inst.sincere_bids();
        let q = ratio(1, 4);
        let h = ratio(1, 2);
        assert_eq!(
            allocate(&like_rule(), &inst, &bids).unwrap(),
            dist(&[
                (P1, q.clone()),
                (P2, q.clone()),
                (P3, q.clone()),
                (P4, q.clone())
            ])
        );
        assert_eq!(
            allocate(&balanced_like_rule(), &inst, &bids).unwrap(),
            dist(&[(P3, h.clone()), (P4, h.clone())])
        );
        assert_eq!(
            allocate(&pareto_like_rule(), &inst, &bids).unwrap(),
            dist(&[(P1, h.clone()), (P2, q.clone()), (P4, q.clone())])
        );
        assert_eq!(
            allocate(&maximum_like_rule(), &inst, &bids).unwrap(),
            dist(&[(P4, int(1))])
        );
        assert_eq!(
            allocate(&osd_rule(PriorityOrder::identity(2)), &inst, &bids).unwrap(),
            dist(&[(P1, int(1))])
        );
        assert_eq!(
            allocate(
                &osd_rule(PriorityOrder::parse("2,1").unwrap()),
                &inst,
                &bids
            )
            .unwrap(),
            dist(&[(P2, int(1))])
        );
        assert_eq!(
            orp_distribution(&inst, &bids).unwrap(),
            dist(&[(P1, h.clone()), (P2, h)])
        );
    }

    #[test]
    fn zero_column_is_discarded() {
        let inst = example1();
        let bids = BidProfile::for_instance(
            &inst,
            Matrix::from_integers(&[vec![0, 2], vec![0, 1]]).unwrap(),
        )
        .unwrap();
        for mech in MechanismKind::all(2) {
            let d = mech.run(&bids, &Limits::default()).unwrap();
            assert!(d.support().all(|a| a.owner(0).is_none()), "{mech}");
        }
    }

    #[test]
    fn feasible_sets() {
        let inst = example1();
        let bids = inst.sincere_bids();
        let empty = Allocation::empty();
        assert_eq!(
            feasible_set(&like_rule(), &bids, 0, &empty).unwrap(),
            Feasible::Agents(vec![0, 1])
        );
        assert_eq!(
            feasible_set(&maximum_like_rule(), &bids, 0, &empty).unwrap(),
            Feasible::Agents(vec![1])
        );
        assert_eq!(
            feasible_set(&pareto_like_rule(), &bids, 0, &empty).unwrap(),
            Feasible::Agents(vec![0, 1])
        );
        let after = Allocation::new(vec![Some(0), None]);
        assert_eq!(
            feasible_set(&balanced_like_rule(), &bids, 1, &after).unwrap(),
            Feasible::Agents(vec![1])
        );
        assert_eq!(
            feasible_set(&pareto_like_rule(), &bids, 1, &after).unwrap(),
            Feasible::Agents(vec![0])
        );

        let ex2 = Instance::from_integers(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(
            feasible_set(&like_rule(), &ex2.sincere_bids(), 0, &empty).unwrap(),
            Feasible::Agents(vec![0])
        );

        let three = Instance::from_integers(&[vec![1, 1], vec![1, 1], vec![1, 1]]).unwrap();
        let sizes = Allocation::new(vec![Some(0), None]);
        assert_eq!(
            feasible_set(&balanced_like_rule(), &three.sincere_bids(), 1, &sizes).unwrap(),
            Feasible::Agents(vec![1, 2])
        );

        let zero = BidProfile::new(Matrix::from_integers(&[vec![0], vec![0]]).unwrap());
        for rule in [
            like_rule(),
            maximum_like_rule(),
            osd_rule(PriorityOrder::identity(2)),
        ] {
            assert_eq!(
                feasible_set(&rule, &zero, 0, &empty).unwrap(),
                Feasible::Discard
            );
        }
    }

    #[test]
    fn maximum_like_splits_ties() {
        let inst = Instance::from_integers(&[vec![2], vec![2], vec![1]]).unwrap();
        let d = allocate(&maximum_like_rule(), &inst, &inst.sincere_bids()).unwrap();
        assert_eq!(d.probability(&pi(&[0])), ratio(1, 2));
        assert_eq!(d.probability(&pi(&[1])), ratio(1, 2));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn example3_pareto_like_reaches_split_allocation() {
        let inst = Instance::from_integers(&[vec![1, 4], vec![2, 3]]).unwrap();
        let bids = inst.sincere_bids();
        let split = pi(&[0, 1]);
        let pl = allocate(&pareto_like_rule(), &inst, &bids).unwrap();
        assert!(pl.probability(&split) > Rational::zero());
        for mech in [
            MechanismKind::Osd(PriorityOrder::parse("1,2").unwrap()),
            MechanismKind::Osd(PriorityOrder::parse("2,1").unwrap()),
            MechanismKind::Orp,
            MechanismKind::MaximumLike,
        ] {
            let d = mech.run(&bids, &Limits::default()).unwrap();
            assert!(d.probability(&split).is_zero(), "{mech}");
        }
    }

    #[test]
    fn prefix_rule_can_dead_end() {
        // o_1 -> 1 then o_2 -> 2 is efficient on two items, but both
        // receivers of o_3 are dominated.
        let inst = Instance::from_integers(&[vec![1, 3, 1], vec![2, 3, 1]]).unwrap();
        let bids = inst.sincere_bids();
        let partial = Allocation::from_owners(&[0, 1, 0]);
        assert_eq!(
            feasible_set(&pareto_like_prefix_rule(), &bids, 2, &partial).unwrap(),
            Feasible::Agents(vec![])
        );
        assert!(matches!(
            allocate(&pareto_like_prefix_rule(), &inst, &bids),
            Err(Error::EmptyFeasibleSet { item: 3, .. })
        ));
        assert_eq!(
            feasible_set(
                &pareto_like_rule(),
                &bids,
                1,
                &Allocation::from_owners(&[0, 0])
            )
            .unwrap(),
            Feasible::Agents(vec![0])
        );
        let d = allocate(&pareto_like_rule(), &inst, &bids).unwrap();
        let frontier =
            crate::oracle::pareto_frontier(inst.utilities(), &Limits::default()).unwrap();
        assert_eq!(d.support().cloned().collect::<Vec<_>>(), frontier);
    }

    #[test]
    fn fractional_bids_use_exact_tables() {
        let inst = Instance::new(
            Matrix::new(vec![vec![ratio(1, 3), int(2)], vec![ratio(2, 3), int(1)]]).unwrap(),
        )
        .unwrap();
        let huge = Instance::new(
            Matrix::new(vec![
                vec![Rational::new(1.into(), BigInt::from(u64::MAX)), int(2)],
                vec![int(2), int(1)],
            ])
            .unwrap(),
        )
        .unwrap();
        for i in [inst, huge] {
            let d = allocate(&pareto_like_rule(), &i, &i.sincere_bids()).unwrap();
            let frontier =
                crate::oracle::pareto_frontier(i.utilities(), &Limits::default()).unwrap();
            assert_eq!(d.support().cloned().collect::<Vec<_>>(), frontier);
        }
    }

    #[test]
    fn single_agent_and_empty_instance() {
        let one = Instance::from_integers(&[vec![1, 3]]).unwrap();
        let d = orp_distribution(&one, &one.sincere_bids()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.probability(&pi(&[0, 0])), int(1));

        let empty = Instance::from_integers(&[vec![], vec![]]).unwrap();
        for mech in MechanismKind::all(2) {
            let d = run_sincere(&mech, &empty, &Limits::default()).unwrap();
            assert_eq!(d.probability(&Allocation::empty()), int(1));
        }
    }

    #[test]
    fn work_bound_is_enforced() {
        let inst = Instance::from_integers(&[vec![1; 5], vec![1; 5]]).unwrap();
        let err = like_rule();
        let out = allocate_with(&err, &inst.sincere_bids(), &Limits::new(16));
        assert!(matches!(out, Err(Error::WorkBound { needed: 32, .. })));
        assert!(orp_with(&inst.sincere_bids(), &Limits::new(1)).is_err());
    }

    #[test]
    fn osd_order_must_match_agents() {
        let inst = example1();
        let out = allocate(
            &osd_rule(PriorityOrder::identity(3)),
            &inst,
            &inst.sincere_bids(),
        );
        assert!(matches!(out, Err(Error::InvalidPriority(_))));
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            MechanismKind::parse("like", None).unwrap(),
            MechanismKind::Like
        );
        assert!(MechanismKind::parse("osd", None).is_err());
        assert_eq!(
            MechanismKind::parse("osd", Some("2,1"))
                .unwrap()
                .to_string(),
            "osd(2,1)"
        );
        assert!(matches!(
            MechanismKind::parse("nope", None),
            Err(Error::Unknown { .. })
        ));
    }
}
