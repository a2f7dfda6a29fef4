//! Domain types shared by every other module: exact rationals, utility and
//! bid matrices, allocations, distributions over allocations and the derived
//! per-item marginals and expected utilities.
//!
//! Agents and items are 0-based in the API. Everything rendered for humans
//! (text files, reports, `Display`) is 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number. All arithmetic in the crate goes through this type.
pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `numer / denom`. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q` or `p` into a nonnegative rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let value =
        Rational::from_str(text.trim()).map_err(|_| Error::InvalidRational(text.to_string()))?;
    if value.is_negative() {
        return Err(Error::Negative(text.to_string()));
    }
    Ok(value)
}

/// Canonical `p/q` rendering (`p` when the denominator is one).
pub fn render(value: &Rational) -> String {
    value.to_string()
}

/// Bounds on the exponential parts of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of leaves/candidates any single enumeration may visit.
    pub max_nodes: u64,
}

impl Limits {
    pub const DEFAULT_MAX_NODES: u64 = 1_000_000;

    pub fn new(max_nodes: u64) -> Self {
        Limits { max_nodes }
    }

    pub(crate) fn check(&self, what: &str, needed: u128) -> Result<()> {
        if needed > u128::from(self.max_nodes) {
            return Err(Error::WorkBound {
                what: what.to_string(),
                needed,
                limit: self.max_nodes,
            });
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits::new(Self::DEFAULT_MAX_NODES)
    }
}

/// Dense agents x items matrix of nonnegative rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    agents: usize,
    items: usize,
    cells: Vec<Rational>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let agents = rows.len();
        if agents == 0 {
            return Err(Error::NoAgents);
        }
        let items = rows[0].len();
        let mut cells = Vec::with_capacity(agents * items);
        for row in rows {
            if row.len() != items {
                return Err(Error::ShapeMismatch {
                    expected_agents: agents,
                    expected_items: items,
                    agents,
                    items: row.len(),
                });
            }
            for value in row {
                if value.is_negative() {
                    return Err(Error::Negative(render(&value)));
                }
                cells.push(value);
            }
        }
        Ok(Matrix {
            agents,
            items,
            cells,
        })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::new(
            rows.iter()
                .map(|row| row.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn get(&self, agent: usize, item: usize) -> &Rational {
        &self.cells[agent * self.items + item]
    }

    pub fn set(&mut self, agent: usize, item: usize, value: Rational) {
        assert!(!value.is_negative(), "matrix entries are nonnegative");
        self.cells[agent * self.items + item] = value;
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.cells[agent * self.items..(agent + 1) * self.items]
    }

    pub fn column(&self, item: usize) -> impl Iterator<Item = &Rational> + '_ {
        (0..self.agents).map(move |agent| self.get(agent, item))
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.agents).map(|a| self.row(a).to_vec()).collect()
    }

    pub fn with_row(&self, agent: usize, row: &[Rational]) -> Matrix {
        assert_eq!(row.len(), self.items);
        let mut out = self.clone();
        out.cells[agent * self.items..(agent + 1) * self.items].clone_from_slice(row);
        out
    }

    /// The first `items` columns.
    pub fn prefix(&self, items: usize) -> Matrix {
        let items = items.min(self.items);
        Matrix {
            agents: self.agents,
            items,
            cells: (0..self.agents)
                .flat_map(|a| self.row(a)[..items].iter().cloned())
                .collect(),
        }
    }

    /// Agents with a strictly positive entry in the column, ascending.
    pub fn positive_agents(&self, item: usize) -> Vec<usize> {
        (0..self.agents)
            .filter(|&a| self.get(a, item).is_positive())
            .collect()
    }

    pub fn is_binary(&self) -> bool {
        self.cells.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn all_positive(&self) -> bool {
        self.cells.iter().all(|v| v.is_positive())
    }

    fn check_shape(&self, agents: usize, items: usize) -> Result<()> {
        if self.agents != agents || self.items != items {
            return Err(Error::ShapeMismatch {
                expected_agents: agents,
                expected_items: items,
                agents: self.agents,
                items: self.items,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for a in 0..self.agents {
            if a > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (h, v) in self.row(a).iter().enumerate() {
                if h > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Agents, ordered items and sincere utilities. Every item is valued
/// positively by at least one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    utilities: Matrix,
}

impl Instance {
    pub fn new(utilities: Matrix) -> Result<Self> {
        for item in 0..utilities.items() {
            if utilities.column(item).all(|v| v.is_zero()) {
                return Err(Error::UnvaluedItem { item: item + 1 });
            }
        }
        Ok(Instance { utilities })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Instance::new(Matrix::from_integers(rows)?)
    }

    pub fn agents(&self) -> usize {
        self.utilities.agents()
    }

    pub fn items(&self) -> usize {
        self.utilities.items()
    }

    pub fn utilities(&self) -> &Matrix {
        &self.utilities
    }

    pub fn utility(&self, agent: usize, item: usize) -> &Rational {
        self.utilities.get(agent, item)
    }

    pub fn sincere_bids(&self) -> BidProfile {
        BidProfile {
            bids: self.utilities.clone(),
        }
    }

    /// The instance restricted to its first `items` items.
    pub fn prefix(&self, items: usize) -> Instance {
        Instance {
            utilities: self.utilities.prefix(items),
        }
    }
}

/// Reported bids, same shape as the instance. Zero columns are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BidProfile {
    bids: Matrix,
}

impl BidProfile {
    pub fn new(bids: Matrix) -> Self {
        BidProfile { bids }
    }

    /// Bids for `instance`; fails when the shapes differ.
    pub fn for_instance(instance: &Instance, bids: Matrix) -> Result<Self> {
        bids.check_shape(instance.agents(), instance.items())?;
        Ok(BidProfile { bids })
    }

    pub fn agents(&self) -> usize {
        self.bids.agents()
    }

    pub fn items(&self) -> usize {
        self.bids.items()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.bids
    }

    pub fn bid(&self, agent: usize, item: usize) -> &Rational {
        self.bids.get(agent, item)
    }

    pub fn with_row(&self, agent: usize, row: &[Rational]) -> BidProfile {
        BidProfile {
            bids: self.bids.with_row(agent, row),
        }
    }

    pub fn with_bid(&self, agent: usize, item: usize, bid: Rational) -> BidProfile {
        let mut bids = self.bids.clone();
        bids.set(agent, item, bid);
        BidProfile { bids }
    }

    pub fn prefix(&self, items: usize) -> BidProfile {
        BidProfile {
            bids: self.bids.prefix(items),
        }
    }
}

/// Assignment of every item to an agent (`Some`) or to nobody (`None`,
/// discarded). Ordered lexicographically by owner vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    owners: Vec<Option<usize>>,
}

impl Allocation {
    pub fn new(owners: Vec<Option<usize>>) -> Self {
        Allocation { owners }
    }

    /// Every item allocated; `owners[h]` is the 0-based agent holding item h.
    pub fn from_owners(owners: &[usize]) -> Self {
        Allocation {
            owners: owners.iter().map(|&a| Some(a)).collect(),
        }
    }

    pub fn empty() -> Self {
        Allocation { owners: Vec::new() }
    }

    pub fn items(&self) -> usize {
        self.owners.len()
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.owners[item]
    }

    pub fn owners(&self) -> &[Option<usize>] {
        &self.owners
    }

    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Some(agent))
            .map(|(h, _)| h)
            .collect()
    }

    pub fn prefix(&self, items: usize) -> Allocation {
        Allocation {
            owners: self.owners[..items.min(self.owners.len())].to_vec(),
        }
    }

    /// Own-bundle value of every agent under `values`.
    pub fn utility_vector(&self, values: &Matrix) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); values.agents()];
        for (item, owner) in self.owners.iter().enumerate() {
            if let Some(agent) = *owner {
                out[agent] += values.get(agent, item);
            }
        }
        out
    }

    fn check_against(&self, agents: usize, items: usize) -> Result<()> {
        if self.owners.len() != items {
            return Err(Error::InvalidDistribution(format!(
                "allocation covers {} items, expected {items}",
                self.owners.len()
            )));
        }
        if let Some(bad) = self.owners.iter().flatten().find(|&&a| a >= agents) {
            return Err(Error::AgentOutOfRange {
                index: bad + 1,
                agents,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agents = self.owners.iter().flatten().max().map_or(0, |&a| a + 1);
        self.fmt_with_agents(f, agents)
    }
}

impl Allocation {
    /// `({o1,o2},{},...)` with one bundle per agent.
    pub fn display(&self, agents: usize) -> String {
        struct Shown<'a>(&'a Allocation, usize);
        impl fmt::Display for Shown<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with_agents(f, self.1)
            }
        }
        Shown(self, agents).to_string()
    }

    fn fmt_with_agents(&self, f: &mut fmt::Formatter<'_>, agents: usize) -> fmt::Result {
        write!(f, "(")?;
        for agent in 0..agents {
            if agent > 0 {
                write!(f, ",")?;
            }
            let items: Vec<String> = self
                .bundle(agent)
                .iter()
                .map(|h| format!("o{}", h + 1))
                .collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        write!(f, ")")?;
        let discarded: Vec<String> = (0..self.owners.len())
            .filter(|&h| self.owners[h].is_none())
            .map(|h| format!("o{}", h + 1))
            .collect();
        if !discarded.is_empty() {
            write!(f, " discarded {{{}}}", discarded.join(","))?;
        }
        Ok(())
    }
}

/// `u_{ik}(π)`: agent `i`'s value for agent `k`'s bundle.
pub fn bundle_utility(
    alloc: &Allocation,
    i: usize,
    k: usize,
    utilities: &Matrix,
) -> Result<Rational> {
    for index in [i, k] {
        if index >= utilities.agents() {
            return Err(Error::AgentOutOfRange {
                index: index + 1,
                agents: utilities.agents(),
            });
        }
    }
    if alloc.items() > utilities.items() {
        return Err(Error::ItemOutOfRange {
            index: alloc.items(),
            items: utilities.items(),
        });
    }
    Ok(alloc
        .bundle(k)
        .into_iter()
        .map(|h| utilities.get(i, h))
        .sum())
}

/// Finite distribution over allocations of a common item prefix. Every
/// probability is strictly positive and they sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationDistribution {
    agents: usize,
    items: usize,
    support: BTreeMap<Allocation, Rational>,
}

impl AllocationDistribution {
    /// Builds a distribution, merging repeated allocations.
    pub fn new<I>(agents: usize, items: usize, weighted: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Allocation, Rational)>,
    {
        let mut support: BTreeMap<Allocation, Rational> = BTreeMap::new();
        for (alloc, prob) in weighted {
            alloc.check_against(agents, items)?;
            if !prob.is_positive() {
                return Err(Error::InvalidDistribution(format!(
                    "non-positive probability {prob} for {alloc}"
                )));
            }
            *support.entry(alloc).or_insert_with(Rational::zero) += prob;
        }
        let total: Rational = support.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(AllocationDistribution {
            agents,
            items,
            support,
        })
    }

    /// Leaves of an exact expansion: distinct allocations of the right shape
    /// whose probabilities already sum to one.
    pub(crate) fn from_leaves(
        agents: usize,
        items: usize,
        leaves: Vec<(Allocation, Rational)>,
    ) -> Self {
        debug_assert!(leaves.iter().map(|(_, p)| p).sum::<Rational>().is_one());
        AllocationDistribution {
            agents,
            items,
            support: leaves.into_iter().collect(),
        }
    }

    pub fn degenerate(agents: usize, alloc: Allocation) -> Result<Self> {
        let items = alloc.items();
        AllocationDistribution::new(agents, items, [(alloc, Rational::one())])
    }

    /// Weighted mixture of distributions over the same shape.
    pub fn mixture<'a, I>(agents: usize, items: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, &'a AllocationDistribution)>,
    {
        let mut weighted = Vec::new();
        for (weight, dist) in parts {
            if dist.agents != agents || dist.items != items {
                return Err(Error::InvalidDistribution(
                    "mixture components differ in shape".into(),
                ));
            }
            if weight.is_zero() {
                continue;
            }
            for (alloc, prob) in &dist.support {
                weighted.push((alloc.clone(), &weight * prob));
            }
        }
        AllocationDistribution::new(agents, items, weighted)
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn items(&self) -> usize {
        self.items
    }

    /// Support in canonical (lexicographic owner vector) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Allocation, &Rational)> {
        self.support.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Allocation> {
        self.support.keys()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn probability(&self, alloc: &Allocation) -> Rational {
        self.support
            .get(alloc)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Marginal distribution over the first `items` items.
    pub fn prefix(&self, items: usize) -> AllocationDistribution {
        let items = items.min(self.items);
        let mut support: BTreeMap<Allocation, Rational> = BTreeMap::new();
        for (alloc, prob) in &self.support {
            *support
                .entry(alloc.prefix(items))
                .or_insert_with(Rational::zero) += prob;
        }
        AllocationDistribution {
            agents: self.agents,
            items,
            support,
        }
    }
}

/// `p[i][h]`: probability that agent `i` receives item `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix {
    agents: usize,
    items: usize,
    cells: Vec<Rational>,
}

impl AssignmentMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let agents = rows.len();
        if agents == 0 {
            return Err(Error::NoAgents);
        }
        let items = rows[0].len();
        let mut cells = Vec::with_capacity(agents * items);
        for row in rows {
            if row.len() != items {
                return Err(Error::InvalidDistribution(
                    "ragged assignment matrix".into(),
                ));
            }
            for p in row {
                if p.is_negative() || p > Rational::one() {
                    return Err(Error::InvalidDistribution(format!(
                        "probability {p} outside [0,1]"
                    )));
                }
                cells.push(p);
            }
        }
        let out = AssignmentMatrix {
            agents,
            items,
            cells,
        };
        for item in 0..items {
            let total = out.column_sum(item);
            if !total.is_one() && !total.is_zero() {
                return Err(Error::InvalidDistribution(format!(
                    "column o_{} sums to {total}",
                    item + 1
                )));
            }
        }
        Ok(out)
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn get(&self, agent: usize, item: usize) -> &Rational {
        &self.cells[agent * self.items + item]
    }

    pub fn column_sum(&self, item: usize) -> Rational {
        (0..self.agents).map(|a| self.get(a, item)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.agents)
            .map(|a| self.cells[a * self.items..(a + 1) * self.items].to_vec())
            .collect()
    }
}

/// Per-item marginals of a distribution.
pub fn marginals(dist: &AllocationDistribution) -> AssignmentMatrix {
    let mut cells = vec![Rational::zero(); dist.agents * dist.items];
    for (alloc, prob) in &dist.support {
        for (item, owner) in alloc.owners.iter().enumerate() {
            if let Some(agent) = owner {
                cells[agent * dist.items + item] += prob;
            }
        }
    }
    AssignmentMatrix {
        agents: dist.agents,
        items: dist.items,
        cells,
    }
}

/// `ubar[i][k] = Σ_h p[k][h] · u[i][h]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedUtilityMatrix {
    agents: usize,
    cells: Vec<Rational>,
}

impl ExpectedUtilityMatrix {
    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn get(&self, i: usize, k: usize) -> &Rational {
        &self.cells[i * self.agents + k]
    }

    /// `ū_i` for every agent.
    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.agents).map(|i| self.get(i, i).clone()).collect()
    }
}

pub fn expected_utilities(
    p: &AssignmentMatrix,
    utilities: &Matrix,
) -> Result<ExpectedUtilityMatrix> {
    if utilities.agents() != p.agents || utilities.items() < p.items {
        return Err(Error::ShapeMismatch {
            expected_agents: p.agents,
            expected_items: p.items,
            agents: utilities.agents(),
            items: utilities.items(),
        });
    }
    let n = p.agents;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let value: Rational = (0..p.items)
                .filter(|&h| !p.get(k, h).is_zero())
                .map(|h| p.get(k, h) * utilities.get(i, h))
                .sum();
            cells.push(value);
        }
    }
    Ok(ExpectedUtilityMatrix { agents: n, cells })
}

/// Strict priority order over agents (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PriorityOrder(Vec<usize>);

impl PriorityOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &agent in &order {
            if agent >= order.len() || seen[agent] {
                return Err(Error::InvalidPriority(format!(
                    "{order:?} is not a permutation of 0..{}",
                    order.len()
                )));
            }
            seen[agent] = true;
        }
        Ok(PriorityOrder(order))
    }

    pub fn identity(agents: usize) -> Self {
        PriorityOrder((0..agents).collect())
    }

    /// Parses a 1-based comma separated list such as `2,1,3`.
    pub fn parse(text: &str) -> Result<Self> {
        let order = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&a| a >= 1)
                    .map(|a| a - 1)
                    .ok_or_else(|| Error::InvalidPriority(text.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        PriorityOrder::new(order)
    }

    pub fn agents(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// All `n!` orders, lexicographic.
    pub fn all(agents: usize) -> Vec<PriorityOrder> {
        use itertools::Itertools;
        (0..agents)
            .permutations(agents)
            .map(PriorityOrder)
            .collect()
    }
}

impl fmt::Display for PriorityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.0.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "({})", shown.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Instance {
        Instance::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap()
    }

    fn pi(owners: &[usize]) -> Allocation {
        Allocation::from_owners(owners)
    }

    #[test]
    fn bundle_utility_examples() {
        let u = example1();
        // π^4 = ({o2},{o1})
        assert_eq!(
            bundle_utility(&pi(&[1, 0]), 0, 0, u.utilities()).unwrap(),
            int(2)
        );
        assert_eq!(
            bundle_utility(&pi(&[0, 0]), 1, 1, u.utilities()).unwrap(),
            int(0)
        );
        let ex3 = Instance::from_integers(&[vec![1, 4], vec![2, 3]]).unwrap();
        assert_eq!(
            bundle_utility(&pi(&[0, 1]), 1, 1, ex3.utilities()).unwrap(),
            int(3)
        );
        assert!(matches!(
            bundle_utility(&pi(&[0, 1]), 2, 0, ex3.utilities()),
            Err(Error::AgentOutOfRange { .. })
        ));
    }

    #[test]
    fn marginals_and_expected_utilities() {
        let u = example1();
        let q = ratio(1, 4);
        let like = AllocationDistribution::new(
            2,
            2,
            [pi(&[0, 0]), pi(&[1, 1]), pi(&[0, 1]), pi(&[1, 0])]
                .into_iter()
                .map(|a| (a, q.clone())),
        )
        .unwrap();
        let p = marginals(&like);
        for a in 0..2 {
            for h in 0..2 {
                assert_eq!(p.get(a, h), &ratio(1, 2));
            }
        }
        let ubar = expected_utilities(&p, u.utilities()).unwrap();
        assert_eq!(ubar.get(0, 0), &ratio(3, 2));
        assert_eq!(ubar.get(1, 1), &ratio(3, 2));

        let orp = AllocationDistribution::new(
            2,
            2,
            [(pi(&[0, 0]), ratio(1, 2)), (pi(&[1, 1]), ratio(1, 2))],
        )
        .unwrap();
        assert_eq!(marginals(&orp), p);

        let osd = AllocationDistribution::degenerate(2, pi(&[0, 0])).unwrap();
        let ubar = expected_utilities(&marginals(&osd), u.utilities()).unwrap();
        assert_eq!(ubar.diagonal(), vec![int(3), int(0)]);
    }

    #[test]
    fn distribution_rejects_bad_mass() {
        let half = ratio(1, 2);
        assert!(AllocationDistribution::new(2, 1, [(pi(&[0]), half.clone())]).is_err());
        assert!(
            AllocationDistribution::new(2, 1, [(pi(&[0]), int(0)), (pi(&[1]), int(1))]).is_err()
        );
        // repeated allocations merge
        let d = AllocationDistribution::new(2, 1, [(pi(&[0]), half.clone()), (pi(&[0]), half)])
            .unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn instance_requires_positive_column() {
        assert!(matches!(
            Instance::from_integers(&[vec![0]]),
            Err(Error::UnvaluedItem { item: 1 })
        ));
        assert!(Instance::from_integers(&[vec![]]).is_ok());
    }

    #[test]
    fn priority_order_parse() {
        assert_eq!(PriorityOrder::parse("2,1").unwrap().as_slice(), &[1, 0]);
        assert!(PriorityOrder::parse("1,1").is_err());
        assert!(PriorityOrder::parse("0,1").is_err());
        assert_eq!(PriorityOrder::all(3).len(), 6);
    }

    #[test]
    fn rational_parse_render() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(render(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("-1").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
