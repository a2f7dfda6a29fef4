//! Instance generators for the standard utility domains, the worked
//! examples with their hand-built mechanisms, and the text formats for
//! instances, bid profiles and suite manifests.
//!
//! Instance and bid files:
//!
//! ```text
//! # comment
//! 2 2
//! 1 2
//! 2 1/3
//! ```
//!
//! The first line is `n m`, followed by `n` rows of `m` nonnegative
//! rationals (`p` or `p/q`). Manifests list one generated block per line:
//! `domain n m seed count [bound [denominator]]`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanisms::{Mechanism, MechanismKind};
use crate::model::{
    int, parse_rational, ratio, render, Allocation, AllocationDistribution, AssignmentMatrix,
    BidProfile, Instance, Limits, Matrix, Rational,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    General,
    NonZero,
    Binary,
    IdenticalCardinal,
    IdenticalOrdinal,
    Borda,
    Lexicographic,
}

impl Domain {
    pub const ALL: [Domain; 7] = [
        Domain::General,
        Domain::NonZero,
        Domain::Binary,
        Domain::IdenticalCardinal,
        Domain::IdenticalOrdinal,
        Domain::Borda,
        Domain::Lexicographic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::General => "general",
            Domain::NonZero => "non-zero",
            Domain::Binary => "binary",
            Domain::IdenticalCardinal => "identical-cardinal",
            Domain::IdenticalOrdinal => "identical-ordinal",
            Domain::Borda => "borda",
            Domain::Lexicographic => "lexicographic",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Domain::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "domain",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainSpec {
    pub domain: Domain,
    pub agents: usize,
    pub items: usize,
    pub seed: u64,
    /// Largest utility value for the cardinal domains.
    pub bound: u32,
    /// Random values are drawn as `k / denominator`.
    pub denominator: u32,
}

impl DomainSpec {
    pub const DEFAULT_BOUND: u32 = 3;
    pub const DEFAULT_DENOMINATOR: u32 = 6;

    pub fn new(domain: Domain, agents: usize, items: usize, seed: u64) -> Self {
        DomainSpec {
            domain,
            agents,
            items,
            seed,
            bound: Self::DEFAULT_BOUND,
            denominator: Self::DEFAULT_DENOMINATOR,
        }
    }

    pub fn with_values(mut self, bound: u32, denominator: u32) -> Self {
        self.bound = bound;
        self.denominator = denominator;
        self
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} m={} seed={}",
            self.domain, self.agents, self.items, self.seed
        )
    }
}

/// Deterministic instance for `spec`.
pub fn generate(spec: &DomainSpec) -> Result<Instance> {
    let n = spec.agents;
    let m = spec.items;
    if n == 0 {
        return Err(Error::Unsatisfiable(
            "at least one agent is required".into(),
        ));
    }
    if spec.denominator == 0 {
        return Err(Error::Unsatisfiable("denominator must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = i64::from(spec.denominator);
    let top = i64::from(spec.bound) * d;
    let cardinal = |rng: &mut ChaCha8Rng, low: i64| ratio(rng.gen_range(low..=top), d);
    let needs_positive = matches!(
        spec.domain,
        Domain::General | Domain::NonZero | Domain::IdenticalCardinal | Domain::IdenticalOrdinal
    );
    if needs_positive && m > 0 && top < 1 {
        return Err(Error::Unsatisfiable(format!(
            "{} needs a positive value bound",
            spec.domain
        )));
    }

    let rows: Vec<Vec<Rational>> = match spec.domain {
        Domain::General => {
            let mut rows: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..m).map(|_| cardinal(&mut rng, 0)).collect())
                .collect();
            for h in 0..m {
                if rows.iter().all(|r| r[h].is_zero()) {
                    let a = rng.gen_range(0..n);
                    rows[a][h] = cardinal(&mut rng, 1);
                }
            }
            rows
        }
        Domain::NonZero => (0..n)
            .map(|_| (0..m).map(|_| cardinal(&mut rng, 1)).collect())
            .collect(),
        Domain::Binary => {
            let mut rows: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..m).map(|_| int(rng.gen_range(0..=1))).collect())
                .collect();
            for h in 0..m {
                if rows.iter().all(|r| r[h].is_zero()) {
                    let a = rng.gen_range(0..n);
                    rows[a][h] = Rational::one();
                }
            }
            rows
        }
        Domain::IdenticalCardinal => {
            let row: Vec<Rational> = (0..m).map(|_| cardinal(&mut rng, 1)).collect();
            vec![row; n]
        }
        Domain::IdenticalOrdinal => {
            if top < m as i64 {
                return Err(Error::Unsatisfiable(format!(
                    "identical-ordinal needs {m} distinct values, bound allows {top}"
                )));
            }
            let mut ranking: Vec<usize> = (0..m).collect();
            ranking.shuffle(&mut rng);
            (0..n)
                .map(|_| {
                    let mut picks: Vec<i64> = (1..=top).collect::<Vec<_>>();
                    picks.shuffle(&mut rng);
                    let mut values = picks[..m].to_vec();
                    values.sort_unstable_by(|a, b| b.cmp(a));
                    let mut row = vec![Rational::zero(); m];
                    for (rank, &item) in ranking.iter().enumerate() {
                        row[item] = ratio(values[rank], d);
                    }
                    row
                })
                .collect()
        }
        Domain::Borda => (0..n)
            .map(|_| {
                let mut row: Vec<i64> = (1..=m as i64).collect();
                row.shuffle(&mut rng);
                row.into_iter().map(int).collect()
            })
            .collect(),
        Domain::Lexicographic => {
            if m > 62 {
                return Err(Error::Unsatisfiable(
                    "lexicographic supports m <= 62".into(),
                ));
            }
            (0..n)
                .map(|_| {
                    let mut row: Vec<i64> = (0..m as u32).map(|e| 1i64 << e).collect();
                    row.shuffle(&mut rng);
                    row.into_iter().map(int).collect()
                })
                .collect()
        }
    };
    Instance::new(Matrix::new(rows)?)
}

/// Every instance with `agents` agents, `items` items and utilities drawn
/// from `values`, up to renaming agents: rows come in nondecreasing
/// lexicographic order. Instances with an unvalued item are skipped.
pub fn exhaustive(agents: usize, items: usize, values: &[i64]) -> impl Iterator<Item = Instance> {
    let rows: Vec<Vec<Rational>> = (0..items)
        .map(|_| values.iter().map(|&v| int(v)))
        .multi_cartesian_product()
        .collect();
    let rows = if items == 0 { vec![Vec::new()] } else { rows };
    rows.into_iter()
        .combinations_with_replacement(agents)
        .filter_map(|combo| Instance::new(Matrix::new(combo).ok()?).ok())
}

/// Independent membership test for each domain.
pub fn in_domain(domain: Domain, instance: &Instance) -> bool {
    let u = instance.utilities();
    let rows = u.rows();
    let m = instance.items();
    let permutation_of = |row: &[Rational], values: &[Rational]| {
        let mut a = row.to_vec();
        a.sort();
        let mut b = values.to_vec();
        b.sort();
        a == b
    };
    match domain {
        Domain::General => (0..m).all(|h| u.column(h).any(|v| v.is_positive())),
        Domain::NonZero => u.all_positive(),
        Domain::Binary => u.is_binary() && (0..m).all(|h| u.column(h).any(|v| v.is_one())),
        Domain::IdenticalCardinal => rows.iter().all_equal() && u.all_positive(),
        Domain::IdenticalOrdinal => {
            let order = |row: &[Rational]| -> Option<Vec<usize>> {
                let distinct: BTreeSet<&Rational> = row.iter().collect();
                (distinct.len() == row.len()).then(|| {
                    (0..row.len())
                        .sorted_by(|&a, &b| row[b].cmp(&row[a]))
                        .collect()
                })
            };
            u.all_positive()
                && rows.iter().map(|r| order(r)).all_equal()
                && rows.iter().all(|r| order(r).is_some())
        }
        Domain::Borda => {
            let values: Vec<Rational> = (1..=m as i64).map(int).collect();
            rows.iter().all(|r| permutation_of(r, &values))
        }
        Domain::Lexicographic => {
            let values: Vec<Rational> = (0..m as u32).map(|e| int(1i64 << e)).collect();
            rows.iter().all(|r| permutation_of(r, &values))
        }
    }
}

/// Hand-written outcome attached to one bid profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Override {
    Distribution(AllocationDistribution),
    /// Realised with items allocated independently.
    Assignment(AssignmentMatrix),
}

/// A base mechanism with per-profile exceptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructedMechanism {
    name: String,
    base: MechanismKind,
    overrides: Vec<(BidProfile, AllocationDistribution)>,
}

impl ConstructedMechanism {
    pub fn new(name: impl Into<String>, base: MechanismKind) -> Self {
        ConstructedMechanism {
            name: name.into(),
            base,
            overrides: Vec::new(),
        }
    }

    pub fn base(&self) -> &MechanismKind {
        &self.base
    }

    /// Returns `outcome` whenever the reported bids equal `bids`.
    pub fn with_override(mut self, bids: BidProfile, outcome: Override) -> Result<Self> {
        let dist = match outcome {
            Override::Distribution(d) => d,
            Override::Assignment(p) => product_distribution(&p)?,
        };
        if dist.agents() != bids.agents() || dist.items() != bids.items() {
            return Err(Error::ShapeMismatch {
                expected_agents: bids.agents(),
                expected_items: bids.items(),
                agents: dist.agents(),
                items: dist.items(),
            });
        }
        for alloc in dist.support() {
            for (h, owner) in alloc.owners().iter().enumerate() {
                let wasteful = match owner {
                    Some(a) => !bids.bid(*a, h).is_positive(),
                    None => bids.matrix().column(h).any(|v| v.is_positive()),
                };
                if wasteful {
                    return Err(Error::InvalidDistribution(format!(
                        "override allocation {alloc} is wasteful on o_{}",
                        h + 1
                    )));
                }
            }
        }
        self.overrides.retain(|(b, _)| *b != bids);
        self.overrides.push((bids, dist));
        Ok(self)
    }
}

/// Independent-items lottery with the given marginals; zero columns are
/// discarded.
pub fn product_distribution(p: &AssignmentMatrix) -> Result<AllocationDistribution> {
    let options: Vec<Vec<(Option<usize>, Rational)>> = (0..p.items())
        .map(|h| {
            let opts: Vec<(Option<usize>, Rational)> = (0..p.agents())
                .filter(|&a| p.get(a, h).is_positive())
                .map(|a| (Some(a), p.get(a, h).clone()))
                .collect();
            if opts.is_empty() {
                vec![(None, Rational::one())]
            } else {
                opts
            }
        })
        .collect();
    if options.is_empty() {
        return AllocationDistribution::degenerate(p.agents(), Allocation::empty());
    }
    let weighted = options.into_iter().multi_cartesian_product().map(|choice| {
        let prob: Rational = choice.iter().map(|(_, q)| q.clone()).product();
        (
            Allocation::new(choice.into_iter().map(|(o, _)| o).collect()),
            prob,
        )
    });
    AllocationDistribution::new(p.agents(), p.items(), weighted)
}

impl Mechanism for ConstructedMechanism {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        match self.overrides.iter().find(|(b, _)| b == bids) {
            Some((_, dist)) => Ok(dist.clone()),
            None => self.base.run(bids, limits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperExample {
    pub id: u8,
    pub instance: Instance,
    pub mechanism: Option<ConstructedMechanism>,
}

/// Probability that agent 2 receives o_2 in the example-2 mechanism.
pub fn default_example2_probability() -> Rational {
    ratio(3, 4)
}

/// ε of the example-4 mechanism.
pub fn default_example4_epsilon() -> Rational {
    ratio(1, 4)
}

pub fn paper_example(id: u8) -> Result<PaperExample> {
    let instance = match id {
        1 | 4 => Instance::from_integers(&[vec![1, 2], vec![2, 1]])?,
        2 => Instance::from_integers(&[vec![1, 1], vec![0, 1]])?,
        3 => Instance::from_integers(&[vec![1, 4], vec![2, 3]])?,
        other => {
            return Err(Error::Unknown {
                kind: "example",
                name: other.to_string(),
            })
        }
    };
    let mechanism = match id {
        2 => Some(example2_mechanism(&default_example2_probability())?),
        4 => Some(example4_mechanism(&default_example4_epsilon())?),
        _ => None,
    };
    Ok(PaperExample {
        id,
        instance,
        mechanism,
    })
}

/// Like, except on `[[1,1],[0,1]]` where agent 2 gets o_2 with
/// probability `prob` in (1/2, 1].
pub fn example2_mechanism(prob: &Rational) -> Result<ConstructedMechanism> {
    if *prob <= ratio(1, 2) || *prob > Rational::one() {
        return Err(Error::InvalidDistribution(format!(
            "example 2 needs a probability in (1/2, 1], got {prob}"
        )));
    }
    let inst = Instance::from_integers(&[vec![1, 1], vec![0, 1]])?;
    let mut weighted = vec![(Allocation::from_owners(&[0, 1]), prob.clone())];
    if !prob.is_one() {
        weighted.push((Allocation::from_owners(&[0, 0]), Rational::one() - prob));
    }
    let dist = AllocationDistribution::new(2, 2, weighted)?;
    ConstructedMechanism::new(
        format!("example2-like(p={})", render(prob)),
        MechanismKind::Like,
    )
    .with_override(inst.sincere_bids(), Override::Distribution(dist))
}

/// Maximum Like, except on `[[1,2],[2,1]]` where agent 1 gets o_1 surely and
/// o_2 with probability `1 - eps`; agent 2 gets o_2 with probability `eps`.
pub fn example4_mechanism(eps: &Rational) -> Result<ConstructedMechanism> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::InvalidDistribution(format!(
            "example 4 needs ε in (0, 1], got {eps}"
        )));
    }
    let inst = Instance::from_integers(&[vec![1, 2], vec![2, 1]])?;
    let mut weighted = vec![(Allocation::from_owners(&[0, 1]), eps.clone())];
    if !eps.is_one() {
        weighted.push((Allocation::from_owners(&[0, 0]), Rational::one() - eps));
    }
    let dist = AllocationDistribution::new(2, 2, weighted)?;
    ConstructedMechanism::new(
        format!("example4-maximum-like(eps={})", render(eps)),
        MechanismKind::MaximumLike,
    )
    .with_override(inst.sincere_bids(), Override::Distribution(dist))
}

fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n m` header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: header_line,
            message: format!("bad header `{header}`"),
        })?;
    let [n, m] = dims[..] else {
        return Err(Error::Parse {
            line: header_line,
            message: format!("header must be `n m`, got `{header}`"),
        });
    };
    if n == 0 {
        return Err(Error::NoAgents);
    }
    let mut rows = Vec::with_capacity(n);
    for (line, content) in lines {
        if rows.len() == n || m == 0 {
            return Err(Error::Parse {
                line,
                message: format!("expected {n} rows of {m} values, found extra line"),
            });
        }
        let row = content
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        if row.len() != m {
            return Err(Error::Parse {
                line,
                message: format!("expected {m} values, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if m == 0 {
        rows = vec![Vec::new(); n];
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    Matrix::new(rows)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    Instance::new(parse_matrix(text)?)
}

/// Bid profiles share the instance format but may contain zero columns.
pub fn parse_bids(text: &str, instance: &Instance) -> Result<BidProfile> {
    BidProfile::for_instance(instance, parse_matrix(text)?)
}

pub fn serialize_matrix(matrix: &Matrix) -> String {
    let mut out = format!("{} {}\n", matrix.agents(), matrix.items());
    if matrix.items() > 0 {
        for a in 0..matrix.agents() {
            let row: Vec<String> = matrix.row(a).iter().map(render).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn serialize_instance(instance: &Instance) -> String {
    serialize_matrix(instance.utilities())
}

/// One generated block of a suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteEntry {
    pub spec: DomainSpec,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteInstance {
    pub label: String,
    pub domain: Domain,
    pub instance: Instance,
}

pub fn parse_manifest(text: &str) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: index + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(5..=7).contains(&fields.len()) {
            return Err(bad(format!(
                "expected `domain n m seed count [bound [denominator]]`, got `{line}`"
            )));
        }
        let domain: Domain = fields[0].parse()?;
        let num = |i: usize| -> Result<u64> {
            fields[i]
                .parse::<u64>()
                .map_err(|_| bad(format!("`{}` is not a nonnegative integer", fields[i])))
        };
        let mut spec = DomainSpec::new(domain, num(1)? as usize, num(2)? as usize, num(3)?);
        if fields.len() > 5 {
            spec.bound = num(5)? as u32;
        }
        if fields.len() > 6 {
            spec.denominator = num(6)? as u32;
        }
        out.push(SuiteEntry {
            spec,
            count: num(4)? as usize,
        });
    }
    Ok(out)
}

pub fn serialize_manifest(entries: &[SuiteEntry]) -> String {
    entries
        .iter()
        .map(|e| {
            format!(
                "{} {} {} {} {} {} {}\n",
                e.spec.domain,
                e.spec.agents,
                e.spec.items,
                e.spec.seed,
                e.count,
                e.spec.bound,
                e.spec.denominator
            )
        })
        .collect()
}

/// Instances of every entry, seeds `seed, seed + 1, ...`, in manifest order.
pub fn expand_suite(entries: &[SuiteEntry]) -> Result<Vec<SuiteInstance>> {
    let mut out = Vec::new();
    for entry in entries {
        for offset in 0..entry.count as u64 {
            let mut spec = entry.spec.clone();
            spec.seed = entry.spec.seed.wrapping_add(offset);
            out.push(SuiteInstance {
                label: spec.to_string(),
                domain: spec.domain,
                instance: generate(&spec)?,
            });
        }
    }
    Ok(out)
}

/// Mixed small instances used as the default desk suite.
pub fn small_suite_manifest() -> Vec<SuiteEntry> {
    let mut entries = Vec::new();
    let mut seed = 1;
    for domain in [
        Domain::General,
        Domain::Binary,
        Domain::NonZero,
        Domain::IdenticalCardinal,
    ] {
        for (n, m) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            entries.push(SuiteEntry {
                spec: DomainSpec::new(domain, n, m, seed).with_values(3, 1),
                count: 5,
            });
            seed += 100;
        }
    }
    entries
}

pub fn paper_suite() -> Vec<SuiteInstance> {
    (1..=3)
        .map(|id| SuiteInstance {
            label: format!("example{id}"),
            domain: Domain::General,
            instance: paper_example(id).expect("built-in example").instance,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::marginals;

    #[test]
    fn generated_instances_satisfy_their_domain() {
        for domain in Domain::ALL {
            for seed in 0..20 {
                let spec = DomainSpec::new(domain, 3, 4, seed);
                let inst = generate(&spec).unwrap();
                assert!(in_domain(domain, &inst), "{spec}: {}", inst.utilities());
                assert_eq!(generate(&spec).unwrap(), inst);
            }
        }
    }

    #[test]
    fn exhaustive_counts() {
        // 2 agents, 1 item, values {0,1}: rows (0),(1); pairs {00,01,11}
        // minus the unvalued one.
        assert_eq!(exhaustive(2, 1, &[0, 1]).count(), 2);
        // n=2, m=2, values 0..3: 256 ordered profiles, 225 with both columns
        // valued; 9 of those have equal rows.
        assert_eq!(exhaustive(2, 2, &[0, 1, 2, 3]).count(), (225 + 9) / 2);
        assert!(exhaustive(3, 2, &[0, 1]).all(|i| in_domain(Domain::Binary, &i)));
    }

    #[test]
    fn borda_rows_are_permutations() {
        let inst = generate(&DomainSpec::new(Domain::Borda, 2, 3, 9)).unwrap();
        for row in inst.utilities().rows() {
            let mut r = row.clone();
            r.sort();
            assert_eq!(r, vec![int(1), int(2), int(3)]);
        }
    }

    #[test]
    fn validators_reject_outsiders() {
        let ex1 = paper_example(1).unwrap().instance;
        assert!(!in_domain(Domain::Binary, &ex1));
        assert!(!in_domain(Domain::IdenticalCardinal, &ex1));
        assert!(in_domain(Domain::Borda, &ex1));
        assert!(in_domain(Domain::Lexicographic, &ex1));
        assert!(!in_domain(Domain::IdenticalOrdinal, &ex1));
        let ex2 = paper_example(2).unwrap().instance;
        assert!(!in_domain(Domain::NonZero, &ex2));
        assert!(in_domain(Domain::Binary, &ex2));
    }

    #[test]
    fn unsatisfiable_specs() {
        assert!(generate(&DomainSpec::new(Domain::Binary, 0, 2, 1)).is_err());
        assert!(
            generate(&DomainSpec::new(Domain::IdenticalOrdinal, 2, 5, 1).with_values(1, 2))
                .is_err()
        );
        assert!(generate(&DomainSpec::new(Domain::NonZero, 2, 2, 1).with_values(0, 6)).is_err());
    }

    #[test]
    fn paper_examples() {
        assert_eq!(
            paper_example(1).unwrap().instance,
            Instance::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap()
        );
        assert_eq!(
            paper_example(3).unwrap().instance,
            Instance::from_integers(&[vec![1, 4], vec![2, 3]]).unwrap()
        );
        assert!(paper_example(5).is_err());

        let ex4 = paper_example(4).unwrap();
        let mech = ex4.mechanism.unwrap();
        let d = mech
            .run(&ex4.instance.sincere_bids(), &Limits::default())
            .unwrap();
        let p = marginals(&d);
        let ubar = crate::model::expected_utilities(&p, ex4.instance.utilities()).unwrap();
        let eps = default_example4_epsilon();
        assert_eq!(ubar.get(0, 0), &(int(3) - int(2) * &eps));
        assert_eq!(ubar.get(1, 1), &eps);

        assert!(example2_mechanism(&ratio(1, 2)).is_err());
        assert!(example2_mechanism(&int(1)).is_ok());
        assert!(example4_mechanism(&int(0)).is_err());
    }

    #[test]
    fn constructed_mechanism_falls_back_to_base() {
        let ex2 = paper_example(2).unwrap();
        let mech = ex2.mechanism.unwrap();
        let limits = Limits::default();
        let own = marginals(&mech.run(&ex2.instance.sincere_bids(), &limits).unwrap());
        assert_eq!(own.get(1, 1), &ratio(3, 4));
        let other = ex2.instance.sincere_bids().with_bid(1, 1, int(2));
        let fallback = marginals(&mech.run(&other, &limits).unwrap());
        assert_eq!(fallback.get(1, 1), &ratio(1, 2));
    }

    #[test]
    fn overrides_are_validated() {
        let inst = paper_example(2).unwrap().instance;
        // gives o_1 to agent 2, who does not bid for it
        let bad = AllocationDistribution::degenerate(2, Allocation::from_owners(&[1, 1])).unwrap();
        assert!(ConstructedMechanism::new("bad", MechanismKind::Like)
            .with_override(inst.sincere_bids(), Override::Distribution(bad))
            .is_err());
        let p = AssignmentMatrix::new(vec![vec![int(1), ratio(1, 3)], vec![int(0), ratio(2, 3)]])
            .unwrap();
        let mech = ConstructedMechanism::new("assign", MechanismKind::Like)
            .with_override(inst.sincere_bids(), Override::Assignment(p.clone()))
            .unwrap();
        let d = mech.run(&inst.sincere_bids(), &Limits::default()).unwrap();
        assert_eq!(marginals(&d), p);
    }

    #[test]
    fn instance_text_format() {
        let inst = parse_instance("# example 1\n2 2\n1 2\n\n2 1\n").unwrap();
        assert_eq!(inst, paper_example(1).unwrap().instance);
        assert_eq!(serialize_instance(&inst), "2 2\n1 2\n2 1\n");
        let frac = parse_instance("1 2\n1/2 6/4").unwrap();
        assert_eq!(serialize_instance(&frac), "1 2\n1/2 3/2\n");
        assert_eq!(parse_instance(&serialize_instance(&frac)).unwrap(), frac);
        let empty = parse_instance("2 0\n").unwrap();
        assert_eq!(empty.items(), 0);
        assert_eq!(parse_instance(&serialize_instance(&empty)).unwrap(), empty);

        assert!(matches!(
            parse_instance("1 1\n0"),
            Err(Error::UnvaluedItem { item: 1 })
        ));
        assert!(matches!(
            parse_instance("2 2\n1 2"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_instance("1 2\n1 2 3"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("1 1\n-1"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_instance("1 1\n1\n1"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_instance("").is_err());
        assert!(parse_instance("x y").is_err());

        let bids = parse_bids("2 2\n0 1\n0 1\n", &inst).unwrap();
        assert!(bids.matrix().column(0).all(|v| v.is_zero()));
    }

    #[test]
    fn manifests() {
        let entries = parse_manifest("# blocks\nbinary 3 2 7 4\nborda 2 3 1 2 5 1\n").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].spec.domain, Domain::Binary);
        assert_eq!(entries[1].spec.bound, 5);
        assert_eq!(entries[1].spec.denominator, 1);
        let suite = expand_suite(&entries).unwrap();
        assert_eq!(suite.len(), 6);
        assert_eq!(suite[1].label, "binary n=3 m=2 seed=8");
        assert_eq!(
            parse_manifest(&serialize_manifest(&entries)).unwrap(),
            entries
        );
        assert!(parse_manifest("binary 3 2").is_err());
        assert!(parse_manifest("weird 3 2 1 1").is_err());
    }
}
