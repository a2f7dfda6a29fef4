//! Serializable report types. Agents and items are 1-based, rationals are
//! exact `p/q` strings. The layout is described in `docs/report-schema.md`.

use serde::Serialize;

use crate::axioms::{AxiomVerdict, Witness};
use crate::model::{
    expected_utilities, marginals, render, Allocation, AllocationDistribution, Instance, Matrix,
    Rational,
};
use crate::oracle::LpSolution;
use crate::strategic::{Deviation, Misreport};

pub fn rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(render).collect()
}

pub fn matrix(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.agents()).map(|a| rationals(m.row(a))).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AllocationJson {
    /// Owner of each item, `null` when discarded.
    pub owners: Vec<Option<usize>>,
    pub bundles: String,
}

impl AllocationJson {
    pub fn new(alloc: &Allocation, agents: usize) -> Self {
        AllocationJson {
            owners: alloc.owners().iter().map(|o| o.map(|a| a + 1)).collect(),
            bundles: alloc.display(agents),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SupportEntry {
    pub allocation: AllocationJson,
    pub probability: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DistributionReport {
    pub mechanism: String,
    pub agents: usize,
    pub items: usize,
    pub support: Vec<SupportEntry>,
    /// `assignment[i][h]`: probability that agent `i` gets item `h`.
    pub assignment: Vec<Vec<String>>,
    /// `expected_utilities[i][k]`: agent `i`'s expected value for agent
    /// `k`'s bundle.
    pub expected_utilities: Vec<Vec<String>>,
}

impl DistributionReport {
    pub fn new(mechanism: String, dist: &AllocationDistribution, instance: &Instance) -> Self {
        let n = dist.agents();
        let p = marginals(dist);
        let ubar = expected_utilities(&p, instance.utilities()).expect("shapes agree");
        DistributionReport {
            mechanism,
            agents: n,
            items: dist.items(),
            support: dist
                .iter()
                .map(|(a, q)| SupportEntry {
                    allocation: AllocationJson::new(a, n),
                    probability: render(q),
                })
                .collect(),
            assignment: p.rows().iter().map(|r| rationals(r)).collect(),
            expected_utilities: (0..n)
                .map(|i| (0..n).map(|k| render(ubar.get(i, k))).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct WeightJson {
    pub allocation: AllocationJson,
    pub weight: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessJson {
    Envy {
        allocation: Option<AllocationJson>,
        envious: usize,
        envied: usize,
    },
    Dominated {
        allocation: AllocationJson,
        by: AllocationJson,
    },
    Lottery {
        objective: String,
        weights: Vec<WeightJson>,
        utilities: Vec<String>,
    },
}

impl WitnessJson {
    pub fn new(witness: &Witness, agents: usize) -> Self {
        match witness {
            Witness::Envy {
                allocation,
                envious,
                envied,
            } => WitnessJson::Envy {
                allocation: allocation.as_ref().map(|a| AllocationJson::new(a, agents)),
                envious: envious + 1,
                envied: envied + 1,
            },
            Witness::Dominated { allocation, by } => WitnessJson::Dominated {
                allocation: AllocationJson::new(allocation, agents),
                by: AllocationJson::new(by, agents),
            },
            Witness::Lottery(lp) => lottery(lp, agents),
        }
    }
}

pub fn lottery(lp: &LpSolution, agents: usize) -> WitnessJson {
    WitnessJson::Lottery {
        objective: render(&lp.objective),
        weights: lp
            .weights
            .iter()
            .map(|(a, w)| WeightJson {
                allocation: AllocationJson::new(a, agents),
                weight: render(w),
            })
            .collect(),
        utilities: rationals(&lp.utilities),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerdictJson {
    pub axiom: String,
    pub holds: bool,
    pub margin: String,
    pub witness: Option<WitnessJson>,
}

impl VerdictJson {
    pub fn new(verdict: &AxiomVerdict, agents: usize) -> Self {
        VerdictJson {
            axiom: verdict.axiom.to_string(),
            holds: verdict.holds,
            margin: render(&verdict.margin),
            witness: verdict
                .witness
                .as_ref()
                .map(|w| WitnessJson::new(w, agents)),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DeviationJson {
    pub agent: usize,
    /// The full reported row of the deviating agent.
    pub bids: Vec<String>,
    /// Set for single-bid (online) deviations.
    pub item: Option<usize>,
    /// Utilities are summed over items `1..=horizon`.
    pub horizon: usize,
    pub sincere: String,
    pub deviant: String,
}

impl DeviationJson {
    pub fn new(dev: &Deviation, instance: &Instance) -> Self {
        DeviationJson {
            agent: dev.agent + 1,
            bids: rationals(&dev.bid_row(instance)),
            item: match &dev.misreport {
                Misreport::Single { item, .. } => Some(item + 1),
                Misreport::Row(_) => None,
            },
            horizon: dev.horizon,
            sincere: render(&dev.sincere),
            deviant: render(&dev.deviant),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct InstanceVerdict {
    pub label: String,
    pub utilities: Vec<Vec<String>>,
    pub verdict: VerdictJson,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub axiom: String,
    pub mechanism: String,
    pub holds: bool,
    pub instances: Vec<InstanceVerdict>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FoundDeviation {
    pub label: String,
    pub utilities: Vec<Vec<String>>,
    pub deviation: DeviationJson,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FalsifyReport {
    pub property: String,
    pub mechanism: String,
    pub instances_searched: usize,
    /// `"violation found"` or `"none in grid"`.
    pub verdict: String,
    pub deviation: Option<FoundDeviation>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub label: String,
    pub utilities: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ExampleJson {
    pub id: u8,
    pub utilities: Vec<Vec<String>>,
    pub mechanism: Option<String>,
}
