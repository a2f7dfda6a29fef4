//! Reproduction of the axiom table over generated suites.

use std::fmt;
use std::time::Instant;

use num_traits::One;
use serde::Serialize;

use super::report::{matrix, DeviationJson, VerdictJson};
use crate::axioms::{self, ex_ante_equivalent, ex_post_equivalent, Axiom, AxiomVerdict};
use crate::error::Result;
use crate::instances::{
    expand_suite, in_domain, paper_suite, Domain, DomainSpec, SuiteEntry, SuiteInstance,
};
use crate::mechanisms::{run_sincere, MechanismKind};
use crate::model::{AllocationDistribution, Instance, Limits, PriorityOrder, Rational};
use crate::strategic::{
    construct_deviation, memoryless_probe_witness, osp_falsify, sp_falsify, step_probe_witness,
    BidGrid, Deviation, ProbeFailure,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    General,
    Identical,
    Binary,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::General, Block::Identical, Block::Binary];

    pub fn name(self) -> &'static str {
        match self {
            Block::General => "general",
            Block::Identical => "identical",
            Block::Binary => "binary",
        }
    }

    /// Block that instances of `domain` are tested in.
    pub fn of(domain: Domain) -> Block {
        match domain {
            Domain::IdenticalCardinal => Block::Identical,
            Domain::Binary => Block::Binary,
            _ => Block::General,
        }
    }

    /// Whether a derived witness instance still belongs to the block.
    pub fn accepts(self, instance: &Instance) -> bool {
        match self {
            Block::General => in_domain(Domain::General, instance),
            Block::Identical => in_domain(Domain::IdenticalCardinal, instance),
            Block::Binary => in_domain(Domain::Binary, instance),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Sp,
    Osp,
    Efa,
    Sefa,
    Efp,
    Sefp,
    Befp,
    Pea,
    Pep,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Sp,
        Property::Osp,
        Property::Efa,
        Property::Sefa,
        Property::Efp,
        Property::Sefp,
        Property::Befp,
        Property::Pea,
        Property::Pep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Sp => "SP",
            Property::Osp => "OSP",
            Property::Efa => "EFA",
            Property::Sefa => "SEFA",
            Property::Efp => "EFP",
            Property::Sefp => "SEFP",
            Property::Befp => "BEFP",
            Property::Pea => "PEA",
            Property::Pep => "PEP",
        }
    }

    fn axiom(self) -> Option<Axiom> {
        Some(match self {
            Property::Sp | Property::Osp => return None,
            Property::Efa => Axiom::Efa,
            Property::Sefa => Axiom::Sefa,
            Property::Efp => Axiom::Efp,
            Property::Sefp => Axiom::Sefp,
            Property::Befp => Axiom::Befp,
            Property::Pea => Axiom::Pea,
            Property::Pep => Axiom::Pep,
        })
    }
}

/// Rows of the expected table; `*` marks results carried over from prior
/// work. Columns follow [`Property::ALL`].
const EXPECTED: [(Block, &str, [&str; 9]); 10] = [
    (
        Block::General,
        "orp",
        ["✓", "✓", "✓", "✓", "×", "×", "×", "×", "✓"],
    ),
    (
        Block::General,
        "osd",
        ["✓", "✓", "×", "×", "×", "×", "×", "✓", "✓"],
    ),
    (
        Block::General,
        "maximum-like",
        ["×", "×", "×", "×", "×", "×", "×", "✓", "✓"],
    ),
    (
        Block::General,
        "pareto-like",
        ["×", "×", "×", "×", "×", "×", "×", "×", "✓"],
    ),
    (
        Block::General,
        "like",
        ["✓*", "✓", "✓*", "✓", "×*", "×", "×*", "×", "×"],
    ),
    (
        Block::General,
        "balanced-like",
        ["×*", "✓", "×*", "×", "×*", "×", "×*", "×", "×"],
    ),
    (
        Block::Identical,
        "like",
        ["✓*", "✓", "✓*", "✓", "×*", "×", "×", "✓", "✓"],
    ),
    (
        Block::Identical,
        "balanced-like",
        ["×", "✓", "✓", "✓", "×*", "×", "×", "✓", "✓"],
    ),
    (
        Block::Binary,
        "like",
        ["✓*", "✓", "✓*", "✓", "×*", "×", "×*", "✓", "✓"],
    ),
    (
        Block::Binary,
        "balanced-like",
        ["×*", "✓", "✓*", "×", "×*", "×", "✓*", "✓", "✓"],
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedCell {
    pub block: Block,
    pub mechanism: &'static str,
    pub property: Property,
    pub holds: bool,
    pub prior_work: bool,
}

impl ExpectedCell {
    pub fn provenance(&self) -> &'static str {
        if self.prior_work {
            "prior work"
        } else {
            "original"
        }
    }
}

pub fn expected_cells() -> Vec<ExpectedCell> {
    EXPECTED
        .iter()
        .flat_map(|(block, mechanism, marks)| {
            Property::ALL
                .iter()
                .zip(marks)
                .map(move |(&property, mark)| ExpectedCell {
                    block: *block,
                    mechanism,
                    property,
                    holds: mark.starts_with('✓'),
                    prior_work: mark.ends_with('*'),
                })
        })
        .collect()
}

/// Mechanisms tested in `block`, in table order.
pub fn block_mechanisms(block: Block) -> Vec<&'static str> {
    EXPECTED
        .iter()
        .filter(|(b, _, _)| *b == block)
        .map(|(_, name, _)| *name)
        .collect()
}

/// Table mechanism for an instance with `agents` agents; `osd` uses the
/// identity priority.
pub fn table_mechanism(name: &str, agents: usize) -> MechanismKind {
    match name {
        "osd" => MechanismKind::Osd(PriorityOrder::identity(agents)),
        other => MechanismKind::parse(other, None).expect("table mechanism names are valid"),
    }
}

/// Default suite: about `trials` generated instances per block, seeds
/// counting up from `seed`. The general block mixes five domains.
pub fn table_manifest(trials: usize, seed: u64) -> Vec<SuiteEntry> {
    let small = vec![(2, 1), (2, 2), (2, 3), (3, 2), (3, 3)];
    let layouts = [
        (
            vec![
                Domain::General,
                Domain::NonZero,
                Domain::Borda,
                Domain::Lexicographic,
                Domain::IdenticalOrdinal,
            ],
            small.clone(),
        ),
        (vec![Domain::IdenticalCardinal], small),
        (
            vec![Domain::Binary],
            vec![(2, 2), (2, 3), (3, 2), (3, 3), (3, 4)],
        ),
    ];

    let mut entries = Vec::new();
    let mut next_seed = seed;
    for (domains, sizes) in layouts {
        let cells = domains.len() * sizes.len();
        let count = trials.div_ceil(cells).max(1);
        for domain in &domains {
            for &(n, m) in &sizes {
                entries.push(SuiteEntry {
                    spec: DomainSpec::new(*domain, n, m, next_seed).with_values(3, 1),
                    count,
                });
                next_seed += count as u64;
            }
        }
    }
    entries
}

/// Instances of each block; the worked examples join the general block.
pub fn block_suites(entries: &[SuiteEntry]) -> Result<Vec<(Block, Vec<SuiteInstance>)>> {
    let mut out: Vec<(Block, Vec<SuiteInstance>)> =
        Block::ALL.iter().map(|&b| (b, Vec::new())).collect();
    out[0].1.extend(paper_suite());
    for inst in expand_suite(entries)? {
        let block = Block::of(inst.domain);
        out.iter_mut()
            .find(|(b, _)| *b == block)
            .expect("block")
            .1
            .push(inst);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Match,
    Mismatch,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CellWitness {
    pub instance: String,
    pub utilities: Vec<Vec<String>>,
    pub verdict: Option<VerdictJson>,
    pub deviation: Option<DeviationJson>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ProbeJson {
    pub step: bool,
    pub memoryless: Option<bool>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CellReport {
    pub block: Block,
    pub mechanism: String,
    pub property: String,
    pub expected: String,
    pub provenance: String,
    /// `✓`, `×` (witness found) or `×?` (a structural probe failed but no
    /// concrete deviation was found).
    pub observed: String,
    pub status: Status,
    pub trials: usize,
    pub witness: Option<CellWitness>,
    pub probes: Option<ProbeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub block: Block,
    pub mechanism: String,
    pub reference: String,
    pub kind: String,
    pub holds: bool,
    pub trials: usize,
    pub counterexample: Option<String>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BlockReport {
    pub block: Block,
    pub instances: usize,
    pub cells: Vec<CellReport>,
    pub equivalences: Vec<EquivalenceReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq, Default)]
pub struct Summary {
    pub matches: usize,
    pub mismatches: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TableReport {
    pub blocks: Vec<BlockReport>,
    pub summary: Summary,
    pub exit_code: i32,
}

struct Observation {
    observed: &'static str,
    witness: Option<CellWitness>,
    probes: Option<ProbeJson>,
}

fn deviation_witness(label: String, instance: &Instance, dev: &Deviation) -> CellWitness {
    CellWitness {
        instance: label,
        utilities: matrix(instance.utilities()),
        verdict: None,
        deviation: Some(DeviationJson::new(dev, instance)),
    }
}

fn strategic_cell(
    name: &str,
    block: Block,
    suite: &[SuiteInstance],
    online: bool,
    limits: &Limits,
) -> Result<Observation> {
    let mut step_failure: Option<(usize, ProbeFailure)> = None;
    let mut memoryless_failure: Option<(usize, ProbeFailure)> = None;
    for (index, s) in suite.iter().enumerate() {
        let mech = table_mechanism(name, s.instance.agents());
        let grid = BidGrid::for_instance(&s.instance, &[]);
        for agent in 0..s.instance.agents() {
            for item in 0..s.instance.items() {
                if step_failure.is_none() {
                    if let Some(f) =
                        step_probe_witness(&mech, &s.instance, agent, item, &grid, limits)?
                    {
                        step_failure = Some((index, f));
                    }
                }
                if !online && memoryless_failure.is_none() {
                    if let Some(f) =
                        memoryless_probe_witness(&mech, &s.instance, agent, item, &grid, limits)?
                    {
                        memoryless_failure = Some((index, f));
                    }
                }
            }
        }
    }
    let probes = ProbeJson {
        step: step_failure.is_none(),
        memoryless: (!online).then_some(memoryless_failure.is_none()),
    };
    let clean = step_failure.is_none() && memoryless_failure.is_none();

    let mut witness = None;
    if !online {
        for (index, f) in step_failure.iter().chain(memoryless_failure.iter()) {
            let s = &suite[*index];
            let mech = table_mechanism(name, s.instance.agents());
            if let Some((derived, dev)) = construct_deviation(&mech, &s.instance, f, limits)? {
                if block.accepts(&derived) {
                    witness = Some(deviation_witness(
                        format!("derived from {}", s.label),
                        &derived,
                        &dev,
                    ));
                    break;
                }
            }
        }
    }
    if witness.is_none() {
        for s in suite {
            let mech = table_mechanism(name, s.instance.agents());
            let grid = BidGrid::for_instance(&s.instance, &[]);
            let found = if online {
                osp_falsify(&mech, &s.instance, &grid, limits)?
            } else {
                sp_falsify(&mech, &s.instance, &grid, limits)?
            };
            if let Some(dev) = found {
                witness = Some(deviation_witness(s.label.clone(), &s.instance, &dev));
                break;
            }
        }
    }
    Ok(Observation {
        observed: match (&witness, clean) {
            (Some(_), _) => "×",
            (None, true) => "✓",
            (None, false) => "×?",
        },
        witness,
        probes: Some(probes),
    })
}

fn axiom_verdict(
    property: Property,
    block: Block,
    dist: &AllocationDistribution,
    instance: &Instance,
    limits: &Limits,
) -> Result<AxiomVerdict> {
    match property {
        Property::Befp if block != Block::Binary => {
            axioms::check_bounded_envy(dist, instance, &Rational::one())
        }
        other => axioms::check(
            other.axiom().expect("axiom property"),
            dist,
            instance,
            limits,
        ),
    }
}

fn axiom_cell(
    property: Property,
    block: Block,
    suite: &[SuiteInstance],
    dists: &[AllocationDistribution],
    limits: &Limits,
) -> Result<Observation> {
    for (s, dist) in suite.iter().zip(dists) {
        let verdict = axiom_verdict(property, block, dist, &s.instance, limits)?;
        if !verdict.holds {
            return Ok(Observation {
                observed: "×",
                witness: Some(CellWitness {
                    instance: s.label.clone(),
                    utilities: matrix(s.instance.utilities()),
                    verdict: Some(VerdictJson::new(&verdict, s.instance.agents())),
                    deviation: None,
                }),
                probes: None,
            });
        }
    }
    Ok(Observation {
        observed: "✓",
        witness: None,
        probes: None,
    })
}

fn status(expected: bool, observed: &str) -> Status {
    match (expected, observed) {
        (true, "✓") | (false, "×") => Status::Match,
        (true, _) => Status::Mismatch,
        (false, _) => Status::Inconclusive,
    }
}

fn equivalences(
    block: Block,
    suite: &[SuiteInstance],
    limits: &Limits,
) -> Result<Vec<EquivalenceReport>> {
    if block != Block::Identical {
        return Ok(Vec::new());
    }
    let like = MechanismKind::Like;
    let claims = [
        (MechanismKind::ParetoLike, "ex-post"),
        (MechanismKind::MaximumLike, "ex-post"),
        (MechanismKind::BalancedLike, "ex-ante"),
    ];
    let mut out = Vec::new();
    for (mech, kind) in claims {
        let mut counterexample = None;
        for s in suite {
            let bids = s.instance.sincere_bids();
            let same = if kind == "ex-post" {
                ex_post_equivalent(&mech, &like, &bids, limits)?
            } else {
                ex_ante_equivalent(&mech, &like, &bids, limits)?
            };
            if !same {
                counterexample = Some(s.label.clone());
                break;
            }
        }
        let holds = counterexample.is_none();
        out.push(EquivalenceReport {
            block,
            mechanism: mech.to_string(),
            reference: like.to_string(),
            kind: kind.into(),
            holds,
            trials: suite.len(),
            counterexample,
            status: if holds {
                Status::Match
            } else {
                Status::Mismatch
            },
        });
    }
    Ok(out)
}

/// Fills every cell of the expected table from this run's suites.
pub fn reproduce(
    suites: &[(Block, Vec<SuiteInstance>)],
    limits: &Limits,
    timings: bool,
) -> Result<TableReport> {
    let expected = expected_cells();
    let mut blocks = Vec::new();
    let mut summary = Summary::default();
    for (block, suite) in suites {
        let mut cells = Vec::new();
        for name in block_mechanisms(*block) {
            let dists = suite
                .iter()
                .map(|s| {
                    run_sincere(
                        &table_mechanism(name, s.instance.agents()),
                        &s.instance,
                        limits,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            for cell in expected
                .iter()
                .filter(|c| c.block == *block && c.mechanism == name)
            {
                let start = Instant::now();
                let obs = match cell.property {
                    Property::Sp => strategic_cell(name, *block, suite, false, limits)?,
                    Property::Osp => strategic_cell(name, *block, suite, true, limits)?,
                    p => axiom_cell(p, *block, suite, &dists, limits)?,
                };
                let status = status(cell.holds, obs.observed);
                match status {
                    Status::Match => summary.matches += 1,
                    Status::Mismatch => summary.mismatches += 1,
                    Status::Inconclusive => summary.inconclusive += 1,
                }
                cells.push(CellReport {
                    block: *block,
                    mechanism: name.to_string(),
                    property: cell.property.name().to_string(),
                    expected: if cell.holds { "✓" } else { "×" }.to_string(),
                    provenance: cell.provenance().to_string(),
                    observed: obs.observed.to_string(),
                    status,
                    trials: suite.len(),
                    witness: obs.witness,
                    probes: obs.probes,
                    runtime_ms: timings.then(|| start.elapsed().as_millis() as u64),
                });
            }
        }
        let equivalences = equivalences(*block, suite, limits)?;
        for e in &equivalences {
            match e.status {
                Status::Match => summary.matches += 1,
                _ => summary.mismatches += 1,
            }
        }
        blocks.push(BlockReport {
            block: *block,
            instances: suite.len(),
            cells,
            equivalences,
        });
    }
    let exit_code = if summary.mismatches > 0 {
        1
    } else if summary.inconclusive > 0 {
        2
    } else {
        0
    };
    Ok(TableReport {
        blocks,
        summary,
        exit_code,
    })
}

impl TableReport {
    pub fn cell(&self, block: Block, mechanism: &str, property: Property) -> Option<&CellReport> {
        self.blocks
            .iter()
            .find(|b| b.block == block)?
            .cells
            .iter()
            .find(|c| c.mechanism == mechanism && c.property == property.name())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out += &format!("{} block, {} instances\n", b.block, b.instances);
            out += &format!("{:<14}", "mechanism");
            for p in Property::ALL {
                out += &format!("{:<6}", p.name());
            }
            out += "\n";
            for name in block_mechanisms(b.block) {
                out += &format!("{name:<14}");
                for c in b.cells.iter().filter(|c| c.mechanism == name) {
                    let mark = match c.status {
                        Status::Match => "",
                        Status::Mismatch => "!",
                        Status::Inconclusive => "?",
                    };
                    out += &format!("{:<6}", format!("{}{mark}", c.observed));
                }
                out += "\n";
            }
            for e in &b.equivalences {
                out += &format!(
                    "{} {} equivalent to {}: {}\n",
                    e.mechanism,
                    e.kind,
                    e.reference,
                    if e.holds { "yes" } else { "no" }
                );
            }
            for c in b.cells.iter().filter(|c| c.status != Status::Match) {
                out += &format!(
                    "{:?}: {} {} expected {} observed {}\n",
                    c.status, c.mechanism, c.property, c.expected, c.observed
                );
            }
            out += "\n";
        }
        out += &format!(
            "{} match, {} mismatch, {} inconclusive\n",
            self.summary.matches, self.summary.mismatches, self.summary.inconclusive
        );
        out
    }
}
