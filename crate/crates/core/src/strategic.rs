//! Strategy-proofness search over a finite bid grid, and the structural
//! step / memoryless probes.
//!
//! Every search here is sound but incomplete: a returned [`Deviation`] is a
//! real strict gain (re-checked by [`verify_deviation`]), while "none" only
//! means that no grid row helps.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{int, marginals, Instance, Limits, Matrix, Rational};

/// Candidate bids for every (agent, item), ascending, always containing 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidGrid {
    values: Vec<Vec<Vec<Rational>>>,
}

impl BidGrid {
    /// `{0}`, the item's column, the agent's row, half the smallest and
    /// twice the largest positive utility, and `extra`.
    pub fn for_instance(instance: &Instance, extra: &[Rational]) -> Self {
        let u = instance.utilities();
        let all: Vec<Rational> = u
            .rows()
            .into_iter()
            .flatten()
            .filter(|v| v.is_positive())
            .collect();
        let sentinels: Vec<Rational> = match (all.iter().min(), all.iter().max()) {
            (Some(lo), Some(hi)) => vec![lo / int(2), hi * int(2)],
            _ => Vec::new(),
        };
        let values = (0..instance.agents())
            .map(|i| {
                (0..instance.items())
                    .map(|j| {
                        let mut set: BTreeSet<Rational> = BTreeSet::new();
                        set.insert(Rational::zero());
                        set.extend(u.column(j).cloned());
                        set.extend(u.row(i).iter().cloned());
                        set.extend(sentinels.iter().cloned());
                        set.extend(extra.iter().filter(|v| !v.is_negative()).cloned());
                        set.into_iter().collect()
                    })
                    .collect()
            })
            .collect();
        BidGrid { values }
    }

    pub fn values(&self, agent: usize, item: usize) -> &[Rational] {
        &self.values[agent][item]
    }

    /// Number of full bid rows for `agent` over the first `items` items.
    pub fn rows_for(&self, agent: usize, items: usize) -> u128 {
        self.values[agent][..items]
            .iter()
            .map(|v| v.len() as u128)
            .product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Misreport {
    /// A whole bid row.
    Row(Vec<Rational>),
    /// One bid changed, sincere elsewhere.
    Single { item: usize, bid: Rational },
}

/// A strict gain for `agent` against sincere opponents. Utilities are summed
/// over the first `horizon` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub agent: usize,
    pub misreport: Misreport,
    pub horizon: usize,
    pub sincere: Rational,
    pub deviant: Rational,
}

impl Deviation {
    pub fn bid_row(&self, instance: &Instance) -> Vec<Rational> {
        match &self.misreport {
            Misreport::Row(row) => row.clone(),
            Misreport::Single { item, bid } => {
                let mut row = instance.utilities().row(self.agent).to_vec();
                row[*item] = bid.clone();
                row
            }
        }
    }

    pub fn gain(&self) -> Rational {
        &self.deviant - &self.sincere
    }
}

/// `Σ_{h < horizon} p_ih u_ih` when `agent` reports `row`.
pub fn expected_own_utility<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    row: &[Rational],
    horizon: usize,
    limits: &Limits,
) -> Result<Rational> {
    let bids = instance.sincere_bids().with_row(agent, row);
    let p = marginals(&mech.run(&bids, limits)?);
    Ok((0..horizon)
        .map(|h| p.get(agent, h) * instance.utility(agent, h))
        .sum())
}

/// Re-simulates both sides of `dev` and checks the claimed values exactly.
pub fn verify_deviation<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    dev: &Deviation,
    limits: &Limits,
) -> Result<bool> {
    let sincere_row = instance.utilities().row(dev.agent).to_vec();
    let sincere =
        expected_own_utility(mech, instance, dev.agent, &sincere_row, dev.horizon, limits)?;
    let deviant = expected_own_utility(
        mech,
        instance,
        dev.agent,
        &dev.bid_row(instance),
        dev.horizon,
        limits,
    )?;
    Ok(sincere == dev.sincere && deviant == dev.deviant && deviant > sincere)
}

/// First grid row (agents ascending, rows in lexicographic order) that
/// strictly raises the agent's expected utility.
pub fn sp_falsify<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<Option<Deviation>> {
    let m = instance.items();
    let n = instance.agents();
    if m == 0 {
        return Ok(None);
    }
    let work: u128 = (0..n).map(|i| grid.rows_for(i, m)).sum();
    limits.check("strategy-proofness grid search", work)?;
    for agent in 0..n {
        let sincere_row = instance.utilities().row(agent).to_vec();
        let sincere = expected_own_utility(mech, instance, agent, &sincere_row, m, limits)?;
        let rows = (0..m)
            .map(|j| grid.values(agent, j).iter().cloned())
            .multi_cartesian_product();
        for row in rows {
            if row == sincere_row {
                continue;
            }
            let deviant = expected_own_utility(mech, instance, agent, &row, m, limits)?;
            if deviant > sincere {
                return Ok(Some(Deviation {
                    agent,
                    misreport: Misreport::Row(row),
                    horizon: m,
                    sincere,
                    deviant,
                }));
            }
        }
    }
    Ok(None)
}

/// First single-bid change at item `j` that raises the expected utility over
/// items `o_1..o_j`.
pub fn osp_falsify<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<Option<Deviation>> {
    let m = instance.items();
    let n = instance.agents();
    let work: u128 = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| grid.values(i, j).len() as u128)
        .sum();
    limits.check("online strategy-proofness grid search", work)?;
    let sincere_p = marginals(&mech.run(&instance.sincere_bids(), limits)?);
    for agent in 0..n {
        let mut sincere = Rational::zero();
        for item in 0..m {
            sincere += sincere_p.get(agent, item) * instance.utility(agent, item);
            for bid in grid.values(agent, item) {
                if bid == instance.utility(agent, item) {
                    continue;
                }
                let bids = instance.sincere_bids().with_bid(agent, item, bid.clone());
                let p = marginals(&mech.run(&bids, limits)?);
                let deviant: Rational = (0..=item)
                    .map(|h| p.get(agent, h) * instance.utility(agent, h))
                    .sum();
                if deviant > sincere {
                    return Ok(Some(Deviation {
                        agent,
                        misreport: Misreport::Single {
                            item,
                            bid: bid.clone(),
                        },
                        horizon: item + 1,
                        sincere,
                        deviant,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Step,
    Memoryless,
}

/// Two bid rows of `agent` (others sincere) giving different `p_i(Π_j)`.
/// `rows[0]` is the one with the smaller probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeFailure {
    pub kind: ProbeKind,
    pub agent: usize,
    pub item: usize,
    pub rows: [Vec<Rational>; 2],
    pub probabilities: [Rational; 2],
}

fn probability<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    item: usize,
    row: &[Rational],
    limits: &Limits,
) -> Result<Rational> {
    let bids = instance.sincere_bids().with_row(agent, row);
    Ok(marginals(&mech.run(&bids, limits)?)
        .get(agent, item)
        .clone())
}

fn failure(
    kind: ProbeKind,
    agent: usize,
    item: usize,
    a: (Vec<Rational>, Rational),
    b: (Vec<Rational>, Rational),
) -> ProbeFailure {
    let (lo, hi) = if a.1 <= b.1 { (a, b) } else { (b, a) };
    ProbeFailure {
        kind,
        agent,
        item,
        rows: [lo.0, hi.0],
        probabilities: [lo.1, hi.1],
    }
}

/// Varies only `v_ij`: the probability must be 0 at bid 0 and the same for
/// every positive grid bid.
pub fn step_probe_witness<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    item: usize,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<Option<ProbeFailure>> {
    let base = instance.utilities().row(agent).to_vec();
    let mut reference: Option<(Vec<Rational>, Rational)> = None;
    for bid in grid.values(agent, item) {
        let mut row = base.clone();
        row[item] = bid.clone();
        let p = probability(mech, instance, agent, item, &row, limits)?;
        if bid.is_zero() {
            if !p.is_zero() {
                let mut other = base.clone();
                other[item] = Rational::zero();
                return Ok(Some(failure(
                    ProbeKind::Step,
                    agent,
                    item,
                    (row, p),
                    (other, Rational::zero()),
                )));
            }
            continue;
        }
        match &reference {
            None => reference = Some((row, p)),
            Some((_, q)) if *q == p => {}
            Some(r) => {
                return Ok(Some(failure(
                    ProbeKind::Step,
                    agent,
                    item,
                    r.clone(),
                    (row, p),
                )))
            }
        }
    }
    Ok(None)
}

pub fn step_probe<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    item: usize,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<bool> {
    Ok(step_probe_witness(mech, instance, agent, item, grid, limits)?.is_none())
}

/// Varies the agent's bids on `o_1..o_{j-1}` over the grid with `v_ij`
/// sincere: the probability for `o_j` must not change.
pub fn memoryless_probe_witness<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    item: usize,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<Option<ProbeFailure>> {
    if item == 0 {
        return Ok(None);
    }
    limits.check("memoryless probe", grid.rows_for(agent, item))?;
    let base = instance.utilities().row(agent).to_vec();
    let reference = probability(mech, instance, agent, item, &base, limits)?;
    let histories = (0..item)
        .map(|h| grid.values(agent, h).iter().cloned())
        .multi_cartesian_product();
    for history in histories {
        let mut row = history;
        row.extend_from_slice(&base[item..]);
        if row == base {
            continue;
        }
        let p = probability(mech, instance, agent, item, &row, limits)?;
        if p != reference {
            return Ok(Some(failure(
                ProbeKind::Memoryless,
                agent,
                item,
                (base, reference),
                (row, p),
            )));
        }
    }
    Ok(None)
}

pub fn memoryless_probe<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    agent: usize,
    item: usize,
    grid: &BidGrid,
    limits: &Limits,
) -> Result<bool> {
    Ok(memoryless_probe_witness(mech, instance, agent, item, grid, limits)?.is_none())
}

/// Turns a probe failure into a verified strict gain on a derived instance.
///
/// The instance is truncated after the probed item, the agent's true
/// utilities are set to the low-probability row on the earlier items, and
/// the probed item gets a weight large enough to outweigh any loss on them.
/// Returns `None` if the derived instance is invalid or re-simulation shows
/// no gain.
pub fn construct_deviation<M: Mechanism + ?Sized>(
    mech: &M,
    instance: &Instance,
    fail: &ProbeFailure,
    limits: &Limits,
) -> Result<Option<(Instance, Deviation)>> {
    let j = fail.item;
    let agent = fail.agent;
    let [low, high] = &fail.rows;
    let gap = &fail.probabilities[1] - &fail.probabilities[0];
    if !gap.is_positive() || !low[j].is_positive() {
        return Ok(None);
    }
    let truncated = instance.prefix(j + 1);
    let run_row = |row: &[Rational]| -> Result<Vec<Rational>> {
        let bids = truncated.sincere_bids().with_row(agent, &row[..=j]);
        let p = marginals(&mech.run(&bids, limits)?);
        Ok((0..=j).map(|h| p.get(agent, h).clone()).collect())
    };
    let p_low = run_row(low)?;
    let p_high = run_row(high)?;
    let loss: Rational = (0..j)
        .map(|h| (&p_low[h] - &p_high[h]) * &low[h])
        .filter(|v| v.is_positive())
        .sum();

    let mut truth: Vec<Rational> = low[..=j].to_vec();
    let mut deviation: Vec<Rational> = high[..=j].to_vec();
    if fail.kind == ProbeKind::Memoryless {
        let weight = std::cmp::max(low[j].clone(), loss / &gap + Rational::one());
        truth[j] = weight.clone();
        deviation[j] = weight;
    }
    let rows: Vec<Vec<Rational>> = (0..truncated.agents())
        .map(|a| {
            if a == agent {
                truth.clone()
            } else {
                truncated.utilities().row(a).to_vec()
            }
        })
        .collect();
    let derived = match Matrix::new(rows).and_then(Instance::new) {
        Ok(inst) => inst,
        Err(Error::UnvaluedItem { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let horizon = j + 1;
    let sincere = expected_own_utility(mech, &derived, agent, &truth, horizon, limits)?;
    let deviant = expected_own_utility(mech, &derived, agent, &deviation, horizon, limits)?;
    if deviant <= sincere {
        return Ok(None);
    }
    Ok(Some((
        derived,
        Deviation {
            agent,
            misreport: Misreport::Row(deviation),
            horizon,
            sincere,
            deviant,
        },
    )))
}

/// Where an SP violation came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationSource {
    /// Grid search on suite instance `index`.
    Grid { index: usize },
    /// Built from a probe failure on suite instance `index`.
    Constructed { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub source: ViolationSource,
    pub instance: Instance,
    pub deviation: Deviation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub step: bool,
    pub memoryless: bool,
    pub step_failure: Option<(usize, ProbeFailure)>,
    pub memoryless_failure: Option<(usize, ProbeFailure)>,
    pub violation: Option<Violation>,
    /// Both probes pass exactly when no violation was found.
    pub sp_consistent: bool,
}

/// Runs both probes everywhere on `suite`, then looks for a strategy-proofness
/// violation: constructed from a probe failure when there is one, otherwise
/// by grid search on every instance.
pub fn classify<M: Mechanism + ?Sized>(
    mech: &M,
    suite: &[Instance],
    extra: &[Rational],
    limits: &Limits,
) -> Result<Classification> {
    let mut step_failure = None;
    let mut memoryless_failure = None;
    for (index, instance) in suite.iter().enumerate() {
        let grid = BidGrid::for_instance(instance, extra);
        for agent in 0..instance.agents() {
            for item in 0..instance.items() {
                if step_failure.is_none() {
                    if let Some(f) = step_probe_witness(mech, instance, agent, item, &grid, limits)?
                    {
                        step_failure = Some((index, f));
                    }
                }
                if memoryless_failure.is_none() {
                    if let Some(f) =
                        memoryless_probe_witness(mech, instance, agent, item, &grid, limits)?
                    {
                        memoryless_failure = Some((index, f));
                    }
                }
            }
        }
    }

    let mut violation = None;
    for (index, f) in step_failure.iter().chain(memoryless_failure.iter()) {
        if let Some((instance, deviation)) = construct_deviation(mech, &suite[*index], f, limits)? {
            violation = Some(Violation {
                source: ViolationSource::Constructed { index: *index },
                instance,
                deviation,
            });
            break;
        }
    }
    if violation.is_none() {
        for (index, instance) in suite.iter().enumerate() {
            let grid = BidGrid::for_instance(instance, extra);
            if let Some(deviation) = sp_falsify(mech, instance, &grid, limits)? {
                violation = Some(Violation {
                    source: ViolationSource::Grid { index },
                    instance: instance.clone(),
                    deviation,
                });
                break;
            }
        }
    }
    let step = step_failure.is_none();
    let memoryless = memoryless_failure.is_none();
    Ok(Classification {
        step,
        memoryless,
        sp_consistent: (step && memoryless) == violation.is_none(),
        step_failure,
        memoryless_failure,
        violation,
    })
}
