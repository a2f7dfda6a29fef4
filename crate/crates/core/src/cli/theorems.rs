//! Scripted checks of the characterization and impossibility results.

use std::collections::HashSet;
use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::axioms::{self, efa_forced_marginals};
use crate::error::Result;
use crate::instances::{
    default_example2_probability, default_example4_epsilon, example2_mechanism, example4_mechanism,
    exhaustive, expand_suite, paper_example, paper_suite, small_suite_manifest, Domain, DomainSpec,
    SuiteEntry,
};
use crate::mechanisms::{run_sincere, Mechanism, MechanismKind};
use crate::model::{
    expected_utilities, int, marginals, ratio, render, Allocation, AllocationDistribution,
    BidProfile, Instance, Limits, PriorityOrder,
};
use crate::oracle::{is_pea, pareto_frontier};
use crate::strategic::{classify, osp_falsify, BidGrid};

/// Mechanisms the biconditionals are tested against.
pub const CANDIDATES: [&str; 9] = [
    "osd",
    "osd-reverse",
    "orp",
    "pareto-like",
    "like",
    "balanced-like",
    "maximum-like",
    "example2",
    "example4",
];

/// `(step, memoryless)` for the six built-in mechanisms.
pub const CLASSIFICATION: [(&str, bool, bool); 6] = [
    ("osd", true, true),
    ("orp", true, true),
    ("like", true, true),
    ("balanced-like", true, false),
    ("maximum-like", false, true),
    ("pareto-like", false, false),
];

/// A candidate built for the number of agents in each profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate(pub &'static str);

impl Candidate {
    fn build(&self, agents: usize) -> Result<Box<dyn Mechanism>> {
        Ok(match self.0 {
            "osd" => Box::new(MechanismKind::Osd(PriorityOrder::identity(agents))),
            "osd-reverse" => Box::new(MechanismKind::Osd(PriorityOrder::new(
                (0..agents).rev().collect(),
            )?)),
            "example2" => Box::new(example2_mechanism(&default_example2_probability())?),
            "example4" => Box::new(example4_mechanism(&default_example4_epsilon())?),
            other => Box::new(MechanismKind::parse(other, None)?),
        })
    }
}

impl Mechanism for Candidate {
    fn name(&self) -> String {
        self.0.to_string()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        self.build(bids.agents())?.run(bids, limits)
    }
}

/// What one candidate does on a suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub mechanism: String,
    pub step: bool,
    pub memoryless: bool,
    /// No strategy-proofness violation found.
    pub sp: bool,
    pub sp_consistent: bool,
    /// No online deviation found.
    pub osp: bool,
    pub efa: bool,
    pub efa_non_zero: bool,
    pub sefa: bool,
    pub pep: bool,
    pub pea: bool,
    pub like_ex_ante: bool,
    pub like_ex_ante_non_zero: bool,
    pub orp_ex_post: bool,
    pub osd_support: bool,
    pub single_osd: bool,
}

fn osd_outcomes(instance: &Instance, limits: &Limits) -> Result<Vec<AllocationDistribution>> {
    PriorityOrder::all(instance.agents())
        .into_iter()
        .map(|s| run_sincere(&MechanismKind::Osd(s), instance, limits))
        .collect()
}

pub fn profile(cand: Candidate, suite: &[Instance], limits: &Limits) -> Result<Profile> {
    let class = classify(&cand, suite, &[], limits)?;
    let mut osp = true;
    for inst in suite {
        if osp_falsify(&cand, inst, &BidGrid::for_instance(inst, &[]), limits)?.is_some() {
            osp = false;
            break;
        }
    }
    let mut p = Profile {
        mechanism: cand.0.to_string(),
        step: class.step,
        memoryless: class.memoryless,
        sp: class.violation.is_none(),
        sp_consistent: class.sp_consistent,
        osp,
        efa: true,
        efa_non_zero: true,
        sefa: true,
        pep: true,
        pea: true,
        like_ex_ante: true,
        like_ex_ante_non_zero: true,
        orp_ex_post: true,
        osd_support: true,
        single_osd: true,
    };
    let mut sigma_ok: Vec<(usize, Vec<bool>)> = Vec::new();
    for inst in suite {
        let dist = run_sincere(&cand, inst, limits)?;
        let like = run_sincere(&MechanismKind::Like, inst, limits)?;
        let orp = run_sincere(&MechanismKind::Orp, inst, limits)?;
        let osds = osd_outcomes(inst, limits)?;
        let non_zero = inst.utilities().all_positive();
        let efa = axioms::check_efa(&dist, inst)?.holds;
        let same = marginals(&dist) == marginals(&like);
        p.efa &= efa;
        p.sefa &= axioms::check_sefa(&dist, inst)?.holds;
        p.pep &= axioms::check_pep(&dist, inst, limits)?.holds;
        p.pea &= axioms::check_pea(&dist, inst, limits)?.holds;
        p.like_ex_ante &= same;
        if non_zero {
            p.efa_non_zero &= efa;
            p.like_ex_ante_non_zero &= same;
        }
        p.orp_ex_post &= dist == orp;
        let outcomes: HashSet<&Allocation> = osds.iter().flat_map(|d| d.support()).collect();
        p.osd_support &= dist.support().all(|a| outcomes.contains(a));
        let n = inst.agents();
        let flags: Vec<bool> = osds.iter().map(|d| *d == dist).collect();
        match sigma_ok.iter_mut().find(|(k, _)| *k == n) {
            Some((_, ok)) => ok.iter_mut().zip(flags).for_each(|(o, f)| *o &= f),
            None => sigma_ok.push((n, flags)),
        }
    }
    p.single_osd = sigma_ok.iter().all(|(_, ok)| ok.iter().any(|&f| f));
    Ok(p)
}

/// Support of ParetoLike equals the oracle's Pareto frontier.
pub fn pareto_like_matches_frontier(instance: &Instance, limits: &Limits) -> Result<bool> {
    let dist = run_sincere(&MechanismKind::ParetoLike, instance, limits)?;
    let support: HashSet<&Allocation> = dist.support().collect();
    let frontier = pareto_frontier(instance.utilities(), limits)?;
    Ok(support.len() == frontier.len() && frontier.iter().all(|a| support.contains(a)))
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TheoremCheck {
    pub name: String,
    pub claim: String,
    pub pass: bool,
    pub trials: usize,
    pub details: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TheoremReport {
    pub suite_instances: usize,
    pub profiles: Vec<Profile>,
    pub checks: Vec<TheoremCheck>,
    pub passed: usize,
    pub failed: usize,
    pub exit_code: i32,
}

impl TheoremReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("suite: {} instances\n", self.suite_instances);
        for c in &self.checks {
            out += &format!(
                "{} {}: {} ({} trials)\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.claim,
                c.trials
            );
            for d in &c.details {
                out += &format!("    {d}\n");
            }
        }
        out += &format!("{} passed, {} failed\n", self.passed, self.failed);
        out
    }
}

/// Default suite for the biconditionals: the small desk suite plus the
/// worked examples.
pub fn theorem_suite() -> Result<Vec<Instance>> {
    let mut suite: Vec<Instance> = paper_suite().into_iter().map(|s| s.instance).collect();
    suite.extend(
        expand_suite(&small_suite_manifest())?
            .into_iter()
            .map(|s| s.instance),
    );
    Ok(suite)
}

/// Exhaustive and generated instances for the frontier check.
pub fn frontier_suite() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (n, m, values) in [
        (2, 2, &[0, 1, 2, 3][..]),
        (2, 3, &[0, 1, 2, 3][..]),
        (2, 4, &[0, 1, 2, 3][..]),
        (3, 2, &[0, 1, 2, 3][..]),
        (3, 3, &[0, 1, 2, 3][..]),
        (3, 4, &[0, 1][..]),
    ] {
        out.extend(exhaustive(n, m, values));
    }
    let rational = [SuiteEntry {
        spec: DomainSpec::new(Domain::General, 3, 4, 7000).with_values(2, 6),
        count: 100,
    }];
    out.extend(expand_suite(&rational)?.into_iter().map(|s| s.instance));
    Ok(out)
}

struct Timer(Option<Instant>);

impl Timer {
    fn ms(&self) -> Option<u64> {
        self.0.map(|t| t.elapsed().as_millis() as u64)
    }
}

fn biconditional(
    profiles: &[Profile],
    left: impl Fn(&Profile) -> bool,
    right: impl Fn(&Profile) -> bool,
) -> (bool, Vec<String>) {
    let details: Vec<String> = profiles
        .iter()
        .map(|p| format!("{}: {} <=> {}", p.mechanism, left(p), right(p)))
        .collect();
    (profiles.iter().all(|p| left(p) == right(p)), details)
}

pub fn run_checks(limits: &Limits, timings: bool) -> Result<TheoremReport> {
    let timer = || Timer(timings.then(Instant::now));
    let suite = theorem_suite()?;
    let mut checks = Vec::new();
    let mut push =
        |name: &str, claim: &str, pass: bool, trials: usize, details: Vec<String>, t: Timer| {
            checks.push(TheoremCheck {
                name: name.into(),
                claim: claim.into(),
                pass,
                trials,
                details,
                runtime_ms: t.ms(),
            })
        };

    let t = timer();
    let profiles = CANDIDATES
        .iter()
        .map(|&c| profile(Candidate(c), &suite, limits))
        .collect::<Result<Vec<_>>>()?;
    let mut details = Vec::new();
    let mut pass = profiles.iter().all(|p| p.sp_consistent);
    for (name, step, memoryless) in CLASSIFICATION {
        let p = profiles
            .iter()
            .find(|p| p.mechanism == name)
            .expect("candidate");
        pass &= p.step == step && p.memoryless == memoryless;
        details.push(format!(
            "{name}: step {} memoryless {} sp {}",
            p.step, p.memoryless, p.sp
        ));
    }
    push(
        "sp-iff-memoryless-step",
        "strategy-proof exactly when memoryless and step",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.step, |p| p.osp);
    push(
        "osp-iff-step",
        "online strategy-proof exactly when step",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.sp && p.efa, |p| p.like_ex_ante);
    push(
        "sp-efa-iff-like",
        "strategy-proof and EFA exactly when ex ante equivalent to Like",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let non_zero = suite
        .iter()
        .filter(|i| i.utilities().all_positive())
        .count();
    let (pass, details) = biconditional(&profiles, |p| p.efa_non_zero, |p| p.like_ex_ante_non_zero);
    push(
        "efa-non-zero-iff-like",
        "with non-zero utilities, EFA exactly when ex ante equivalent to Like",
        pass,
        non_zero,
        details,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.sefa, |p| p.like_ex_ante);
    push(
        "sefa-iff-like",
        "SEFA exactly when ex ante equivalent to Like",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, trials, details) = balanced_support_befp(limits)?;
    push(
        "balanced-like-support-befp",
        "with 0/1 utilities, support inside Balanced Like's implies BEFP",
        pass,
        trials,
        details,
        t,
    );

    let t = timer();
    let frontier = frontier_suite()?;
    let mut bad = Vec::new();
    for inst in &frontier {
        if !pareto_like_matches_frontier(inst, limits)? {
            bad.push(inst.utilities().to_string());
            break;
        }
    }
    push(
        "pareto-like-is-the-frontier",
        "Pareto Like returns only and all ex post efficient allocations",
        bad.is_empty(),
        frontier.len(),
        bad,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.sp && p.pep, |p| p.osd_support);
    push(
        "sp-pep-iff-osd-mixture",
        "strategy-proof and PEP exactly when ex post a distribution over OSDs",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.sp && p.pep && p.efa, |p| p.orp_ex_post);
    push(
        "sp-pep-efa-iff-orp",
        "strategy-proof, PEP and EFA exactly when ex post equivalent to ORP",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, details) = biconditional(&profiles, |p| p.sp && p.pep && p.pea, |p| p.single_osd);
    push(
        "sp-pep-pea-iff-osd",
        "strategy-proof, PEP and PEA exactly when ex post equivalent to one OSD",
        pass,
        suite.len(),
        details,
        t,
    );

    let t = timer();
    let (pass, details) = efa_pea_impossible(limits)?;
    push(
        "no-efa-pea-mechanism",
        "no mechanism is both EFA and PEA",
        pass,
        1,
        details,
        t,
    );

    let t = timer();
    let (pass, details) = example4_check(limits)?;
    push(
        "example4-outcome",
        "the example 4 mechanism gives (3-2eps, eps) and is not PEP",
        pass,
        1,
        details,
        t,
    );

    let t = timer();
    let (pass, trials, details) = pea_implies_pep(&suite, limits)?;
    push(
        "pea-implies-pep",
        "every PEA outcome is PEP",
        pass,
        trials,
        details,
        t,
    );

    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    Ok(TheoremReport {
        suite_instances: suite.len(),
        profiles,
        checks,
        passed,
        failed,
        exit_code: if failed == 0 { 0 } else { 1 },
    })
}

fn balanced_support_befp(limits: &Limits) -> Result<(bool, usize, Vec<String>)> {
    let instances: Vec<Instance> = (2..=3)
        .flat_map(|n| (1..=4).flat_map(move |m| exhaustive(n, m, &[0, 1])))
        .collect();
    let mut pass = true;
    let mut details = Vec::new();
    let mut covered = vec![0usize; CANDIDATES.len()];
    for inst in &instances {
        let balanced = run_sincere(&MechanismKind::BalancedLike, inst, limits)?;
        let allowed: HashSet<&Allocation> = balanced.support().collect();
        for (k, &c) in CANDIDATES.iter().enumerate() {
            let dist = run_sincere(&Candidate(c), inst, limits)?;
            if dist.support().all(|a| allowed.contains(a)) {
                covered[k] += 1;
                if !axioms::check_befp(&dist, inst)?.holds {
                    pass = false;
                    details.push(format!("{c} violates BEFP on {}", inst.utilities()));
                }
            }
        }
    }
    for (c, n) in CANDIDATES.iter().zip(covered) {
        details.push(format!("{c}: support inside on {n} instances"));
    }
    Ok((pass, instances.len(), details))
}

fn efa_pea_impossible(limits: &Limits) -> Result<(bool, Vec<String>)> {
    let inst = paper_example(1)?.instance;
    let mut details = Vec::new();
    let Some(forced) = efa_forced_marginals(&inst)? else {
        return Ok((false, vec!["marginals are not forced".into()]));
    };
    let half = ratio(1, 2);
    let all_half = forced.rows().iter().flatten().all(|p| *p == half);
    let ubar = expected_utilities(&forced, inst.utilities())?.diagonal();
    details.push(format!(
        "forced marginals all 1/2: {all_half}; expected utilities ({})",
        ubar.iter().map(render).collect::<Vec<_>>().join(", ")
    ));
    let outcome = is_pea(&ubar, inst.utilities(), limits)?;
    details.push(format!(
        "PEA: {}; dominating lottery gains {} at ({})",
        outcome.efficient,
        render(&outcome.solution.objective),
        outcome
            .solution
            .utilities
            .iter()
            .map(render)
            .collect::<Vec<_>>()
            .join(", ")
    ));
    let mut none_both = true;
    for &c in &CANDIDATES {
        let dist = run_sincere(&Candidate(c), &inst, limits)?;
        let efa = efa_on_every_prefix(&dist, &inst)?;
        let pea = axioms::check_pea(&dist, &inst, limits)?.holds;
        none_both &= !(efa && pea);
    }
    details.push(format!(
        "no candidate is EFA on every prefix and PEA: {none_both}"
    ));
    let pass = all_half
        && ubar == vec![ratio(3, 2), ratio(3, 2)]
        && !outcome.efficient
        && outcome.solution.objective > Zero::zero()
        && none_both;
    Ok((pass, details))
}

fn example4_check(limits: &Limits) -> Result<(bool, Vec<String>)> {
    let ex = paper_example(4)?;
    let mech = ex.mechanism.expect("example 4 mechanism");
    let dist = run_sincere(&mech, &ex.instance, limits)?;
    let pea = axioms::check_pea(&dist, &ex.instance, limits)?;
    let pep = axioms::check_pep(&dist, &ex.instance, limits)?.holds;
    let eps = default_example4_epsilon();
    let ubar = expected_utilities(&marginals(&dist), ex.instance.utilities())?.diagonal();
    let stated = ubar == vec![int(3) - int(2) * eps.clone(), eps.clone()];
    let mut details = vec![format!(
        "eps {}: expected utilities ({}), PEP {pep}, PEA {}",
        render(&eps),
        ubar.iter().map(render).collect::<Vec<_>>().join(", "),
        pea.holds
    )];
    if let Some(axioms::Witness::Lottery(lp)) = &pea.witness {
        details.push(format!(
            "dominated by a lottery reaching ({})",
            lp.utilities
                .iter()
                .map(render)
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    Ok((stated && !pep, details))
}

/// PEA never holds without PEP: replacing a dominated support allocation by
/// its dominator raises the expected utility vector.
fn pea_implies_pep(suite: &[Instance], limits: &Limits) -> Result<(bool, usize, Vec<String>)> {
    let mut details = Vec::new();
    let mut trials = 0;
    let ex4 = paper_example(4)?;
    let mech = ex4.mechanism.expect("example 4 mechanism");
    let mut cases: Vec<(String, AllocationDistribution, &Instance)> = vec![(
        "example4".into(),
        run_sincere(&mech, &ex4.instance, limits)?,
        &ex4.instance,
    )];
    for inst in suite {
        for &c in &CANDIDATES {
            cases.push((
                c.to_string(),
                run_sincere(&Candidate(c), inst, limits)?,
                inst,
            ));
        }
    }
    for (name, dist, inst) in &cases {
        trials += 1;
        let pea = axioms::check_pea(dist, inst, limits)?.holds;
        if pea && !axioms::check_pep(dist, inst, limits)?.holds {
            details.push(format!("{name} is PEA but not PEP on {}", inst.utilities()));
        }
    }
    Ok((details.is_empty(), trials, details))
}

/// EFA on every item prefix, the online reading of envy-freeness ex ante.
pub fn efa_on_every_prefix(dist: &AllocationDistribution, instance: &Instance) -> Result<bool> {
    for j in 1..=instance.items() {
        if !axioms::check_efa(&dist.prefix(j), &instance.prefix(j))?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_build_for_any_size() {
        for c in CANDIDATES {
            for n in 1..=3 {
                Candidate(c).build(n).unwrap();
            }
        }
    }

    #[test]
    fn impossibility_and_example4() {
        let limits = Limits::default();
        assert!(efa_pea_impossible(&limits).unwrap().0);
        assert!(example4_check(&limits).unwrap().0);
    }
}
