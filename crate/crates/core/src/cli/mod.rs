//! The `fairdiv` command line.
//!
//! Exit codes: 0 all verdicts as expected, 1 mismatch or violation found,
//! 2 inconclusive (work bound hit, witness not found, dead end), 3 usage or
//! input error.

pub mod report;
pub mod table;
pub mod theorems;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::axioms::{self, Axiom};
use crate::error::{Error, Result};
use crate::instances::{
    default_example2_probability, default_example4_epsilon, example2_mechanism, example4_mechanism,
    expand_suite, paper_example, parse_bids, parse_instance, parse_manifest, serialize_instance,
    small_suite_manifest, Domain, DomainSpec, SuiteEntry, SuiteInstance,
};
use crate::mechanisms::{allocate_with, pareto_like_prefix_rule, Mechanism, MechanismKind};
use crate::model::{
    marginals, parse_rational, render, AllocationDistribution, BidProfile, Instance, Limits,
    Rational,
};
use crate::strategic::{osp_falsify, sp_falsify, BidGrid};
use report::{
    matrix, CheckReport, DeviationJson, DistributionReport, ExampleJson, FalsifyReport,
    FoundDeviation, GeneratedInstance, InstanceVerdict, VerdictJson,
};

/// Largest agent count ORP is computed for.
pub const ORP_MAX_AGENTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Exact online fair division mechanisms and checkers"
)]
pub struct Cli {
    /// Work bound on enumerated allocations, LP columns and search nodes.
    #[arg(long, global = true, env = "FAIRDIV_MAX_NODES", default_value_t = Limits::DEFAULT_MAX_NODES)]
    pub max_nodes: u64,
    #[arg(long, global = true, default_value_t = 4)]
    pub max_agents: usize,
    #[arg(long, global = true, default_value_t = 6)]
    pub max_items: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a mechanism and print its distribution over allocations.
    Run {
        mechanism: String,
        /// Instance file or `example1`..`example4`.
        instance: String,
        /// Bid matrix file; sincere bids when omitted.
        #[arg(long)]
        bids: Option<String>,
        /// Priority order for `osd`, e.g. `2,1`.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Check an axiom on an instance or every instance of a suite.
    Check {
        axiom: String,
        mechanism: String,
        /// Instance file, manifest file, `example1`..`example4` or `small-suite`.
        target: String,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Search the bid grid for a profitable misreport.
    Falsify {
        #[arg(value_enum)]
        property: Manipulation,
        mechanism: String,
        target: String,
        #[arg(long)]
        sigma: Option<String>,
        /// Extra bids added to every grid, e.g. `1/3,5`.
        #[arg(long, value_delimiter = ',')]
        grid_extra: Vec<String>,
    },
    /// Reproduce the axiom table over three domain blocks.
    Table {
        /// Manifest file; identical-cardinal lines feed the identical
        /// block, binary lines the binary block, all others the general one.
        #[arg(long)]
        suite: Option<String>,
        /// Generated instances per block for the default suite.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Include per-cell runtimes (the report is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run the scripted characterization and impossibility checks.
    Theorems {
        #[arg(long)]
        timings: bool,
    },
    /// Generate random instances of a domain.
    Gen {
        domain: String,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        items: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        bound: u32,
        #[arg(long, default_value_t = 6)]
        denominator: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Print the worked examples.
    Examples { id: Option<u8> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Manipulation {
    Sp,
    Osp,
}

/// Runs the CLI on `args` (including the program name), writing the report
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::WorkBound { .. } | Error::EmptyFeasibleSet { .. } => 2,
        _ => 3,
    }
}

struct Ctx {
    limits: Limits,
    max_agents: usize,
    max_items: usize,
    format: Format,
}

impl Ctx {
    fn admit(&self, instance: &Instance) -> Result<()> {
        let check = |what: &str, have: usize, limit: usize| {
            if have > limit {
                Err(Error::WorkBound {
                    what: what.into(),
                    needed: have as u128,
                    limit: limit as u64,
                })
            } else {
                Ok(())
            }
        };
        check("agents (--max-agents)", instance.agents(), self.max_agents)?;
        check("items (--max-items)", instance.items(), self.max_items)
    }

    fn emit<T: Serialize>(
        &self,
        out: &mut dyn Write,
        value: &T,
        text: impl FnOnce() -> String,
    ) -> Result<()> {
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, value)
                    .map_err(|e| Error::Io(e.to_string()))?;
                writeln!(out)?;
            }
            Format::Text => write!(out, "{}", text())?,
        }
        Ok(())
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let ctx = Ctx {
        limits: Limits::new(cli.max_nodes),
        max_agents: cli.max_agents,
        max_items: cli.max_items,
        format: cli.format,
    };
    match &cli.command {
        Command::Run {
            mechanism,
            instance,
            bids,
            sigma,
        } => cmd_run(
            &ctx,
            out,
            mechanism,
            instance,
            bids.as_deref(),
            sigma.as_deref(),
        ),
        Command::Check {
            axiom,
            mechanism,
            target,
            sigma,
        } => cmd_check(&ctx, out, axiom, mechanism, target, sigma.as_deref()),
        Command::Falsify {
            property,
            mechanism,
            target,
            sigma,
            grid_extra,
        } => {
            let extra = grid_extra
                .iter()
                .map(|s| parse_rational(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            cmd_falsify(
                &ctx,
                out,
                *property,
                mechanism,
                target,
                sigma.as_deref(),
                &extra,
            )
        }
        Command::Table {
            suite,
            trials,
            seed,
            timings,
        } => {
            let entries = match suite {
                Some(path) => parse_manifest(&read(path)?)?,
                None => table::table_manifest(*trials, *seed),
            };
            cmd_table(&ctx, out, &entries, *timings)
        }
        Command::Theorems { timings } => {
            let report = theorems::run_checks(&ctx.limits, *timings)?;
            ctx.emit(out, &report, || report.to_text())?;
            Ok(report.exit_code)
        }
        Command::Gen {
            domain,
            agents,
            items,
            seed,
            bound,
            denominator,
            count,
        } => {
            let domain: Domain = domain.parse()?;
            let entry = SuiteEntry {
                spec: DomainSpec::new(domain, *agents, *items, *seed)
                    .with_values(*bound, *denominator),
                count: *count,
            };
            let generated = expand_suite(&[entry])?;
            let json: Vec<GeneratedInstance> = generated
                .iter()
                .map(|s| GeneratedInstance {
                    label: s.label.clone(),
                    utilities: matrix(s.instance.utilities()),
                })
                .collect();
            ctx.emit(out, &json, || {
                generated
                    .iter()
                    .map(|s| format!("# {}\n{}", s.label, serialize_instance(&s.instance)))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            Ok(0)
        }
        Command::Examples { id } => cmd_examples(&ctx, out, *id),
    }
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// Whether a file's first meaningful token names a domain, which marks a
/// suite manifest rather than an instance.
fn is_manifest(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .is_some_and(|t| t.parse::<Domain>().is_ok())
}

/// Instances named by a target token.
pub fn resolve_target(target: &str) -> Result<Vec<SuiteInstance>> {
    if let Some(id) = target
        .strip_prefix("example")
        .and_then(|s| s.parse::<u8>().ok())
    {
        return Ok(vec![SuiteInstance {
            label: target.to_string(),
            domain: Domain::General,
            instance: paper_example(id)?.instance,
        }]);
    }
    if target == "small-suite" {
        return expand_suite(&small_suite_manifest());
    }
    let text = read(target)?;
    if is_manifest(&text) {
        expand_suite(&parse_manifest(&text)?)
    } else {
        Ok(vec![SuiteInstance {
            label: target.to_string(),
            domain: Domain::General,
            instance: parse_instance(&text)?,
        }])
    }
}

/// The literal prefix form of Pareto Like, which can dead-end.
#[derive(Debug, Clone, Copy)]
pub struct ParetoLikePrefix;

impl Mechanism for ParetoLikePrefix {
    fn name(&self) -> String {
        "pareto-like-prefix".into()
    }

    fn run(&self, bids: &BidProfile, limits: &Limits) -> Result<AllocationDistribution> {
        allocate_with(&pareto_like_prefix_rule(), bids, limits)
    }
}

/// Built-in mechanisms plus `example2`, `example4` (the constructed
/// counterexample mechanisms) and `pareto-like-prefix`.
pub fn resolve_mechanism(name: &str, sigma: Option<&str>) -> Result<Box<dyn Mechanism>> {
    Ok(match name {
        "example2" => Box::new(example2_mechanism(&default_example2_probability())?),
        "example4" => Box::new(example4_mechanism(&default_example4_epsilon())?),
        "pareto-like-prefix" => Box::new(ParetoLikePrefix),
        other => Box::new(MechanismKind::parse(other, sigma)?),
    })
}

fn admit_mechanism(name: &str, instance: &Instance) -> Result<()> {
    if name == "orp" && instance.agents() > ORP_MAX_AGENTS {
        return Err(Error::WorkBound {
            what: "orp agents".into(),
            needed: instance.agents() as u128,
            limit: ORP_MAX_AGENTS as u64,
        });
    }
    Ok(())
}

fn distribution_text(report: &DistributionReport) -> String {
    let mut out = format!(
        "{} ({} agents, {} items)\n",
        report.mechanism, report.agents, report.items
    );
    for entry in &report.support {
        out += &format!("  {:<8} {}\n", entry.probability, entry.allocation.bundles);
    }
    out += "assignment\n";
    for (i, row) in report.assignment.iter().enumerate() {
        out += &format!("  agent {}: {}\n", i + 1, row.join(" "));
    }
    out
}

fn cmd_run(
    ctx: &Ctx,
    out: &mut dyn Write,
    mechanism: &str,
    target: &str,
    bids: Option<&str>,
    sigma: Option<&str>,
) -> Result<i32> {
    let mut instances = resolve_target(target)?;
    if instances.len() != 1 {
        return Err(Error::Unsatisfiable(format!(
            "`run` takes one instance, {target} has {}",
            instances.len()
        )));
    }
    let instance = instances.remove(0).instance;
    ctx.admit(&instance)?;
    admit_mechanism(mechanism, &instance)?;
    let mech = resolve_mechanism(mechanism, sigma)?;
    let profile = match bids {
        Some(path) => parse_bids(&read(path)?, &instance)?,
        None => instance.sincere_bids(),
    };
    let dist = mech.run(&profile, &ctx.limits)?;
    let report = DistributionReport::new(mech.name(), &dist, &instance);
    ctx.emit(out, &report, || distribution_text(&report))?;
    Ok(0)
}

fn cmd_check(
    ctx: &Ctx,
    out: &mut dyn Write,
    axiom: &str,
    mechanism: &str,
    target: &str,
    sigma: Option<&str>,
) -> Result<i32> {
    let axiom: Axiom = axiom.parse()?;
    let mech = resolve_mechanism(mechanism, sigma)?;
    let mut instances = Vec::new();
    for s in resolve_target(target)? {
        ctx.admit(&s.instance)?;
        admit_mechanism(mechanism, &s.instance)?;
        let dist = mech.run(&s.instance.sincere_bids(), &ctx.limits)?;
        let verdict = axioms::check(axiom, &dist, &s.instance, &ctx.limits)?;
        instances.push(InstanceVerdict {
            label: s.label,
            utilities: matrix(s.instance.utilities()),
            verdict: VerdictJson::new(&verdict, s.instance.agents()),
        });
    }
    let holds = instances.iter().all(|v| v.verdict.holds);
    let report = CheckReport {
        axiom: axiom.to_string(),
        mechanism: mech.name(),
        holds,
        instances,
    };
    ctx.emit(out, &report, || {
        let mut text = String::new();
        for v in &report.instances {
            text += &format!(
                "{}: {} {}",
                v.label,
                report.axiom,
                if v.verdict.holds { "holds" } else { "fails" }
            );
            if !v.verdict.holds {
                text += &format!(" (margin {})", v.verdict.margin);
                if let Some(w) = &v.verdict.witness {
                    text += &format!(" witness {}", serde_json::to_string(w).unwrap_or_default());
                }
            }
            text += "\n";
        }
        text += &format!(
            "{} {} on {} instance(s): {}\n",
            report.mechanism,
            report.axiom,
            report.instances.len(),
            if holds { "holds" } else { "fails" }
        );
        text
    })?;
    Ok(if holds { 0 } else { 1 })
}

fn cmd_falsify(
    ctx: &Ctx,
    out: &mut dyn Write,
    property: Manipulation,
    mechanism: &str,
    target: &str,
    sigma: Option<&str>,
    extra: &[Rational],
) -> Result<i32> {
    let mech = resolve_mechanism(mechanism, sigma)?;
    let suite = resolve_target(target)?;
    let mut found = None;
    for s in &suite {
        ctx.admit(&s.instance)?;
        admit_mechanism(mechanism, &s.instance)?;
        let grid = BidGrid::for_instance(&s.instance, extra);
        let dev = match property {
            Manipulation::Sp => sp_falsify(&mech, &s.instance, &grid, &ctx.limits)?,
            Manipulation::Osp => osp_falsify(&mech, &s.instance, &grid, &ctx.limits)?,
        };
        if let Some(dev) = dev {
            found = Some(FoundDeviation {
                label: s.label.clone(),
                utilities: matrix(s.instance.utilities()),
                deviation: DeviationJson::new(&dev, &s.instance),
            });
            break;
        }
    }
    let report = FalsifyReport {
        property: match property {
            Manipulation::Sp => "sp",
            Manipulation::Osp => "osp",
        }
        .into(),
        mechanism: mech.name(),
        instances_searched: suite.len(),
        verdict: if found.is_some() {
            "violation found"
        } else {
            "none in grid"
        }
        .into(),
        deviation: found,
    };
    ctx.emit(out, &report, || match &report.deviation {
        Some(f) => {
            let d = &f.deviation;
            let scope = match d.item {
                Some(item) => format!("changing only the bid on item {item}"),
                None => "misreporting".into(),
            };
            format!(
                "{}: agent {} gains by {scope}: bids ({}) give {} over items 1..{} instead of {}\n",
                f.label,
                d.agent,
                d.bids.join(", "),
                d.deviant,
                d.horizon,
                d.sincere
            )
        }
        None => format!("none in grid ({} instances)\n", report.instances_searched),
    })?;
    Ok(if report.deviation.is_some() { 1 } else { 0 })
}

fn cmd_table(ctx: &Ctx, out: &mut dyn Write, entries: &[SuiteEntry], timings: bool) -> Result<i32> {
    let suites = table::block_suites(entries)?;
    for (block, suite) in &suites {
        if suite.is_empty() {
            return Err(Error::Unsatisfiable(format!(
                "the suite has no {block} instances"
            )));
        }
        for s in suite {
            ctx.admit(&s.instance)?;
        }
    }
    let report = table::reproduce(&suites, &ctx.limits, timings)?;
    ctx.emit(out, &report, || report.to_text())?;
    Ok(report.exit_code)
}

fn cmd_examples(ctx: &Ctx, out: &mut dyn Write, id: Option<u8>) -> Result<i32> {
    let ids: Vec<u8> = match id {
        Some(id) => vec![id],
        None => (1..=4).collect(),
    };
    let mut json = Vec::new();
    for id in ids {
        let ex = paper_example(id)?;
        json.push(ExampleJson {
            id,
            utilities: matrix(ex.instance.utilities()),
            mechanism: ex.mechanism.as_ref().map(|m| m.name()),
        });
    }
    ctx.emit(out, &json, || {
        json.iter()
            .map(|e| {
                let ex = paper_example(e.id).expect("listed example");
                let mut text = format!("# example{}\n{}", e.id, serialize_instance(&ex.instance));
                if let Some(m) = &ex.mechanism {
                    let dist = m
                        .run(&ex.instance.sincere_bids(), &ctx.limits)
                        .expect("example mechanisms run on their instance");
                    text += &format!("# mechanism {}\n", m.name());
                    for (a, p) in dist.iter() {
                        text +=
                            &format!("#   {:<6} {}\n", render(p), a.display(ex.instance.agents()));
                    }
                    let p = marginals(&dist);
                    for (i, row) in p.rows().iter().enumerate() {
                        text += &format!(
                            "#   agent {}: {}\n",
                            i + 1,
                            row.iter().map(render).collect::<Vec<_>>().join(" ")
                        );
                    }
                }
                text
            })
            .collect::<Vec<_>>()
            .join("\n")
    })?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("fairdiv").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn run_like_example1() {
        let (code, out, _) = run_args(&["run", "like", "example1"]);
        assert_eq!(code, 0);
        assert_eq!(out.matches("1/4").count(), 4, "{out}");
    }

    #[test]
    fn usage_errors_exit_three() {
        assert_eq!(run_args(&["run"]).0, 3);
        assert_eq!(run_args(&["run", "nope", "example1"]).0, 3);
        assert_eq!(run_args(&["run", "osd", "example1"]).0, 3);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn check_exit_codes() {
        assert_eq!(run_args(&["check", "efa", "orp", "example1"]).0, 0);
        assert_eq!(run_args(&["check", "pea", "orp", "example1"]).0, 1);
    }

    #[test]
    fn work_bound_exits_two() {
        let (code, _, err) = run_args(&["--max-nodes", "2", "check", "pep", "like", "example1"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn falsify_maximum_like() {
        let (code, out, _) = run_args(&["falsify", "sp", "maximum-like", "example1"]);
        assert_eq!(code, 1);
        assert!(out.contains("gains"), "{out}");
    }
}
