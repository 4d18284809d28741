//! `pcv` — consistency checks for security policies and workflow
//! definitions over a declared finite domain.
//!
//! Exit codes: 0 all goals consistent, 1 at least one inconsistency,
//! 2 error (bad input, budget exhausted), 3 solver/oracle discrepancy
//! under `--oracle-check`.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pcv_core::engine::{HandlerPack, RuleProgram, DEFAULT_BUDGET};
use pcv_core::goals::{run_goal, GoalSetup};
use pcv_core::kernel::kernel_packs;
use pcv_core::spl::{build_logic_pack, build_trilogic_pack, compile_policy, CompileOptions};
use pcv_core::wpdl::compile_workflow;
use pcv_model::domain::parse_domain;
use pcv_model::spl::parse_spl;
use pcv_model::verdict::{render_stable_report, Assumption, GoalKind, GoalReport, RuleTarget, Verdict};
use pcv_model::wpdl::parse_workflow;
use pcv_model::{DomainSpec, SplPolicyModel, WorkflowModel};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pcv", version, about = "Policy and workflow consistency verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run consistency goals against policies, a domain and optionally a
    /// workflow.
    Check(CheckArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Policy file (.spl); repeatable. Multiple policies combine by
    /// tri-logical conjunction into the master policy.
    #[arg(long = "policy")]
    policies: Vec<PathBuf>,

    /// Workflow file (.wf); required by the wf-consistency goal.
    #[arg(long)]
    workflow: Option<PathBuf>,

    /// Domain file (.dom) declaring the finite universes and set contents.
    #[arg(long)]
    domain: PathBuf,

    /// Goal to run; repeatable: inapplicability | monotonic-deny |
    /// monotonic-allow | redundancy=PATH | wf-consistency.
    #[arg(long = "goal", required = true)]
    goals: Vec<String>,

    /// Behaviour for events no policy applies to.
    #[arg(long = "assume", value_enum, default_value_t = AssumeArg::Close)]
    assume: AssumeArg,

    /// Rule-firing budget per goal.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    #[arg(long, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,

    /// Re-run every goal through the exhaustive oracle and fail on any
    /// disagreement.
    #[arg(long)]
    oracle_check: bool,

    /// Print the composed rule program before running.
    #[arg(long)]
    dump_rules: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AssumeArg {
    Open,
    Close,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Human,
    Structured,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(args) => match check(&args) {
            Ok(code) => code,
            Err(err) => {
                eprintln!("pcv: error: {err:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn parse_goal(s: &str, assume: Assumption) -> Result<GoalKind> {
    Ok(match s {
        "inapplicability" => GoalKind::Inapplicability,
        "monotonic-deny" => GoalKind::MonotonicDenial,
        "monotonic-allow" => GoalKind::MonotonicAcceptance,
        "wf-consistency" => GoalKind::WorkflowConsistency(assume),
        other => match other.strip_prefix("redundancy=") {
            Some(path) => GoalKind::Redundancy(RuleTarget::parse(path).map_err(anyhow::Error::msg)?),
            None => bail!("unknown goal `{other}`"),
        },
    })
}

fn check(args: &CheckArgs) -> Result<ExitCode> {
    let assume = match args.assume {
        AssumeArg::Open => Assumption::Open,
        AssumeArg::Close => Assumption::Close,
    };

    let mut policies: Vec<SplPolicyModel> = Vec::new();
    for path in &args.policies {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        policies.push(parse_spl(&path.display().to_string(), &text)?);
    }
    let domain_text =
        std::fs::read_to_string(&args.domain).with_context(|| format!("reading {}", args.domain.display()))?;
    let domain: DomainSpec = parse_domain(&args.domain.display().to_string(), &domain_text)?;
    let workflow: Option<WorkflowModel> = match &args.workflow {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(parse_workflow(&path.display().to_string(), &text)?)
        }
        None => None,
    };

    let goals: Vec<GoalKind> =
        args.goals.iter().map(|g| parse_goal(g, assume)).collect::<Result<_>>()?;
    for g in &goals {
        if matches!(g, GoalKind::WorkflowConsistency(_)) && workflow.is_none() {
            bail!("goal wf-consistency needs --workflow");
        }
        if !matches!(g, GoalKind::WorkflowConsistency(_)) && policies.is_empty() {
            bail!("goal {g} needs at least one --policy");
        }
    }

    if args.dump_rules {
        print!("{}", dump_program(&policies, workflow.as_ref())?);
    }

    let setup = GoalSetup { policies: &policies, domain: &domain, budget: args.budget };
    let mut reports: Vec<GoalReport> = Vec::new();
    let mut discrepancies: Vec<String> = Vec::new();
    for goal in &goals {
        let report = run_goal(&setup, workflow.as_ref(), goal)?;
        if args.oracle_check && !report.verdict.is_error() {
            let oracle = pcv_oracle::oracle_goal(goal, &policies, workflow.as_ref(), &domain)?;
            if !oracle.same_outcome(&report.verdict) {
                discrepancies.push(format!(
                    "goal {goal}: solver says {}, oracle says {}",
                    verdict_word(&report.verdict),
                    verdict_word(&oracle)
                ));
            }
        }
        reports.push(report);
    }

    match args.format {
        FormatArg::Human => {
            for r in &reports {
                print!("{}", r.human_text());
            }
        }
        FormatArg::Structured => {
            print!("{}", render_stable_report(assume, args.budget, &reports));
        }
    }

    if !discrepancies.is_empty() {
        eprintln!("pcv: solver/oracle discrepancy:");
        for d in &discrepancies {
            eprintln!("  {d}");
        }
        return Ok(ExitCode::from(3));
    }
    if reports.iter().any(|r| r.verdict.is_error()) {
        return Ok(ExitCode::from(2));
    }
    if reports.iter().any(|r| r.verdict.is_inconsistency()) {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::InconsistencyFound { .. } => "inconsistency",
        Verdict::NoInconsistency { .. } => "no-inconsistency",
        Verdict::Error { .. } => "error",
    }
}

fn dump_program(policies: &[SplPolicyModel], workflow: Option<&WorkflowModel>) -> Result<String> {
    let mut packs: Vec<HandlerPack> = kernel_packs();
    packs.push(build_logic_pack());
    packs.push(build_trilogic_pack());
    packs.push(pcv_core::goals::build_open_close_pack());
    packs.push(pcv_core::goals::build_diff_pack());
    packs.push(pcv_core::goals::build_goal_support_pack());
    for p in policies {
        packs.push(compile_policy(p, CompileOptions::default())?.pack);
    }
    if let Some(wf) = workflow {
        packs.push(compile_workflow(wf, &Default::default()).pack);
    }
    let refs: Vec<&HandlerPack> = packs.iter().collect();
    let program = RuleProgram::compose(&refs)?;
    Ok(program.dump())
}
