//! Building and running the inconsistency goals.
//!
//! Self-consistency goals search the declared finite domain for an event
//! witnessing normal behaviour; the inconsistency is the *absence* of a
//! solution, so an unsatisfiable search (exhausted over the domain) is
//! reported as the inconsistency. The workflow cross-consistency goal is
//! the other way around: a satisfiable unrolling is a complete allowed
//! execution, unsatisfiability means the workflow cannot finish under the
//! policy.

use super::packs::{build_diff_pack, build_goal_support_pack, build_open_close_pack};
use crate::engine::dsl as d;
use crate::engine::{
    solve, BodyItem, Constraint, EngineError, FunctorDecl, HandlerPack, RuleProgram, SolveOptions,
    SolveResult, Term, Var, DEFAULT_BUDGET,
};
use crate::kernel::kernel_packs;
use crate::spl::{
    build_logic_pack, build_trilogic_pack, compile_policy, value_term, CompileError,
    CompileOptions, CompiledPolicy,
};
use crate::wpdl::{compile_workflow, WfCompileOptions};
use pcv_model::domain::DomainSpec;
use pcv_model::event::GroundEvent;
use pcv_model::spl::{ParamSort, SplPolicyModel};
use pcv_model::value::Value;
use pcv_model::verdict::{
    Assumption, GoalKind, GoalReport, RuleTarget, RunStats, Search, Verdict, Witness,
};
use pcv_model::wpdl::WorkflowModel;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GoalError {
    #[error("policy `{policy}` needs set `{name}`, which domain `{domain}` does not declare")]
    MissingSet { policy: String, name: String, domain: String },
    #[error("policy `{policy}` needs value `{name}`, which domain `{domain}` does not declare")]
    MissingValue { policy: String, name: String, domain: String },
    #[error("workflow `{workflow}` participant `{name}` has no set in domain `{domain}`")]
    MissingParticipantSet { workflow: String, name: String, domain: String },
    #[error("self-consistency goals need at least one policy")]
    NoPolicies,
    #[error("redundancy target: {0}")]
    BadTarget(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Shared inputs for one goal run.
#[derive(Debug, Clone, Copy)]
pub struct GoalSetup<'a> {
    pub policies: &'a [SplPolicyModel],
    pub domain: &'a DomainSpec,
    pub budget: u64,
}

impl<'a> GoalSetup<'a> {
    pub fn new(policies: &'a [SplPolicyModel], domain: &'a DomainSpec) -> Self {
        GoalSetup { policies, domain, budget: DEFAULT_BUDGET }
    }
}

pub fn event_term(e: &GroundEvent) -> Term {
    Term::compound(
        "event",
        vec![
            value_term(&e.actor),
            value_term(&e.action),
            value_term(&e.target),
            Term::list(e.pars.iter().map(value_term).collect::<Vec<_>>()),
            Term::Int(e.time),
        ],
    )
}

/// Reads a ground event back from a resolved term.
pub fn term_event(t: &Term) -> Option<GroundEvent> {
    let Term::Compound(f, args) = t else { return None };
    if f != "event" || args.len() != 5 {
        return None;
    }
    let value = |t: &Term| -> Option<Value> {
        match t {
            Term::Atom(a) => Some(Value::Atom(a.clone())),
            Term::Str(s) => Some(Value::Str(s.clone())),
            Term::Int(n) => Some(Value::Int(*n)),
            _ => None,
        }
    };
    let mut pars = Vec::new();
    let mut cur = &args[3];
    while let Some((h, tail)) = cur.as_cons() {
        pars.push(value(h)?);
        cur = tail;
    }
    if !cur.is_nil() {
        return None;
    }
    Some(GroundEvent {
        actor: value(&args[0])?,
        action: value(&args[1])?,
        target: value(&args[2])?,
        pars,
        time: args[4].as_int()?,
    })
}

/// The full event universe as a list term, in enumeration order.
pub fn all_events_term(domain: &DomainSpec) -> Term {
    Term::list(domain.enumerate_events().iter().map(event_term).collect::<Vec<_>>())
}

fn set_list(domain: &DomainSpec, name: &str) -> Option<Term> {
    domain.set(name).map(|members| Term::list(members.iter().map(value_term).collect::<Vec<_>>()))
}

/// A compiled policy plus the concrete argument terms the goal passes it.
struct BoundPolicy {
    compiled: CompiledPolicy,
    args_before_r: Vec<Term>, // params…, locals, globals (event comes first)
}

fn bind_policy(model: &SplPolicyModel, domain: &DomainSpec) -> Result<BoundPolicy, GoalError> {
    let nonempty: std::collections::HashSet<String> = domain
        .sets
        .iter()
        .filter(|(_, members)| !members.is_empty())
        .map(|(n, _)| n.clone())
        .collect();
    let opts = CompileOptions { skolemize: true, nonempty_sets: Some(nonempty) };
    let compiled = compile_policy(model, opts)?;
    let missing_set = |name: &str| GoalError::MissingSet {
        policy: model.name.clone(),
        name: name.to_string(),
        domain: domain.name.clone(),
    };
    let mut args = Vec::new();
    for p in &model.params {
        if p.sort == ParamSort::Value {
            let v = domain.val(&p.name).ok_or_else(|| GoalError::MissingValue {
                policy: model.name.clone(),
                name: p.name.clone(),
                domain: domain.name.clone(),
            })?;
            args.push(value_term(v));
        } else {
            args.push(set_list(domain, &p.name).ok_or_else(|| missing_set(&p.name))?);
        }
    }
    let locals: Vec<Term> = compiled
        .internal_set_names
        .iter()
        .map(|n| set_list(domain, n).ok_or_else(|| missing_set(n)))
        .collect::<Result<_, _>>()?;
    args.push(Term::compound("locals", vec![Term::compound(compiled.locals_functor.clone(), locals)]));
    let globals: Vec<Term> = compiled
        .global_set_names
        .iter()
        .map(|n| set_list(domain, n).ok_or_else(|| missing_set(n)))
        .collect::<Result<_, _>>()?;
    args.push(Term::compound("globals", vec![Term::compound(compiled.globals_functor.clone(), globals)]));
    Ok(BoundPolicy { compiled, args_before_r: args })
}

impl BoundPolicy {
    fn head_constraint(&self, event: Term, r: Term) -> Constraint {
        let mut args = vec![event];
        args.extend(self.args_before_r.iter().cloned());
        args.push(r);
        Constraint::user(self.compiled.head_functor.clone(), args)
    }
}

fn base_packs() -> Vec<HandlerPack> {
    let mut packs = kernel_packs();
    packs.push(build_logic_pack());
    packs.push(build_trilogic_pack());
    packs.push(build_open_close_pack());
    packs.push(build_diff_pack());
    packs.push(build_goal_support_pack());
    packs
}

/// Chains `andr` constraints folding the policies' rule terms into the
/// master rule term; returns the master term.
fn master_fold(rs: &[Term], goal: &mut Vec<Constraint>) -> Term {
    let mut acc = rs[0].clone();
    for r in &rs[1..] {
        let m = Term::Var(Var::fresh("Master"));
        goal.push(Constraint::user("andr", vec![acc, r.clone(), m.clone()]));
        acc = m;
    }
    acc
}

struct RunOutput {
    verdict: Verdict,
    stats: RunStats,
}

/// Solves one goal where *unsatisfiability over the domain is the
/// inconsistency* (the self-consistency goals).
fn run_inverted(program: &RuleProgram, goal: Vec<Constraint>, budget: u64) -> Result<RunOutput, GoalError> {
    match solve(program, &goal, SolveOptions { budget })? {
        SolveResult::Satisfiable(sol) => {
            let witness = extract_witness(&sol);
            Ok(RunOutput {
                verdict: Verdict::NoInconsistency { search: Search::Witness, witness: Some(witness) },
                stats: sol.stats(),
            })
        }
        SolveResult::Unsatisfiable(stats) => Ok(RunOutput {
            verdict: Verdict::InconsistencyFound { witness: Witness::default() },
            stats,
        }),
        SolveResult::BudgetExhausted(stats) => Ok(RunOutput {
            verdict: Verdict::Error {
                diagnostic: format!("step budget exhausted after {} firings", stats.firings),
            },
            stats,
        }),
    }
}

fn extract_witness(sol: &crate::engine::Solution<'_>) -> Witness {
    let mut events: Vec<GroundEvent> = Vec::new();
    let mut residual = Vec::new();
    for c in sol.residual() {
        if c.functor == "trace_event" && c.args.len() == 1 {
            if let Some(e) = term_event(&c.args[0]) {
                if !events.contains(&e) {
                    events.push(e);
                }
                continue;
            }
        }
    }
    events.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.to_string().cmp(&b.to_string())));
    for line in sol.canonical_residual() {
        if line.starts_with("trace_event") || line == "labeling" {
            continue;
        }
        residual.push(line);
    }
    Witness { events, residual }
}

fn report(
    goal: GoalKind,
    setup: &GoalSetup<'_>,
    workflow: Option<&WorkflowModel>,
    out: RunOutput,
    started: Instant,
) -> GoalReport {
    GoalReport {
        goal,
        policies: setup.policies.iter().map(|p| p.name.clone()).collect(),
        workflow: workflow.map(|w| w.name.clone()),
        domain: setup.domain.name.clone(),
        verdict: out.verdict,
        stats: out.stats,
        elapsed: Some(started.elapsed()),
    }
}

/// Builds the common self-consistency goal: an event from the universe,
/// every policy applied to it, the master fold, and the given probe on
/// the master rule term.
fn policy_probe_goal(setup: &GoalSetup<'_>, probe: &str) -> Result<(RuleProgram, Vec<Constraint>), GoalError> {
    if setup.policies.is_empty() {
        return Err(GoalError::NoPolicies);
    }
    let bound: Vec<BoundPolicy> =
        setup.policies.iter().map(|p| bind_policy(p, setup.domain)).collect::<Result<_, _>>()?;
    let mut packs = base_packs();
    for b in &bound {
        packs.push(b.compiled.pack.clone());
    }
    let refs: Vec<&HandlerPack> = packs.iter().collect();
    let program = RuleProgram::compose(&refs)?;

    let e = Term::Var(Var::fresh("E"));
    let mut goal = vec![
        Constraint::user("in", vec![e.clone(), all_events_term(setup.domain)]),
        Constraint::user("trace_event", vec![e.clone()]),
    ];
    let mut rs = Vec::new();
    for b in &bound {
        let r = Term::Var(Var::fresh("R"));
        goal.push(b.head_constraint(e.clone(), r.clone()));
        rs.push(r);
    }
    let master = master_fold(&rs, &mut goal);
    goal.push(Constraint::user(probe, vec![master]));
    Ok((program, goal))
}

/// Inapplicability: no event in the domain makes the master policy
/// applicable.
pub fn goal_inapplicability(setup: &GoalSetup<'_>) -> Result<GoalReport, GoalError> {
    let started = Instant::now();
    let (program, goal) = policy_probe_goal(setup, "domain_holds")?;
    let out = run_inverted(&program, goal, setup.budget)?;
    Ok(report(GoalKind::Inapplicability, setup, None, out, started))
}

/// Monotonic denial: every event in the domain is denied.
pub fn goal_monotonic_denial(setup: &GoalSetup<'_>) -> Result<GoalReport, GoalError> {
    let started = Instant::now();
    let (program, goal) = policy_probe_goal(setup, "not_denied")?;
    let out = run_inverted(&program, goal, setup.budget)?;
    Ok(report(GoalKind::MonotonicDenial, setup, None, out, started))
}

/// Monotonic acceptance: every event in the domain is allowed.
pub fn goal_monotonic_acceptance(setup: &GoalSetup<'_>) -> Result<GoalReport, GoalError> {
    let started = Instant::now();
    let (program, goal) = policy_probe_goal(setup, "not_allowed")?;
    let out = run_inverted(&program, goal, setup.budget)?;
    Ok(report(GoalKind::MonotonicAcceptance, setup, None, out, started))
}

/// Rule redundancy: replacing the addressed rule with the dummy rule
/// (`false :: true`) never changes the policy's verdict on any event.
/// Applies to the first policy; the goal constrains the original and the
/// modified compilation to differ somewhere in the domain.
pub fn goal_rule_redundancy(setup: &GoalSetup<'_>, target: &RuleTarget) -> Result<GoalReport, GoalError> {
    let started = Instant::now();
    if setup.policies.is_empty() {
        return Err(GoalError::NoPolicies);
    }
    let original = &setup.policies[0];
    let mut modified = original.with_dummy_rule(target).map_err(GoalError::BadTarget)?;
    modified.name = format!("{}_mod", original.name);

    let b_orig = bind_policy(original, setup.domain)?;
    let b_mod = bind_policy(&modified, setup.domain)?;
    let mut packs = base_packs();
    packs.push(b_orig.compiled.pack.clone());
    packs.push(b_mod.compiled.pack.clone());
    let refs: Vec<&HandlerPack> = packs.iter().collect();
    let program = RuleProgram::compose(&refs)?;

    let e = Term::Var(Var::fresh("E"));
    let r1 = Term::Var(Var::fresh("R1"));
    let r2 = Term::Var(Var::fresh("R2"));
    let goal = vec![
        Constraint::user("in", vec![e.clone(), all_events_term(setup.domain)]),
        Constraint::user("trace_event", vec![e.clone()]),
        b_orig.head_constraint(e.clone(), r1.clone()),
        b_mod.head_constraint(e.clone(), r2.clone()),
        Constraint::user("diff", vec![r1, r2]),
    ];
    let out = run_inverted(&program, goal, setup.budget)?;
    Ok(report(GoalKind::Redundancy(target.clone()), setup, None, out, started))
}

/// Workflow/security cross-consistency: can the workflow reach an end
/// activity with every enacting event satisfying the master policy under
/// the given assumption? Satisfiable means consistent (the witness is a
/// full allowed execution); exhausting the domain without a solution is
/// the inconsistency.
pub fn goal_workflow_consistency(
    setup: &GoalSetup<'_>,
    workflow: &WorkflowModel,
    assumption: Assumption,
) -> Result<GoalReport, GoalError> {
    let started = Instant::now();
    const HOOK: &str = "wf_policy_bridge";

    let bound: Vec<BoundPolicy> =
        setup.policies.iter().map(|p| bind_policy(p, setup.domain)).collect::<Result<_, _>>()?;
    let compiled_wf = compile_workflow(workflow, &WfCompileOptions { event_hook: Some(HOOK.to_string()) });

    // the bridge: every event the unrolling introduces must satisfy the
    // master policy, closed or open
    let mut bridge_body: Vec<BodyItem> = Vec::new();
    let mut rs: Vec<Term> = Vec::new();
    for (i, b) in bound.iter().enumerate() {
        let r = d::v(&format!("Rp#{i}"));
        let mut args = vec![d::v("E#")];
        args.extend(b.args_before_r.iter().cloned());
        args.push(r.clone());
        bridge_body.push(BodyItem::Add(Constraint::user(b.compiled.head_functor.clone(), args)));
        rs.push(r);
    }
    let master = if rs.is_empty() {
        // empty policy set: nothing applies anywhere
        d::t("r", vec![d::a("fail"), d::a("true")])
    } else {
        let mut acc = rs[0].clone();
        for (i, r) in rs.iter().enumerate().skip(1) {
            let m = d::v(&format!("Rm#{i}"));
            bridge_body.push(BodyItem::Add(Constraint::user("andr", vec![acc, r.clone(), m.clone()])));
            acc = m;
        }
        acc
    };
    let bridge_functor = match assumption {
        Assumption::Close => "close",
        Assumption::Open => "open",
    };
    bridge_body.push(BodyItem::Add(Constraint::user(bridge_functor, vec![master])));
    bridge_body.push(BodyItem::Add(Constraint::user("trace_event", vec![d::v("E#")])));
    let bridge_pack = HandlerPack {
        name: "wf-policy-bridge".to_string(),
        rules: vec![d::simplification(
            HOOK,
            vec![d::head(HOOK, vec![d::v("E#"), d::v("G#")])],
            vec![],
            bridge_body,
        )],
        declared: vec![FunctorDecl::new(HOOK, 2)],
    };

    let mut packs = base_packs();
    for b in &bound {
        packs.push(b.compiled.pack.clone());
    }
    packs.push(bridge_pack);
    packs.push(compiled_wf.pack.clone());
    let refs: Vec<&HandlerPack> = packs.iter().collect();
    let program = RuleProgram::compose(&refs)?;

    // globals: the event universe, participant sets, symbolic data objects
    let mut slots = vec![all_events_term(setup.domain)];
    for p in &compiled_wf.participant_names {
        let term = set_list(setup.domain, p).ok_or_else(|| GoalError::MissingParticipantSet {
            workflow: workflow.name.clone(),
            name: p.clone(),
            domain: setup.domain.name.clone(),
        })?;
        slots.push(term);
    }
    for o in &compiled_wf.object_names {
        slots.push(Term::Var(Var::fresh(format!("Data_{o}"))));
    }
    let globals = Term::compound("globals", vec![Term::compound(compiled_wf.globals_functor.clone(), slots)]);

    // completion means reaching any declared end activity
    let mut stats = RunStats::default();
    for end in &workflow.ends {
        let e = Term::Var(Var::fresh("E"));
        let goal = vec![Constraint::user(end.clone(), vec![e, globals.clone()])];
        match solve(&program, &goal, SolveOptions { budget: setup.budget })? {
            SolveResult::Satisfiable(sol) => {
                stats.firings += sol.stats().firings;
                stats.choice_points += sol.stats().choice_points;
                let witness = extract_witness(&sol);
                let out = RunOutput {
                    verdict: Verdict::NoInconsistency { search: Search::Witness, witness: Some(witness) },
                    stats,
                };
                return Ok(report(GoalKind::WorkflowConsistency(assumption), setup, Some(workflow), out, started));
            }
            SolveResult::Unsatisfiable(s) => {
                stats.firings += s.firings;
                stats.choice_points += s.choice_points;
            }
            SolveResult::BudgetExhausted(s) => {
                stats.firings += s.firings;
                stats.choice_points += s.choice_points;
                let out = RunOutput {
                    verdict: Verdict::Error {
                        diagnostic: format!("step budget exhausted after {} firings", s.firings),
                    },
                    stats,
                };
                return Ok(report(GoalKind::WorkflowConsistency(assumption), setup, Some(workflow), out, started));
            }
        }
    }
    let out = RunOutput {
        verdict: Verdict::InconsistencyFound { witness: Witness::default() },
        stats,
    };
    Ok(report(GoalKind::WorkflowConsistency(assumption), setup, Some(workflow), out, started))
}

/// Dispatch by goal kind.
pub fn run_goal(
    setup: &GoalSetup<'_>,
    workflow: Option<&WorkflowModel>,
    kind: &GoalKind,
) -> Result<GoalReport, GoalError> {
    match kind {
        GoalKind::Inapplicability => goal_inapplicability(setup),
        GoalKind::MonotonicDenial => goal_monotonic_denial(setup),
        GoalKind::MonotonicAcceptance => goal_monotonic_acceptance(setup),
        GoalKind::Redundancy(target) => goal_rule_redundancy(setup, target),
        GoalKind::WorkflowConsistency(assumption) => {
            let wf = workflow.ok_or_else(|| GoalError::BadTarget("wf-consistency needs a workflow".into()))?;
            goal_workflow_consistency(setup, wf, *assumption)
        }
    }
}
