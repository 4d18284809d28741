//! Exhaustive finite-domain oracle.
//!
//! Computes goal verdicts by direct enumeration — every event of the
//! domain for the policy goals, every activity plan and event assignment
//! for the workflow goal — with no rewriting engine involved. It exists
//! to be slow and right: the solver's verdicts are checked against it.
//!
//! This crate depends only on the model crate; the absence of any engine
//! dependency is a property of the crate graph.

pub mod tables;
pub mod workflow;

use pcv_model::domain::DomainSpec;
use pcv_model::event::GroundEvent;
use pcv_model::spl::{evaluate_tri, EvalError, SetEnv, SplPolicyModel, TriValue};
use pcv_model::verdict::{Assumption, GoalKind, RuleTarget, Search, Verdict, Witness};
use pcv_model::wpdl::WorkflowModel;
use thiserror::Error;

/// Candidate-assignment cap; beyond this the oracle refuses rather than
/// run unbounded.
pub const EXPLOSION_GUARD: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("domain too large for exhaustive search: {candidates} candidate assignments (cap {cap})")]
    Explosion { candidates: u64, cap: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("redundancy target: {0}")]
    BadTarget(String),
    #[error("workflow `{workflow}` participant `{name}` has no set in domain `{domain}`")]
    MissingParticipantSet { workflow: String, name: String, domain: String },
    #[error("oracle goal needs at least one policy")]
    NoPolicies,
}

/// Deterministic enumeration of the full event universe.
pub fn enumerate_events(domain: &DomainSpec) -> Vec<GroundEvent> {
    domain.enumerate_events()
}

/// The master verdict: tri-logical conjunction across the policies,
/// `NotApply` for the empty set. `None` marks an event the policies
/// cannot even destructure (a parameter reference past the event's
/// parameters), which no goal may use as a witness.
pub fn master_verdict(
    policies: &[SplPolicyModel],
    envs: &[SetEnv],
    event: &GroundEvent,
) -> Result<Option<TriValue>, OracleError> {
    let mut acc = TriValue::NotApply;
    for (p, env) in policies.iter().zip(envs.iter()) {
        match evaluate_tri(p, env, event) {
            Ok(v) => acc = acc.and(v),
            Err(EvalError::ParOutOfRange { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(acc))
}

fn bind_all(policies: &[SplPolicyModel], domain: &DomainSpec) -> Result<Vec<SetEnv>, OracleError> {
    policies
        .iter()
        .map(|p| pcv_model::spl::bind_env(p, domain).map_err(OracleError::from))
        .collect()
}

fn witness_of(event: &GroundEvent) -> Witness {
    Witness { events: vec![event.clone()], residual: vec![] }
}

/// Searches the domain for an event satisfying `keep`; finding one is
/// no-inconsistency, exhausting the domain is the inconsistency.
fn search_event(
    domain: &DomainSpec,
    mut keep: impl FnMut(&GroundEvent) -> Result<bool, OracleError>,
) -> Result<Verdict, OracleError> {
    if domain.event_count() > EXPLOSION_GUARD {
        return Err(OracleError::Explosion { candidates: domain.event_count(), cap: EXPLOSION_GUARD });
    }
    for event in domain.enumerate_events() {
        if keep(&event)? {
            return Ok(Verdict::NoInconsistency { search: Search::Witness, witness: Some(witness_of(&event)) });
        }
    }
    Ok(Verdict::InconsistencyFound { witness: Witness::default() })
}

pub fn goal_inapplicability(policies: &[SplPolicyModel], domain: &DomainSpec) -> Result<Verdict, OracleError> {
    if policies.is_empty() {
        return Err(OracleError::NoPolicies);
    }
    let envs = bind_all(policies, domain)?;
    search_event(domain, |e| {
        Ok(master_verdict(policies, &envs, e)?.map(|v| v != TriValue::NotApply).unwrap_or(false))
    })
}

pub fn goal_monotonic_denial(policies: &[SplPolicyModel], domain: &DomainSpec) -> Result<Verdict, OracleError> {
    if policies.is_empty() {
        return Err(OracleError::NoPolicies);
    }
    let envs = bind_all(policies, domain)?;
    search_event(domain, |e| {
        Ok(master_verdict(policies, &envs, e)?.map(|v| v != TriValue::Deny).unwrap_or(false))
    })
}

pub fn goal_monotonic_acceptance(policies: &[SplPolicyModel], domain: &DomainSpec) -> Result<Verdict, OracleError> {
    if policies.is_empty() {
        return Err(OracleError::NoPolicies);
    }
    let envs = bind_all(policies, domain)?;
    search_event(domain, |e| {
        Ok(master_verdict(policies, &envs, e)?.map(|v| v != TriValue::Allow).unwrap_or(false))
    })
}

/// Whether two verdicts "differ" in the sense of the difference operator:
/// `(D1 xor D2) ∨ ((D1∧A1) xor (D2∧A2))`. It does not distinguish deny
/// from not-apply when the domains coincide.
pub fn verdicts_differ(v1: TriValue, v2: TriValue) -> bool {
    let (d1, a1) = v1.to_pair();
    let (d2, a2) = v2.to_pair();
    (d1 != d2) || ((d1 && a1) != (d2 && a2))
}

pub fn goal_rule_redundancy(
    policies: &[SplPolicyModel],
    target: &RuleTarget,
    domain: &DomainSpec,
) -> Result<Verdict, OracleError> {
    if policies.is_empty() {
        return Err(OracleError::NoPolicies);
    }
    let original = &policies[0];
    let modified = original.with_dummy_rule(target).map_err(OracleError::BadTarget)?;
    let env_orig = pcv_model::spl::bind_env(original, domain)?;
    let env_mod = pcv_model::spl::bind_env(&modified, domain)?;
    search_event(domain, |e| {
        let v1 = match evaluate_tri(original, &env_orig, e) {
            Ok(v) => v,
            Err(EvalError::ParOutOfRange { .. }) => return Ok(false),
            Err(err) => return Err(err.into()),
        };
        let v2 = match evaluate_tri(&modified, &env_mod, e) {
            Ok(v) => v,
            Err(EvalError::ParOutOfRange { .. }) => return Ok(false),
            Err(err) => return Err(err.into()),
        };
        Ok(verdicts_differ(v1, v2))
    })
}

pub fn goal_workflow_consistency(
    policies: &[SplPolicyModel],
    workflow: &WorkflowModel,
    assumption: Assumption,
    domain: &DomainSpec,
) -> Result<Verdict, OracleError> {
    workflow::workflow_consistency(policies, workflow, assumption, domain)
}

/// Dispatch by goal kind, mirroring the solver-side runner.
pub fn oracle_goal(
    kind: &GoalKind,
    policies: &[SplPolicyModel],
    workflow: Option<&WorkflowModel>,
    domain: &DomainSpec,
) -> Result<Verdict, OracleError> {
    match kind {
        GoalKind::Inapplicability => goal_inapplicability(policies, domain),
        GoalKind::MonotonicDenial => goal_monotonic_denial(policies, domain),
        GoalKind::MonotonicAcceptance => goal_monotonic_acceptance(policies, domain),
        GoalKind::Redundancy(target) => goal_rule_redundancy(policies, target, domain),
        GoalKind::WorkflowConsistency(assumption) => {
            let wf = workflow.ok_or_else(|| OracleError::BadTarget("wf-consistency needs a workflow".into()))?;
            goal_workflow_consistency(policies, wf, *assumption, domain)
        }
    }
}

/// Replays a witness through direct evaluation: a no-inconsistency
/// witness must actually exhibit the claimed behaviour.
pub fn replay_witness(
    kind: &GoalKind,
    policies: &[SplPolicyModel],
    workflow: Option<&WorkflowModel>,
    domain: &DomainSpec,
    witness: &Witness,
) -> Result<bool, OracleError> {
    let envs = bind_all(policies, domain)?;
    match kind {
        GoalKind::Inapplicability | GoalKind::MonotonicDenial | GoalKind::MonotonicAcceptance => {
            let [event] = witness.events.as_slice() else { return Ok(false) };
            let Some(v) = master_verdict(policies, &envs, event)? else { return Ok(false) };
            Ok(match kind {
                GoalKind::Inapplicability => v != TriValue::NotApply,
                GoalKind::MonotonicDenial => v != TriValue::Deny,
                _ => v != TriValue::Allow,
            })
        }
        GoalKind::Redundancy(target) => {
            let [event] = witness.events.as_slice() else { return Ok(false) };
            let original = policies.first().ok_or(OracleError::NoPolicies)?;
            let modified = original.with_dummy_rule(target).map_err(OracleError::BadTarget)?;
            let env_orig = pcv_model::spl::bind_env(original, domain)?;
            let env_mod = pcv_model::spl::bind_env(&modified, domain)?;
            let v1 = evaluate_tri(original, &env_orig, event)?;
            let v2 = evaluate_tri(&modified, &env_mod, event)?;
            Ok(verdicts_differ(v1, v2))
        }
        GoalKind::WorkflowConsistency(assumption) => {
            let wf = workflow.ok_or_else(|| OracleError::BadTarget("wf-consistency needs a workflow".into()))?;
            workflow::replay_trace(policies, wf, *assumption, domain, &witness.events)
        }
    }
}
