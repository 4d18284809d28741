//! Exhaustive workflow-trace search.
//!
//! A plan is one way of reaching an end activity: the set of required
//! event occurrences (one per atomic activity firing), the strict time
//! orders between them, and the transitions taken. XOR joins branch into
//! alternative plans; AND joins merge all incoming requirements; dummy
//! activities contribute ordering but no event of their own. A plan is
//! consistent when some assignment of domain events to occurrences
//! matches every activity, respects every order, satisfies the taken
//! transitions' data conditions (with higher-priority siblings' tests
//! negated), and every event passes the master policy under the chosen
//! assumption.

use crate::{master_verdict, OracleError, EXPLOSION_GUARD};
use pcv_model::domain::DomainSpec;
use pcv_model::event::GroundEvent;
use pcv_model::spl::{CmpOp, SetEnv, SplPolicyModel, TriValue};
use pcv_model::value::Value;
use pcv_model::verdict::{Assumption, Search, Verdict, Witness};
use pcv_model::wpdl::{ActivityKind, CondCmp, JoinKind, WorkflowModel};

#[derive(Clone, Debug, Default)]
struct Plan {
    /// Activity name per occurrence.
    occs: Vec<String>,
    /// `(earlier, later)` occurrence pairs with strict time order.
    orders: Vec<(usize, usize)>,
    /// Names of transitions taken.
    taken: Vec<String>,
    /// Root occurrence (the event enacting the sub-plan's activity);
    /// `None` below a dummy activity.
    root: Option<usize>,
    /// Occurrences that must precede the event consuming this sub-plan.
    pending: Vec<usize>,
}

impl Plan {
    fn absorb(&mut self, other: &Plan) -> Vec<usize> {
        let offset = self.occs.len();
        self.occs.extend(other.occs.iter().cloned());
        self.orders.extend(other.orders.iter().map(|(a, b)| (a + offset, b + offset)));
        self.taken.extend(other.taken.iter().cloned());
        let mut preds: Vec<usize> = other.pending.iter().map(|p| p + offset).collect();
        if let Some(r) = other.root {
            preds.push(r + offset);
        }
        preds
    }
}

fn plans_for_activity(model: &WorkflowModel, name: &str) -> Vec<Plan> {
    let activity = model.activity(name).expect("validated activity reference");
    let incoming = model.incoming(name);

    // alternative incoming combinations per the join discipline
    let combos: Vec<Vec<&pcv_model::wpdl::Transition>> = if incoming.is_empty() {
        vec![vec![]]
    } else {
        match activity.join {
            JoinKind::And => vec![incoming.clone()],
            JoinKind::Xor => incoming.iter().map(|t| vec![*t]).collect(),
        }
    };

    let mut out = Vec::new();
    for combo in combos {
        // each chosen transition contributes alternative sub-plans of its
        // from-activity; take the cross product
        let mut partials: Vec<(Plan, Vec<usize>)> = vec![(Plan::default(), Vec::new())];
        for transition in &combo {
            let sub_plans = plans_for_activity(model, &transition.from);
            let mut next = Vec::new();
            for (partial, preds) in &partials {
                for sub in &sub_plans {
                    let mut merged = partial.clone();
                    let mut new_preds = preds.clone();
                    new_preds.extend(merged.absorb(sub));
                    merged.taken.push(transition.name.clone());
                    next.push((merged, new_preds));
                }
            }
            partials = next;
        }
        for (mut plan, preds) in partials {
            match activity.kind {
                ActivityKind::Atomic { .. } => {
                    let occ = plan.occs.len();
                    plan.occs.push(name.to_string());
                    for p in preds {
                        plan.orders.push((p, occ));
                    }
                    plan.root = Some(occ);
                    plan.pending = Vec::new();
                }
                ActivityKind::Dummy => {
                    plan.root = None;
                    plan.pending = preds;
                }
            }
            out.push(plan);
        }
    }
    out
}

// --- symbolic data feasibility ---------------------------------------------

fn negate(cmp: &CondCmp) -> CondCmp {
    let op = match cmp.op {
        CmpOp::Lt => CmpOp::Ge,
        CmpOp::Le => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Le,
        CmpOp::Ge => CmpOp::Lt,
        CmpOp::Eq => CmpOp::Ne,
        CmpOp::Ne => CmpOp::Eq,
    };
    CondCmp { field: cmp.field.clone(), op, value: cmp.value }
}

/// Conjunction of clauses, each a disjunction of comparisons over the
/// symbolic data fields (integer-valued, unbounded domain).
fn clauses_feasible(clauses: &[Vec<CondCmp>]) -> bool {
    fn assign(clauses: &[Vec<CondCmp>], chosen: &mut Vec<CondCmp>) -> bool {
        match clauses.split_first() {
            None => conjunction_feasible(chosen),
            Some((clause, rest)) => {
                for cmp in clause {
                    chosen.push(cmp.clone());
                    if assign(rest, chosen) {
                        chosen.pop();
                        return true;
                    }
                    chosen.pop();
                }
                false
            }
        }
    }
    assign(clauses, &mut Vec::new())
}

fn conjunction_feasible(cmps: &[CondCmp]) -> bool {
    let mut fields: Vec<&str> = cmps.iter().map(|c| c.field.as_str()).collect();
    fields.sort_unstable();
    fields.dedup();
    for field in fields {
        let mut lo: i128 = i128::MIN / 4;
        let mut hi: i128 = i128::MAX / 4;
        let mut neqs: Vec<i64> = Vec::new();
        for cmp in cmps.iter().filter(|c| c.field == field) {
            let v = cmp.value as i128;
            match cmp.op {
                CmpOp::Lt => hi = hi.min(v - 1),
                CmpOp::Le => hi = hi.min(v),
                CmpOp::Gt => lo = lo.max(v + 1),
                CmpOp::Ge => lo = lo.max(v),
                CmpOp::Eq => {
                    lo = lo.max(v);
                    hi = hi.min(v);
                }
                CmpOp::Ne => neqs.push(cmp.value),
            }
        }
        if lo > hi {
            return false;
        }
        neqs.sort_unstable();
        neqs.dedup();
        let excluded = neqs.iter().filter(|n| lo <= **n as i128 && (**n as i128) <= hi).count() as i128;
        if hi - lo < excluded {
            return false;
        }
    }
    true
}

fn plan_data_feasible(model: &WorkflowModel, taken: &[String]) -> bool {
    let mut clauses: Vec<Vec<CondCmp>> = Vec::new();
    for tname in taken {
        let t = model.transition(tname).expect("taken transitions exist");
        if let Some(cond) = &t.condition {
            for cmp in cond {
                clauses.push(vec![cmp.clone()]);
            }
        }
        for prior in model.higher_priority_siblings(tname) {
            let p = model.transition(prior).expect("priority member");
            match &p.condition {
                // an unconditional higher-priority sibling always fires
                None => return false,
                Some(cond) => clauses.push(cond.iter().map(negate).collect()),
            }
        }
    }
    clauses_feasible(&clauses)
}

// --- event assignment ---------------------------------------------------------

struct Assignment<'a> {
    /// Candidate events per occurrence.
    candidates: Vec<Vec<&'a GroundEvent>>,
    orders: Vec<(usize, usize)>,
}

fn event_matches_activity(
    model: &WorkflowModel,
    domain: &DomainSpec,
    activity: &str,
    event: &GroundEvent,
) -> Result<bool, OracleError> {
    let Some(act) = model.activity(activity) else { return Ok(false) };
    let ActivityKind::Atomic { performer, action, target } = &act.kind else {
        return Ok(false);
    };
    let members = domain.set(performer).ok_or_else(|| OracleError::MissingParticipantSet {
        workflow: model.name.clone(),
        name: performer.clone(),
        domain: domain.name.clone(),
    })?;
    Ok(members.contains(&event.actor)
        && event.action == *action
        && event.target == Value::Atom(target.clone()))
}

fn search_assignment(
    a: &Assignment<'_>,
    mut accept: impl FnMut(&[&GroundEvent]) -> bool,
) -> Option<Vec<GroundEvent>> {
    fn rec<'a>(
        a: &Assignment<'a>,
        pos: usize,
        picked: &mut Vec<&'a GroundEvent>,
        accept: &mut dyn FnMut(&[&GroundEvent]) -> bool,
        out: &mut Option<Vec<GroundEvent>>,
    ) -> bool {
        if pos == a.candidates.len() {
            if accept(picked) {
                *out = Some(picked.iter().map(|e| (*e).clone()).collect());
                return true;
            }
            return false;
        }
        for e in &a.candidates[pos] {
            // check orders involving positions decided so far
            let ok = a.orders.iter().all(|(x, y)| {
                if *y == pos && *x < pos {
                    picked[*x].time < e.time
                } else if *x == pos && *y < pos {
                    e.time < picked[*y].time
                } else {
                    true
                }
            });
            if !ok {
                continue;
            }
            picked.push(e);
            if rec(a, pos + 1, picked, accept, out) {
                picked.pop();
                return true;
            }
            picked.pop();
        }
        false
    }
    let mut out = None;
    let mut picked = Vec::new();
    rec(a, 0, &mut picked, &mut accept, &mut out);
    out
}

pub fn workflow_consistency(
    policies: &[SplPolicyModel],
    workflow: &WorkflowModel,
    assumption: Assumption,
    domain: &DomainSpec,
) -> Result<Verdict, OracleError> {
    let envs: Vec<SetEnv> = policies
        .iter()
        .map(|p| pcv_model::spl::bind_env(p, domain))
        .collect::<Result<_, _>>()?;
    let events = domain.enumerate_events();

    // events acceptable to the master policy under the assumption
    let mut allowed: Vec<&GroundEvent> = Vec::new();
    for e in &events {
        if let Some(v) = master_verdict(policies, &envs, e)? {
            let ok = match assumption {
                Assumption::Close => v == TriValue::Allow,
                Assumption::Open => v != TriValue::Deny,
            };
            if ok {
                allowed.push(e);
            }
        }
    }

    for end in &workflow.ends {
        for plan in plans_for_activity(workflow, end) {
            if !plan_data_feasible(workflow, &plan.taken) {
                continue;
            }
            let mut candidates = Vec::with_capacity(plan.occs.len());
            for activity in &plan.occs {
                let mut per: Vec<&GroundEvent> = Vec::new();
                for e in &allowed {
                    if event_matches_activity(workflow, domain, activity, e)? {
                        per.push(*e);
                    }
                }
                candidates.push(per);
            }
            let combos: u64 = candidates.iter().map(|c| c.len().max(1) as u64).product();
            if combos > EXPLOSION_GUARD {
                return Err(OracleError::Explosion { candidates: combos, cap: EXPLOSION_GUARD });
            }
            if candidates.iter().any(|c| c.is_empty()) {
                continue;
            }
            let assignment = Assignment { candidates, orders: plan.orders.clone() };
            if let Some(mut picked) = search_assignment(&assignment, |_| true) {
                picked.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.to_string().cmp(&b.to_string())));
                picked.dedup();
                return Ok(Verdict::NoInconsistency {
                    search: Search::Witness,
                    witness: Some(Witness { events: picked, residual: vec![] }),
                });
            }
        }
    }
    Ok(Verdict::InconsistencyFound { witness: Witness::default() })
}

/// Validates a claimed execution trace: the events must come from the
/// domain, pass the policy under the assumption, and admit a plan of the
/// workflow assigning exactly these events with consistent ordering and
/// feasible data conditions.
pub fn replay_trace(
    policies: &[SplPolicyModel],
    workflow: &WorkflowModel,
    assumption: Assumption,
    domain: &DomainSpec,
    trace: &[GroundEvent],
) -> Result<bool, OracleError> {
    let envs: Vec<SetEnv> = policies
        .iter()
        .map(|p| pcv_model::spl::bind_env(p, domain))
        .collect::<Result<_, _>>()?;
    let universe = domain.enumerate_events();
    for e in trace {
        if !universe.contains(e) {
            return Ok(false);
        }
        match master_verdict(policies, &envs, e)? {
            Some(v) => {
                let ok = match assumption {
                    Assumption::Close => v == TriValue::Allow,
                    Assumption::Open => v != TriValue::Deny,
                };
                if !ok {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }

    for end in &workflow.ends {
        for plan in plans_for_activity(workflow, end) {
            if !plan_data_feasible(workflow, &plan.taken) {
                continue;
            }
            let mut candidates = Vec::with_capacity(plan.occs.len());
            for activity in &plan.occs {
                let mut per: Vec<&GroundEvent> = Vec::new();
                for e in trace {
                    if event_matches_activity(workflow, domain, activity, e)? {
                        per.push(e);
                    }
                }
                candidates.push(per);
            }
            if candidates.iter().any(|c| c.is_empty()) {
                continue;
            }
            let assignment = Assignment { candidates, orders: plan.orders.clone() };
            // the assignment must cover the whole trace
            let trace_len = trace.len();
            let found = search_assignment(&assignment, |picked| {
                let mut used: Vec<&GroundEvent> = picked.to_vec();
                used.sort_by_key(|e| e.to_string());
                used.dedup();
                used.len() == trace_len
            });
            if found.is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
