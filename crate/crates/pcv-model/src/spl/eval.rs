//! Direct tri-valued evaluation of policies over ground events.
//!
//! This is the reference semantics used for testing and by the exhaustive
//! oracle. It never touches the rewriting engine.

use super::ast::*;
use crate::domain::DomainSpec;
use crate::event::GroundEvent;
use crate::value::Value;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    /// The event has fewer parameters than `event.par[idx]` requires.
    /// Such an event cannot satisfy any constraint of the policy; callers
    /// treat it as infeasible rather than as any particular verdict.
    #[error("event has no parameter {idx}")]
    ParOutOfRange { idx: usize },
    #[error("policy `{policy}` needs set `{name}`, which the domain does not declare")]
    MissingSet { policy: String, name: String },
    #[error("policy `{policy}` needs value `{name}`, which the domain does not declare")]
    MissingValue { policy: String, name: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unbound name `{0}`")]
    UnboundName(String),
}

/// Set and value bindings for one policy against one domain.
#[derive(Clone, Debug, Default)]
pub struct SetEnv {
    pub sets: HashMap<String, Vec<Value>>,
    pub vals: HashMap<String, Value>,
}

/// Resolves every set and value name a policy may reference against the
/// domain, by name. Parameters, internal sets and globals all resolve the
/// same way; the distinction only matters to the compiler's calling
/// convention.
pub fn bind_env(model: &SplPolicyModel, domain: &DomainSpec) -> Result<SetEnv, EvalError> {
    let mut env = SetEnv::default();
    for name in model.set_names() {
        let members = domain
            .set(name)
            .ok_or_else(|| EvalError::MissingSet { policy: model.name.clone(), name: name.to_string() })?;
        env.sets.insert(name.to_string(), members.to_vec());
    }
    for p in &model.params {
        if p.sort == ParamSort::Value {
            let v = domain
                .val(&p.name)
                .ok_or_else(|| EvalError::MissingValue { policy: model.name.clone(), name: p.name.clone() })?;
            env.vals.insert(p.name.clone(), v.clone());
        }
    }
    Ok(env)
}

/// Evaluates the policy's query rule on a ground event.
pub fn evaluate_tri(model: &SplPolicyModel, env: &SetEnv, event: &GroundEvent) -> Result<TriValue, EvalError> {
    let mut scope = HashMap::new();
    eval_rule(model, model.query(), env, &mut scope, event)
}

/// Evaluates an arbitrary rule expression of the policy.
pub fn eval_rule(
    model: &SplPolicyModel,
    expr: &SplRuleExpr,
    env: &SetEnv,
    scope: &mut HashMap<String, Value>,
    event: &GroundEvent,
) -> Result<TriValue, EvalError> {
    match expr {
        SplRuleExpr::Simple { domain, accept } => {
            let d = eval_bool(domain, env, scope, event)?;
            if !d {
                return Ok(TriValue::NotApply);
            }
            let a = eval_bool(accept, env, scope, event)?;
            Ok(TriValue::from_pair(true, a))
        }
        SplRuleExpr::And(l, r) => {
            let lv = eval_rule(model, l, env, scope, event)?;
            let rv = eval_rule(model, r, env, scope, event)?;
            Ok(lv.and(rv))
        }
        SplRuleExpr::Or(l, r) => {
            let lv = eval_rule(model, l, env, scope, event)?;
            let rv = eval_rule(model, r, env, scope, event)?;
            Ok(lv.or(rv))
        }
        SplRuleExpr::Not(b) => Ok(eval_rule(model, b, env, scope, event)?.not()),
        SplRuleExpr::ForAll { var, set, body } => {
            let members = env.sets.get(set).cloned().unwrap_or_default();
            let mut acc = TriValue::NotApply; // empty quantification: r(fail, true)
            for m in members {
                let shadow = scope.insert(var.clone(), m);
                let v = eval_rule(model, body, env, scope, event);
                restore(scope, var, shadow);
                acc = acc.and(v?);
            }
            Ok(acc)
        }
        SplRuleExpr::Exists { var, set, body } => {
            let members = env.sets.get(set).cloned().unwrap_or_default();
            let mut acc = TriValue::NotApply;
            for m in members {
                let shadow = scope.insert(var.clone(), m);
                let v = eval_rule(model, body, env, scope, event);
                restore(scope, var, shadow);
                acc = acc.or(v?);
            }
            Ok(acc)
        }
        SplRuleExpr::Ref(name) => {
            let target = model.rule(name).ok_or_else(|| EvalError::UnknownRule(name.clone()))?;
            eval_rule(model, target, env, scope, event)
        }
    }
}

fn restore(scope: &mut HashMap<String, Value>, var: &str, shadow: Option<Value>) {
    match shadow {
        Some(v) => {
            scope.insert(var.to_string(), v);
        }
        None => {
            scope.remove(var);
        }
    }
}

fn eval_bool(
    expr: &BoolExpr,
    env: &SetEnv,
    scope: &HashMap<String, Value>,
    event: &GroundEvent,
) -> Result<bool, EvalError> {
    match expr {
        BoolExpr::Const(b) => Ok(*b),
        BoolExpr::Not(b) => Ok(!eval_bool(b, env, scope, event)?),
        BoolExpr::And(l, r) => Ok(eval_bool(l, env, scope, event)? && eval_bool(r, env, scope, event)?),
        BoolExpr::Or(l, r) => Ok(eval_bool(l, env, scope, event)? || eval_bool(r, env, scope, event)?),
        BoolExpr::Cmp { op, lhs, rhs } => {
            let a = eval_val(lhs, env, scope, event)?;
            let b = eval_val(rhs, env, scope, event)?;
            Ok(compare(*op, &a, &b))
        }
        BoolExpr::In { elem, set } => {
            let v = eval_val(elem, env, scope, event)?;
            Ok(env.sets.get(set).map(|m| m.contains(&v)).unwrap_or(false))
        }
    }
}

/// Order comparisons are defined on integers only; on other sorts they are
/// false, matching the solver's built-in comparisons. Equality is total.
fn compare(op: CmpOp, a: &Value, b: &Value) -> bool {
    match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        _ => match (a.as_int(), b.as_int()) {
            (Some(x), Some(y)) => match op {
                CmpOp::Lt => x < y,
                CmpOp::Le => x <= y,
                CmpOp::Gt => x > y,
                CmpOp::Ge => x >= y,
                _ => unreachable!(),
            },
            _ => false,
        },
    }
}

fn eval_val(
    expr: &ValExpr,
    env: &SetEnv,
    scope: &HashMap<String, Value>,
    event: &GroundEvent,
) -> Result<Value, EvalError> {
    match expr {
        ValExpr::Lit(v) => Ok(v.clone()),
        ValExpr::Prop(p) => match p {
            EventProp::Author => Ok(event.actor.clone()),
            EventProp::Action => Ok(event.action.clone()),
            EventProp::Target => Ok(event.target.clone()),
            EventProp::Time => Ok(Value::Int(event.time)),
            EventProp::Par(idx) => event
                .pars
                .get(idx - 1)
                .cloned()
                .ok_or(EvalError::ParOutOfRange { idx: *idx }),
        },
        ValExpr::Name(n) => {
            if let Some(v) = scope.get(n) {
                return Ok(v.clone());
            }
            if let Some(v) = env.vals.get(n) {
                return Ok(v.clone());
            }
            Err(EvalError::UnboundName(n.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spl::parser::parse_spl;

    fn private_policy() -> SplPolicyModel {
        parse_spl(
            "private.spl",
            r#"policy Private( user set OrgUsers ) {
                 object set IDocs;
                 ?Private:
                   event.action = "SendEmail" & event.target IN IDocs
                   :: event.par[1] IN OrgUsers
               }"#,
        )
        .unwrap()
    }

    fn env() -> SetEnv {
        let mut e = SetEnv::default();
        e.sets.insert("OrgUsers".into(), vec![Value::atom("alice"), Value::atom("bob")]);
        e.sets.insert("IDocs".into(), vec![Value::atom("doc1")]);
        e
    }

    fn event(action: &str, target: &str, par: &str) -> GroundEvent {
        GroundEvent {
            actor: Value::atom("alice"),
            action: Value::str(action),
            target: Value::atom(target),
            pars: vec![Value::atom(par)],
            time: 1,
        }
    }

    #[test]
    fn private_allows_internal_send() {
        let m = private_policy();
        let v = evaluate_tri(&m, &env(), &event("SendEmail", "doc1", "bob")).unwrap();
        assert_eq!(v, TriValue::Allow);
    }

    #[test]
    fn private_not_applicable_to_read() {
        let m = private_policy();
        let v = evaluate_tri(&m, &env(), &event("Read", "doc1", "bob")).unwrap();
        assert_eq!(v, TriValue::NotApply);
    }

    #[test]
    fn private_denies_outsider_recipient() {
        let m = private_policy();
        let v = evaluate_tri(&m, &env(), &event("SendEmail", "doc1", "mallory")).unwrap();
        assert_eq!(v, TriValue::Deny);
    }

    #[test]
    fn par_out_of_range_is_an_error() {
        let m = private_policy();
        let mut e = event("SendEmail", "doc1", "bob");
        e.pars.clear();
        assert!(matches!(
            evaluate_tri(&m, &env(), &e),
            Err(EvalError::ParOutOfRange { idx: 1 })
        ));
    }
}
