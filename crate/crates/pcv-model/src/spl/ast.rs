//! Policy model types and the tri-valued rule algebra.

use crate::value::Value;
use std::fmt;

/// Outcome of applying a rule to an event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriValue {
    Allow,
    Deny,
    NotApply,
}

impl TriValue {
    /// The `(domain, accept)` pair behind a verdict. `NotApply` is
    /// canonically `(false, true)`; the accept half of a non-applicable
    /// rule carries no information.
    pub fn to_pair(self) -> (bool, bool) {
        match self {
            TriValue::Allow => (true, true),
            TriValue::Deny => (true, false),
            TriValue::NotApply => (false, true),
        }
    }

    pub fn from_pair(domain: bool, accept: bool) -> TriValue {
        if !domain {
            TriValue::NotApply
        } else if accept {
            TriValue::Allow
        } else {
            TriValue::Deny
        }
    }

    /// Tri-valued conjunction: `r(D1∨D2, (¬D1∨A1)∧(¬D2∨A2))`.
    pub fn and(self, other: TriValue) -> TriValue {
        let (d1, a1) = self.to_pair();
        let (d2, a2) = other.to_pair();
        TriValue::from_pair(d1 || d2, (!d1 || a1) && (!d2 || a2))
    }

    /// Tri-valued disjunction: `r(D1∨D2, (D1∧A1)∨(D2∧A2))`.
    pub fn or(self, other: TriValue) -> TriValue {
        let (d1, a1) = self.to_pair();
        let (d2, a2) = other.to_pair();
        TriValue::from_pair(d1 || d2, (d1 && a1) || (d2 && a2))
    }

    /// Tri-valued negation: `r(D, ¬A)`.
    #[allow(clippy::should_implement_trait)] // the algebra's operation, not std's
    pub fn not(self) -> TriValue {
        let (d, a) = self.to_pair();
        TriValue::from_pair(d, !a)
    }

    pub const ALL: [TriValue; 3] = [TriValue::Allow, TriValue::Deny, TriValue::NotApply];
}

impl fmt::Display for TriValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriValue::Allow => "allow",
            TriValue::Deny => "deny",
            TriValue::NotApply => "notapply",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamSort {
    UserSet,
    ObjectSet,
    Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplParam {
    pub name: String,
    pub sort: ParamSort,
}

/// A parsed policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplPolicyModel {
    pub name: String,
    pub params: Vec<SplParam>,
    /// Internal set declarations `(name, sort)`, contents supplied by the
    /// verification domain.
    pub internal_sets: Vec<(String, ParamSort)>,
    /// Sets declared `global`: bound from the environment by name.
    pub global_sets: Vec<String>,
    /// All named rules in declaration order, including the query rule.
    pub rules: Vec<(String, SplRuleExpr)>,
    pub query_rule: String,
}

impl SplPolicyModel {
    pub fn rule(&self, name: &str) -> Option<&SplRuleExpr> {
        self.rules.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn query(&self) -> &SplRuleExpr {
        self.rule(&self.query_rule).expect("query rule present by construction")
    }

    /// Every set name the policy may reference.
    pub fn set_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.params {
            if p.sort != ParamSort::Value {
                out.push(&p.name);
            }
        }
        for (n, _) in &self.internal_sets {
            out.push(n);
        }
        for n in &self.global_sets {
            out.push(n);
        }
        out
    }

    /// Replace the rule addressed by `target` with the dummy rule
    /// `false :: true` (empty applicability domain), returning the
    /// modified policy. Used by the redundancy goal.
    pub fn with_dummy_rule(&self, target: &crate::verdict::RuleTarget) -> Result<SplPolicyModel, String> {
        use crate::verdict::RuleTarget;
        let dummy = SplRuleExpr::Simple { domain: BoolExpr::Const(false), accept: BoolExpr::Const(true) };
        let mut out = self.clone();
        match target {
            RuleTarget::Named(name) => {
                if *name == self.query_rule {
                    return Err(format!("`{name}` is the query rule; address its sub-expressions with query.<path>"));
                }
                let slot = out
                    .rules
                    .iter_mut()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| format!("policy `{}` has no rule `{name}`", self.name))?;
                slot.1 = dummy;
                Ok(out)
            }
            RuleTarget::QueryPath(path) => {
                let qname = out.query_rule.clone();
                let slot = out.rules.iter_mut().find(|(n, _)| *n == qname).unwrap();
                replace_at(&mut slot.1, path, dummy)?;
                Ok(out)
            }
        }
    }
}

fn replace_at(expr: &mut SplRuleExpr, path: &[PathStep], dummy: SplRuleExpr) -> Result<(), String> {
    match path.split_first() {
        None => {
            *expr = dummy;
            Ok(())
        }
        Some((step, rest)) => {
            let inner: &mut SplRuleExpr = match (step, expr) {
                (PathStep::Left, SplRuleExpr::And(l, _)) | (PathStep::Left, SplRuleExpr::Or(l, _)) => l,
                (PathStep::Right, SplRuleExpr::And(_, r)) | (PathStep::Right, SplRuleExpr::Or(_, r)) => r,
                (PathStep::Body, SplRuleExpr::Not(b))
                | (PathStep::Body, SplRuleExpr::ForAll { body: b, .. })
                | (PathStep::Body, SplRuleExpr::Exists { body: b, .. }) => b,
                (step, other) => {
                    return Err(format!("path step `{step}` does not address a child of {}", other.kind_name()))
                }
            };
            replace_at(inner, rest, dummy)
        }
    }
}

/// One step of a query-rule addressing path (`query.left.body`, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStep {
    Left,
    Right,
    Body,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStep::Left => "left",
            PathStep::Right => "right",
            PathStep::Body => "body",
        })
    }
}

/// A rule expression in the tri-valued algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplRuleExpr {
    /// `domain :: accept`.
    Simple { domain: BoolExpr, accept: BoolExpr },
    And(Box<SplRuleExpr>, Box<SplRuleExpr>),
    Or(Box<SplRuleExpr>, Box<SplRuleExpr>),
    Not(Box<SplRuleExpr>),
    ForAll { var: String, set: String, body: Box<SplRuleExpr> },
    Exists { var: String, set: String, body: Box<SplRuleExpr> },
    /// Reference to another named rule of the same policy.
    Ref(String),
}

impl SplRuleExpr {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SplRuleExpr::Simple { .. } => "a simple rule",
            SplRuleExpr::And(..) => "AND",
            SplRuleExpr::Or(..) => "OR",
            SplRuleExpr::Not(..) => "NOT",
            SplRuleExpr::ForAll { .. } => "FORALL",
            SplRuleExpr::Exists { .. } => "EXIST",
            SplRuleExpr::Ref(_) => "a rule reference",
        }
    }
}

/// Boolean expression over event properties, sets and values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Cmp { op: CmpOp, lhs: ValExpr, rhs: ValExpr },
    In { elem: ValExpr, set: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// A value-producing expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValExpr {
    Prop(EventProp),
    Lit(Value),
    /// A `value`-sorted parameter or a quantified variable.
    Name(String),
}

/// Accessible properties of the current event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventProp {
    Author,
    Action,
    Target,
    /// 1-based parameter index.
    Par(usize),
    Time,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_and_matches_expected_table() {
        use TriValue::*;
        assert_eq!(Allow.and(Deny), Deny);
        assert_eq!(Allow.and(NotApply), Allow);
        assert_eq!(NotApply.and(NotApply), NotApply);
        for v in TriValue::ALL {
            assert_eq!(Deny.and(v), Deny);
            assert_eq!(v.and(Deny), Deny);
        }
    }

    #[test]
    fn tri_or_is_de_morgan_dual() {
        for x in TriValue::ALL {
            for y in TriValue::ALL {
                assert_eq!(x.or(y), x.not().and(y.not()).not());
            }
        }
    }
}
