//! Rewrite rules, handler packs and composed rule programs.

use super::constraint::{display_functor, Constraint, FunctorDecl, Kind, BUILTIN_FUNCTORS};
use super::term::Term;
use super::EngineError;
use std::collections::HashMap;
use std::fmt::Write as _;

/// A head pattern: functor, argument patterns, optional time pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadPat {
    pub functor: String,
    pub args: Vec<Term>,
    pub time: Option<Term>,
}

impl HeadPat {
    pub fn key(&self) -> (&str, usize) {
        (&self.functor, self.args.len())
    }
}

/// One guard condition. Guards are entailment checks: they may bind rule
/// variables but never store variables; insufficient instantiation means
/// the rule waits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardTest {
    /// One-way matching equality (`Set = [X|Tail]`, `N = []`).
    Match(Term, Term),
    /// Syntactic distinctness of dereferenced terms (the `X≠Y` side
    /// condition); two distinct unbound variables count as distinct.
    NotIdentical(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    Gt(Term, Term),
    Ge(Term, Term),
    Ground(Term),
    Integer(Term),
    IsList(Term),
    Member(Term, Term),
    NotMember(Term, Term),
    True,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardAtom {
    pub negated: bool,
    pub test: GuardTest,
}

impl GuardAtom {
    pub fn pos(test: GuardTest) -> GuardAtom {
        GuardAtom { negated: false, test }
    }

    pub fn neg(test: GuardTest) -> GuardAtom {
        GuardAtom { negated: true, test }
    }
}

/// One body step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BodyItem {
    /// Post a constraint built from a pattern.
    Add(Constraint),
    /// Reflect a term into a constraint and post it (`A ∧ B ⇔ A, B`).
    Call(Term),
    /// Apply a closure term to extra arguments and post the result
    /// (`R = Tr(X)` posts `f(captured…, X, R)`).
    Apply { target: Term, extra: Vec<Term> },
    /// Committed-choice disjunction over alternative body sequences; the
    /// only source of choice points.
    Disjunction(Vec<Vec<BodyItem>>),
}

/// A guarded rewrite rule. `kept` heads survive a firing, `removed` heads
/// are deleted: both non-empty is a simpagation, only `removed` a
/// simplification, only `kept` a propagation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChrRule {
    pub name: String,
    pub kept: Vec<HeadPat>,
    pub removed: Vec<HeadPat>,
    pub guard: Vec<GuardAtom>,
    pub body: Vec<BodyItem>,
}

impl ChrRule {
    pub fn is_propagation(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn is_simplification(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn head_count(&self) -> usize {
        self.kept.len() + self.removed.len()
    }

    /// All heads, kept first; match ids align with this order.
    pub fn all_heads(&self) -> impl Iterator<Item = &HeadPat> {
        self.kept.iter().chain(self.removed.iter())
    }
}

/// A named bundle of rules plus the functors they handle.
#[derive(Clone, Debug)]
pub struct HandlerPack {
    pub name: String,
    pub rules: Vec<ChrRule>,
    pub declared: Vec<FunctorDecl>,
}

/// Where a functor occurs among a rule's heads.
#[derive(Clone, Copy, Debug)]
pub struct Occurrence {
    pub rule_idx: usize,
    /// Position within `all_heads` order (kept first).
    pub pos: usize,
}

/// An immutable, validated rule program: handler packs concatenated with
/// compiled frontend rules, in layer order.
#[derive(Debug)]
pub struct RuleProgram {
    rules: Vec<ChrRule>,
    decls: HashMap<(String, usize), FunctorDecl>,
    occurrences: HashMap<(String, usize), Vec<Occurrence>>,
}

pub const LABELING: &str = "labeling";

impl RuleProgram {
    /// Concatenates packs (textual order is firing order) and validates.
    pub fn compose(packs: &[&HandlerPack]) -> Result<RuleProgram, EngineError> {
        let mut rules = Vec::new();
        let mut decls: HashMap<(String, usize), FunctorDecl> = HashMap::new();
        decls.insert(
            (LABELING.to_string(), 0),
            FunctorDecl { functor: LABELING.to_string(), arity: 0, timed: false, already_in_store: true },
        );
        for pack in packs {
            for d in &pack.declared {
                decls.entry((d.functor.clone(), d.arity)).or_insert_with(|| d.clone());
            }
            rules.extend(pack.rules.iter().cloned());
        }

        let mut occurrences: HashMap<(String, usize), Vec<Occurrence>> = HashMap::new();
        for (idx, rule) in rules.iter().enumerate() {
            if rule.head_count() == 0 {
                return Err(EngineError::program(format!("rule `{}` has no heads", rule.name)));
            }
            for (pos, head) in rule.all_heads().enumerate() {
                let key = (head.functor.clone(), head.args.len());
                if !decls.contains_key(&key) {
                    return Err(EngineError::program(format!(
                        "rule `{}` matches undeclared functor {}/{}",
                        rule.name, head.functor, head.args.len()
                    )));
                }
                if head.functor == LABELING && pos >= rule.kept.len() {
                    return Err(EngineError::program(format!(
                        "rule `{}` removes the labeling constraint",
                        rule.name
                    )));
                }
                occurrences.entry(key).or_default().push(Occurrence { rule_idx: idx, pos });
            }
            check_body_decls(&rule.name, &rule.body, &decls)?;
        }
        Ok(RuleProgram { rules, decls, occurrences })
    }

    pub fn rules(&self) -> &[ChrRule] {
        &self.rules
    }

    pub fn rule(&self, idx: usize) -> &ChrRule {
        &self.rules[idx]
    }

    pub fn decl(&self, functor: &str, arity: usize) -> Option<&FunctorDecl> {
        self.decls.get(&(functor.to_string(), arity))
    }

    pub fn occurrences(&self, functor: &str, arity: usize) -> &[Occurrence] {
        self.occurrences
            .get(&(functor.to_string(), arity))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Deterministic textual dump, one rule per line:
    /// `name @ kept \ removed <=> guard | body.`
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            let _ = writeln!(out, "{}", dump_rule(rule));
        }
        out
    }
}

fn check_body_decls(
    rule: &str,
    body: &[BodyItem],
    decls: &HashMap<(String, usize), FunctorDecl>,
) -> Result<(), EngineError> {
    for item in body {
        match item {
            BodyItem::Add(c) => match c.kind {
                Kind::UserDefined => {
                    if !decls.contains_key(&(c.functor.clone(), c.args.len())) {
                        return Err(EngineError::program(format!(
                            "rule `{rule}` adds undeclared functor {}/{}",
                            c.functor,
                            c.args.len()
                        )));
                    }
                }
                Kind::BuiltIn => {
                    if !BUILTIN_FUNCTORS.contains(&c.functor.as_str()) {
                        return Err(EngineError::program(format!(
                            "rule `{rule}` posts unknown built-in `{}`",
                            c.functor
                        )));
                    }
                }
            },
            BodyItem::Call(_) | BodyItem::Apply { .. } => {}
            BodyItem::Disjunction(branches) => {
                for b in branches {
                    check_body_decls(rule, b, decls)?;
                }
            }
        }
    }
    Ok(())
}

pub fn dump_rule(rule: &ChrRule) -> String {
    let mut s = format!("{} @ ", rule.name);
    let heads = |hs: &[HeadPat]| {
        hs.iter()
            .map(|h| {
                let mut t = display_functor(&h.functor, &h.args);
                if let Some(time) = &h.time {
                    t = format!("{t} @ {time}");
                }
                t
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    if rule.is_propagation() {
        s.push_str(&heads(&rule.kept));
        s.push_str(" ==> ");
    } else if rule.is_simplification() {
        s.push_str(&heads(&rule.removed));
        s.push_str(" <=> ");
    } else {
        s.push_str(&heads(&rule.kept));
        s.push_str(" \\ ");
        s.push_str(&heads(&rule.removed));
        s.push_str(" <=> ");
    }
    if !rule.guard.is_empty() {
        let gs: Vec<String> = rule.guard.iter().map(dump_guard).collect();
        s.push_str(&gs.join(", "));
        s.push_str(" | ");
    }
    if rule.body.is_empty() {
        s.push_str("true");
    } else {
        let bs: Vec<String> = rule.body.iter().map(dump_body_item).collect();
        s.push_str(&bs.join(", "));
    }
    s.push('.');
    s
}

fn dump_guard(g: &GuardAtom) -> String {
    let inner = match &g.test {
        GuardTest::Match(a, b) => format!("{a} = {b}"),
        GuardTest::NotIdentical(a, b) => format!("{a} ≠ {b}"),
        GuardTest::Lt(a, b) => format!("{a} < {b}"),
        GuardTest::Le(a, b) => format!("{a} ≤ {b}"),
        GuardTest::Gt(a, b) => format!("{a} > {b}"),
        GuardTest::Ge(a, b) => format!("{a} ≥ {b}"),
        GuardTest::Ground(t) => format!("ground({t})"),
        GuardTest::Integer(t) => format!("integer({t})"),
        GuardTest::IsList(t) => format!("is_list({t})"),
        GuardTest::Member(x, l) => format!("member({x}, {l})"),
        GuardTest::NotMember(x, l) => format!("not_member({x}, {l})"),
        GuardTest::True => "true".to_string(),
    };
    if g.negated {
        format!("¬{inner}")
    } else {
        inner
    }
}

fn dump_body_item(item: &BodyItem) -> String {
    match item {
        BodyItem::Add(c) => c.to_string(),
        BodyItem::Call(t) => format!("call({t})"),
        BodyItem::Apply { target, extra } => {
            let args: Vec<String> = extra.iter().map(|t| t.to_string()).collect();
            format!("apply({target}, {})", args.join(", "))
        }
        BodyItem::Disjunction(branches) => {
            let bs: Vec<String> = branches
                .iter()
                .map(|b| b.iter().map(dump_body_item).collect::<Vec<_>>().join(", "))
                .collect();
            format!("({})", bs.join(" ; "))
        }
    }
}
