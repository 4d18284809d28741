//! Terse constructors for writing rule packs and tests.

use super::constraint::Constraint;
use super::rule::{BodyItem, ChrRule, GuardAtom, GuardTest, HeadPat};
use super::term::Term;

/// Pattern variable (`id == 0`), keyed by name within one rule.
pub fn v(name: &str) -> Term {
    Term::Var(super::term::Var { name: name.to_string(), id: 0 })
}

pub fn a(name: &str) -> Term {
    Term::atom(name)
}

pub fn i(n: i64) -> Term {
    Term::Int(n)
}

pub fn s(text: &str) -> Term {
    Term::Str(text.to_string())
}

pub fn t(functor: &str, args: Vec<Term>) -> Term {
    Term::compound(functor, args)
}

/// `@(inner, time)`: a time-qualified formula term.
pub fn at(inner: Term, time: Term) -> Term {
    Term::compound("@", vec![inner, time])
}

pub fn head(functor: &str, args: Vec<Term>) -> HeadPat {
    HeadPat { functor: functor.to_string(), args, time: None }
}

pub fn head_at(functor: &str, args: Vec<Term>, time: Term) -> HeadPat {
    HeadPat { functor: functor.to_string(), args, time: Some(time) }
}

pub fn add(functor: &str, args: Vec<Term>) -> BodyItem {
    BodyItem::Add(Constraint::user(functor, args))
}

pub fn add_at(functor: &str, args: Vec<Term>, time: Term) -> BodyItem {
    BodyItem::Add(Constraint::user_at(functor, args, time))
}

/// Built-in equality (unification) in a body.
pub fn unify(lhs: Term, rhs: Term) -> BodyItem {
    BodyItem::Add(Constraint::builtin("=", vec![lhs, rhs]))
}

pub fn builtin(functor: &str, args: Vec<Term>) -> BodyItem {
    BodyItem::Add(Constraint::builtin(functor, args))
}

pub fn fail_body() -> Vec<BodyItem> {
    vec![BodyItem::Add(Constraint::builtin("fail", vec![]))]
}

pub fn call(term: Term) -> BodyItem {
    BodyItem::Call(term)
}

pub fn apply(target: Term, extra: Vec<Term>) -> BodyItem {
    BodyItem::Apply { target, extra }
}

pub fn branch(items: Vec<BodyItem>) -> Vec<BodyItem> {
    items
}

pub fn disj(branches: Vec<Vec<BodyItem>>) -> BodyItem {
    BodyItem::Disjunction(branches)
}

// guards

pub fn g_match(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Match(a, b))
}

/// The `X ≠ Y` side condition: syntactic distinctness after dereferencing.
pub fn g_ne(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::NotIdentical(a, b))
}

pub fn g_ground(t: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Ground(t))
}

pub fn g_integer(t: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Integer(t))
}

pub fn g_is_list(t: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::IsList(t))
}

pub fn g_not_list(t: Term) -> GuardAtom {
    GuardAtom::neg(GuardTest::IsList(t))
}

pub fn g_not_member(x: Term, l: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::NotMember(x, l))
}

pub fn g_lt(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Lt(a, b))
}

pub fn g_le(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Le(a, b))
}

pub fn g_gt(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Gt(a, b))
}

pub fn g_ge(a: Term, b: Term) -> GuardAtom {
    GuardAtom::pos(GuardTest::Ge(a, b))
}

/// Builds a rule. Simplification: empty `kept`; propagation: empty
/// `removed`; both non-empty: simpagation.
pub fn rule(
    name: &str,
    kept: Vec<HeadPat>,
    removed: Vec<HeadPat>,
    guard: Vec<GuardAtom>,
    body: Vec<BodyItem>,
) -> ChrRule {
    ChrRule { name: name.to_string(), kept, removed, guard, body }
}

pub fn simplification(name: &str, removed: Vec<HeadPat>, guard: Vec<GuardAtom>, body: Vec<BodyItem>) -> ChrRule {
    rule(name, vec![], removed, guard, body)
}

pub fn propagation(name: &str, kept: Vec<HeadPat>, guard: Vec<GuardAtom>, body: Vec<BodyItem>) -> ChrRule {
    rule(name, kept, vec![], guard, body)
}

pub fn simpagation(
    name: &str,
    kept: Vec<HeadPat>,
    removed: Vec<HeadPat>,
    guard: Vec<GuardAtom>,
    body: Vec<BodyItem>,
) -> ChrRule {
    rule(name, kept, removed, guard, body)
}

/// Proper list term.
pub fn list(items: Vec<Term>) -> Term {
    Term::list(items)
}

/// `[Head | Tail]` pattern.
pub fn cons(head: Term, tail: Term) -> Term {
    Term::cons(head, tail)
}

pub fn nil() -> Term {
    Term::nil()
}
