//! Constraints and functor declarations.

use super::term::Term;
use std::fmt;

/// User-defined constraints live in the store and are rewritten by rules;
/// built-in constraints are solved directly by the engine when posted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    UserDefined,
    BuiltIn,
}

/// The closed set of built-in constraint functors.
///
/// `cardinal` is the labeling-phase membership-count check; like `length`
/// and `member` it is "solved by the underlying solver" rather than by
/// rules.
pub const BUILTIN_FUNCTORS: &[&str] = &[
    "=", "neq", "lt", "leq", "gt", "geq", "ground", "integer", "is_list", "length", "member",
    "not_member", "true", "fail", "cardinal",
];

/// An (optionally time-qualified) constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub kind: Kind,
    pub functor: String,
    pub args: Vec<Term>,
    /// The `@T` qualifier; `None` for timeless constraints.
    pub time: Option<Term>,
}

impl Constraint {
    pub fn user(functor: impl Into<String>, args: Vec<Term>) -> Constraint {
        Constraint { kind: Kind::UserDefined, functor: functor.into(), args, time: None }
    }

    pub fn user_at(functor: impl Into<String>, args: Vec<Term>, time: Term) -> Constraint {
        Constraint { kind: Kind::UserDefined, functor: functor.into(), args, time: Some(time) }
    }

    pub fn builtin(functor: impl Into<String>, args: Vec<Term>) -> Constraint {
        Constraint { kind: Kind::BuiltIn, functor: functor.into(), args, time: None }
    }

    pub fn key(&self) -> (&str, usize) {
        (&self.functor, self.args.len())
    }

    pub fn with_time(mut self, time: Option<Term>) -> Constraint {
        self.time = time;
        self
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", display_functor(&self.functor, &self.args))?;
        if let Some(t) = &self.time {
            write!(f, " @ {t}")?;
        }
        Ok(())
    }
}

/// Renders well-known functors in the conventional infix/operator style;
/// everything else prints as `functor(args)`.
pub fn display_functor(functor: &str, args: &[Term]) -> String {
    match (functor, args) {
        ("lt", [a, b]) => format!("{a} < {b}"),
        ("leq", [a, b]) => format!("{a} ≤ {b}"),
        ("gt", [a, b]) => format!("{a} > {b}"),
        ("geq", [a, b]) => format!("{a} ≥ {b}"),
        ("eq", [a, b]) | ("=", [a, b]) => format!("{a} = {b}"),
        ("neq", [a, b]) => format!("{a} ≠ {b}"),
        ("in", [a, b]) => format!("{a} ∈ {b}"),
        ("notin", [a, b]) => format!("{a} ∉ {b}"),
        ("meet", [c, a, b]) => format!("{c} = {a} ∩ {b}"),
        ("union", [c, a, b]) => format!("{c} = {a} ∪ {b}"),
        ("restr", [c, a, r]) => format!("{c} = {a} : {r}"),
        ("card", [n, s]) => format!("{n} = |{s}|"),
        ("and", [a, b]) => format!("{a} ∧ {b}"),
        ("or", [a, b]) => format!("{a} ∨ {b}"),
        ("xor", [a, b]) => format!("{a} xor {b}"),
        ("not", [a]) => format!("¬({a})"),
        ("andr", [a, b, r]) => format!("{r} = {a} ⊗ {b}"),
        ("orr", [a, b, r]) => format!("{r} = {a} ⊕ {b}"),
        ("notr", [a, r]) => format!("{r} = ¬r({a})"),
        ("diff", [a, b]) => format!("{a} ⋄ {b}"),
        _ => {
            if args.is_empty() {
                functor.to_string()
            } else {
                let rendered: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                format!("{functor}({})", rendered.join(", "))
            }
        }
    }
}

/// Declares a functor a handler pack or compiler introduces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorDecl {
    pub functor: String,
    pub arity: usize,
    /// Whether `@T` variants of this functor may appear.
    pub timed: bool,
    /// Whether the store rejects syntactic duplicates of this functor.
    pub already_in_store: bool,
}

impl FunctorDecl {
    pub fn new(functor: impl Into<String>, arity: usize) -> FunctorDecl {
        FunctorDecl { functor: functor.into(), arity, timed: false, already_in_store: true }
    }

    pub fn timed(mut self) -> FunctorDecl {
        self.timed = true;
        self
    }

    pub fn dup_ok(mut self) -> FunctorDecl {
        self.already_in_store = false;
        self
    }
}
