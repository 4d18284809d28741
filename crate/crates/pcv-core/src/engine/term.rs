//! First-order terms: the universal currency of the engine.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_VAR: AtomicU64 = AtomicU64::new(1);

/// A logic variable. `id` is globally unique for allocated variables;
/// rule patterns use `id == 0` and are keyed by name until firing
/// instantiates them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub id: u64,
}

impl Var {
    pub fn fresh(name: impl Into<String>) -> Var {
        Var { name: name.into(), id: NEXT_VAR.fetch_add(1, Ordering::Relaxed) }
    }

    pub fn is_pattern(&self) -> bool {
        self.id == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Atom(String),
    Int(i64),
    Str(String),
    Compound(String, Vec<Term>),
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn atom(s: impl Into<String>) -> Term {
        Term::Atom(s.into())
    }

    pub fn compound(f: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Compound(f.into(), args)
    }

    pub fn nil() -> Term {
        Term::Atom(NIL.into())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(CONS.into(), vec![head, tail])
    }

    /// Builds a proper list term.
    pub fn list<I: IntoIterator<Item = Term>>(items: I) -> Term
    where
        I::IntoIter: DoubleEndedIterator,
    {
        let mut t = Term::nil();
        for item in items.into_iter().rev() {
            t = Term::cons(item, t);
        }
        t
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(a) if a == NIL)
    }

    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(f, args) if f == CONS && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) | Term::Str(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Collects the ids of all allocated variables in the term.
    pub fn collect_var_ids(&self, out: &mut Vec<u64>) {
        match self {
            Term::Var(v) => out.push(v.id),
            Term::Atom(_) | Term::Int(_) | Term::Str(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_var_ids(out);
                }
            }
        }
    }

    /// Collects pattern variable names (unallocated, `id == 0`).
    pub fn collect_pattern_names<'t>(&'t self, out: &mut Vec<&'t str>) {
        match self {
            Term::Var(v) if v.is_pattern() => out.push(&v.name),
            Term::Var(_) | Term::Atom(_) | Term::Int(_) | Term::Str(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_pattern_names(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => {
                if v.id == 0 {
                    write!(f, "{}", v.name)
                } else {
                    write!(f, "_{}{}", v.name, v.id)
                }
            }
            Term::Atom(a) => write!(f, "{a}"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Str(s) => write!(f, "{s:?}"),
            Term::Compound(functor, args) if functor == CONS && args.len() == 2 => {
                write!(f, "[")?;
                let mut tail = self;
                let mut first = true;
                loop {
                    match tail {
                        Term::Compound(c, a2) if c == CONS && a2.len() == 2 => {
                            if !first {
                                write!(f, ", ")?;
                            }
                            first = false;
                            write!(f, "{}", a2[0])?;
                            tail = &a2[1];
                        }
                        t if t.is_nil() => break,
                        other => {
                            write!(f, " | {other}")?;
                            break;
                        }
                    }
                }
                write!(f, "]")
            }
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_ids_are_unique() {
        let a = Var::fresh("X");
        let b = Var::fresh("X");
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn list_roundtrip() {
        let t = Term::list(vec![Term::Int(1), Term::Int(2)]);
        let (h, rest) = t.as_cons().unwrap();
        assert_eq!(h, &Term::Int(1));
        let (h2, nil) = rest.as_cons().unwrap();
        assert_eq!(h2, &Term::Int(2));
        assert!(nil.is_nil());
        assert_eq!(t.to_string(), "[1, 2]");
    }
}
