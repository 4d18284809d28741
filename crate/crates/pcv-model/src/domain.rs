//! Finite verification domains (`.dom` files).
//!
//! A domain spec names the finite universes over which goals are decided:
//! actors, actions, targets, optional parameter slots, a time horizon, and
//! the contents of every named set the policies and workflows refer to.
//! `AllEvents` is the induced product universe; see
//! [`crate::event::GroundEvent`].
//!
//! The concrete syntax:
//!
//! ```text
//! domain Office {
//!   actors  { alice, bob }
//!   actions { "SendEmail", "Read" }
//!   targets { doc1, memo }
//!   pars    { alice, bob }          # optional, one block per parameter slot
//!   horizon 3;
//!   set OrgUsers = { alice }
//!   set IDocs    = { doc1 }
//!   val Limit    = 1000             # optional named values
//! }
//! ```

use crate::diag::{DiagKind, ParseError};
use crate::event::GroundEvent;
use crate::lex::{lex, Cursor, Tok};
use crate::value::Value;

/// A named finite event universe plus set/value bindings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSpec {
    pub name: String,
    pub actors: Vec<Value>,
    pub actions: Vec<Value>,
    pub targets: Vec<Value>,
    /// One entry per event parameter slot, in slot order.
    pub par_slots: Vec<Vec<Value>>,
    pub horizon: i64,
    /// Named set contents, in declaration order.
    pub sets: Vec<(String, Vec<Value>)>,
    /// Named scalar values, in declaration order.
    pub vals: Vec<(String, Value)>,
}

impl DomainSpec {
    pub fn set(&self, name: &str) -> Option<&[Value]> {
        self.sets.iter().find(|(n, _)| n == name).map(|(_, m)| m.as_slice())
    }

    pub fn val(&self, name: &str) -> Option<&Value> {
        self.vals.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Number of ground events in the induced universe.
    pub fn event_count(&self) -> u64 {
        let pars: u64 = self.par_slots.iter().map(|s| s.len() as u64).product();
        self.actors.len() as u64
            * self.actions.len() as u64
            * self.targets.len() as u64
            * pars
            * self.horizon as u64
    }

    /// Deterministic enumeration of the full event universe, in declaration
    /// order: actor, action, target, parameter slots, time.
    pub fn enumerate_events(&self) -> Vec<GroundEvent> {
        let mut out = Vec::with_capacity(self.event_count() as usize);
        let par_choices = cross(&self.par_slots);
        for actor in &self.actors {
            for action in &self.actions {
                for target in &self.targets {
                    for pars in &par_choices {
                        for time in 1..=self.horizon {
                            out.push(GroundEvent {
                                actor: actor.clone(),
                                action: action.clone(),
                                target: target.clone(),
                                pars: pars.clone(),
                                time,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self, file: &str) -> Result<(), ParseError> {
        let empty = |what: &str| ParseError::new(file, 1, 1, DiagKind::Invalid, format!("{what} universe is empty"));
        if self.actors.is_empty() {
            return Err(empty("actors"));
        }
        if self.actions.is_empty() {
            return Err(empty("actions"));
        }
        if self.targets.is_empty() {
            return Err(empty("targets"));
        }
        for (i, slot) in self.par_slots.iter().enumerate() {
            if slot.is_empty() {
                return Err(empty(&format!("pars[{}]", i + 1)));
            }
        }
        if self.horizon < 1 {
            return Err(ParseError::new(file, 1, 1, DiagKind::Invalid, "horizon must be at least 1"));
        }
        Ok(())
    }
}

fn cross(slots: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
    for slot in slots {
        let mut next = Vec::with_capacity(acc.len() * slot.len());
        for prefix in &acc {
            for v in slot {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        acc = next;
    }
    acc
}

pub fn parse_domain(file: &str, src: &str) -> Result<DomainSpec, ParseError> {
    let toks = lex(file, src)?;
    let mut c = Cursor::new(file, &toks);
    c.expect_kw("domain")?;
    let name = c.expect_ident()?;
    c.expect_punct("{")?;

    let mut actors = None;
    let mut actions = None;
    let mut targets = None;
    let mut par_slots = Vec::new();
    let mut horizon = None;
    let mut sets: Vec<(String, Vec<Value>)> = Vec::new();
    let mut vals: Vec<(String, Value)> = Vec::new();

    loop {
        if c.eat_punct("}") {
            break;
        }
        match c.peek().clone() {
            Tok::Ident(kw) if kw == "actors" => {
                c.next();
                set_once(&mut c, &mut actors, "actors")?;
            }
            Tok::Ident(kw) if kw == "actions" => {
                c.next();
                set_once(&mut c, &mut actions, "actions")?;
            }
            Tok::Ident(kw) if kw == "targets" => {
                c.next();
                set_once(&mut c, &mut targets, "targets")?;
            }
            Tok::Ident(kw) if kw == "pars" => {
                c.next();
                par_slots.push(value_block(&mut c)?);
            }
            Tok::Ident(kw) if kw == "horizon" => {
                c.next();
                if horizon.is_some() {
                    return Err(c.err(DiagKind::DuplicateName, "horizon declared twice"));
                }
                horizon = Some(c.expect_int()?);
                c.eat_punct(";");
            }
            Tok::Ident(kw) if kw == "set" => {
                c.next();
                let sname = c.expect_ident()?;
                if sets.iter().any(|(n, _)| *n == sname) {
                    return Err(c.err(DiagKind::DuplicateName, format!("set `{sname}` declared twice")));
                }
                c.expect_punct("=")?;
                let members = value_block(&mut c)?;
                sets.push((sname, members));
            }
            Tok::Ident(kw) if kw == "val" => {
                c.next();
                let vname = c.expect_ident()?;
                if vals.iter().any(|(n, _)| *n == vname) {
                    return Err(c.err(DiagKind::DuplicateName, format!("val `{vname}` declared twice")));
                }
                c.expect_punct("=")?;
                let v = parse_value(&mut c)?;
                c.eat_punct(";");
                vals.push((vname, v));
            }
            other => {
                return Err(c.err(DiagKind::Syntax, format!("expected domain item, found {}", other.describe())));
            }
        }
    }

    let missing = |what: &str, c: &Cursor| c.err(DiagKind::Invalid, format!("domain is missing `{what}`"));
    let spec = DomainSpec {
        name,
        actors: actors.ok_or_else(|| missing("actors", &c))?,
        actions: actions.ok_or_else(|| missing("actions", &c))?,
        targets: targets.ok_or_else(|| missing("targets", &c))?,
        par_slots,
        horizon: horizon.ok_or_else(|| missing("horizon", &c))?,
        sets,
        vals,
    };
    spec.validate(file)?;
    Ok(spec)
}

fn set_once(c: &mut Cursor, slot: &mut Option<Vec<Value>>, what: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(c.err(DiagKind::DuplicateName, format!("`{what}` declared twice")));
    }
    *slot = Some(value_block(c)?);
    Ok(())
}

fn value_block(c: &mut Cursor) -> Result<Vec<Value>, ParseError> {
    c.expect_punct("{")?;
    let mut out = Vec::new();
    if !c.eat_punct("}") {
        loop {
            out.push(parse_value(c)?);
            if c.eat_punct(",") {
                continue;
            }
            c.expect_punct("}")?;
            break;
        }
    }
    Ok(out)
}

fn parse_value(c: &mut Cursor) -> Result<Value, ParseError> {
    match c.next() {
        Tok::Ident(s) => Ok(Value::Atom(s)),
        Tok::Str(s) => Ok(Value::Str(s)),
        Tok::Int(n) => Ok(Value::Int(n)),
        other => Err(c.err(DiagKind::Syntax, format!("expected value, found {}", other.describe()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_counts() {
        let d = parse_domain(
            "d.dom",
            r#"domain Office {
                actors { alice, bob }
                actions { "Send" }
                targets { doc }
                horizon 2;
                set S = { alice }
            }"#,
        )
        .unwrap();
        assert_eq!(d.event_count(), 4);
        assert_eq!(d.enumerate_events().len(), 4);
        assert_eq!(d.set("S"), Some(&[Value::atom("alice")][..]));
    }

    #[test]
    fn rejects_empty_universe() {
        let err = parse_domain(
            "d.dom",
            r#"domain D { actors { a } actions { } targets { t } horizon 1; }"#,
        )
        .unwrap_err();
        assert_eq!(err.kind, DiagKind::Invalid);
    }

    #[test]
    fn par_slots_multiply() {
        let d = parse_domain(
            "d.dom",
            r#"domain D {
                actors { a, b } actions { "x" } targets { t }
                pars { a, b } pars { u }
                horizon 3;
            }"#,
        )
        .unwrap();
        #[allow(clippy::identity_op)] // |actors|·|actions|·|targets|·pars·horizon
        let expected = 2 * 1 * 1 * 2 * 1 * 3;
        assert_eq!(d.event_count(), expected);
        assert!(d.enumerate_events().iter().all(|e| e.pars.len() == 2));
    }
}
