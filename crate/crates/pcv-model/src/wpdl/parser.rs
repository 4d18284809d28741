//! Parser and validation for `.wf` workflow files.
//!
//! ```text
//! workflow Expense {
//!   participant Clerk : role;
//!   participant Boss  : role;
//!   object Budget : budget(Cost);
//!   activity a0 { performer Clerk; action "Build";   target Budget; split xor [t0, t1]; }
//!   activity a1 { performer Clerk; action "Approve"; target Budget; }
//!   activity a2 { performer Boss;  action "Approve"; target Budget; }
//!   transition t0 { from a0; to a1; when Cost < 1000; }
//!   transition t1 { from a0; to a2; }
//!   start a0;
//!   end a1, a2;
//! }
//! ```
//!
//! `dummy name { ... }` declares a routing activity. `subflow name { ... }`
//! declares a one-level sub-workflow which is inlined (its activities and
//! transitions are spliced in with a `name__` prefix; transitions to/from
//! the subflow reattach to its start/end). `loop name { ... }` parses but
//! is rejected: bounded verification of loops is out of scope.

use super::ast::*;
use crate::diag::{DiagKind, ParseError};
use crate::lex::{lex, Cursor, Tok};
use crate::spl::CmpOp;
use crate::value::Value;
use std::collections::{HashMap, HashSet};

pub fn parse_workflow(file: &str, src: &str) -> Result<WorkflowModel, ParseError> {
    let toks = lex(file, src)?;
    let mut c = Cursor::new(file, &toks);
    c.expect_kw("workflow")?;
    let name = c.expect_ident()?;
    c.expect_punct("{")?;
    let mut w = RawWorkflow { name, ..RawWorkflow::default() };
    parse_body(&mut c, &mut w, true)?;
    if !c.at_eof() {
        return Err(c.err(DiagKind::Syntax, "trailing input after workflow"));
    }
    let model = w.desugar(file)?;
    validate(file, &model)?;
    Ok(model)
}

#[derive(Default)]
struct RawWorkflow {
    name: String,
    participants: Vec<Participant>,
    objects: Vec<DataObject>,
    activities: Vec<Activity>,
    transitions: Vec<Transition>,
    subflows: Vec<RawWorkflow>,
    start: Option<String>,
    ends: Vec<String>,
}

fn parse_body(c: &mut Cursor, w: &mut RawWorkflow, top: bool) -> Result<(), ParseError> {
    loop {
        if c.eat_punct("}") {
            return Ok(());
        }
        match c.peek().clone() {
            Tok::Ident(kw) if kw == "participant" => {
                c.next();
                let pname = c.expect_ident()?;
                c.expect_punct(":")?;
                let kind = match c.expect_ident()?.as_str() {
                    "person" => ParticipantKind::Person,
                    "role" => ParticipantKind::Role,
                    "application" => ParticipantKind::Application,
                    "org-unit" => ParticipantKind::OrgUnit,
                    other => {
                        return Err(c.err(DiagKind::Syntax, format!("unknown participant kind `{other}`")));
                    }
                };
                c.expect_punct(";")?;
                w.participants.push(Participant { name: pname, kind });
            }
            Tok::Ident(kw) if kw == "object" => {
                c.next();
                let oname = c.expect_ident()?;
                c.expect_punct(":")?;
                let functor = c.expect_ident()?;
                let mut fields = Vec::new();
                c.expect_punct("(")?;
                if !c.eat_punct(")") {
                    loop {
                        fields.push(c.expect_ident()?);
                        if c.eat_punct(",") {
                            continue;
                        }
                        c.expect_punct(")")?;
                        break;
                    }
                }
                c.expect_punct(";")?;
                w.objects.push(DataObject { name: oname, functor, fields });
            }
            Tok::Ident(kw) if kw == "activity" => {
                c.next();
                let a = parse_activity(c, false)?;
                w.activities.push(a);
            }
            Tok::Ident(kw) if kw == "dummy" => {
                c.next();
                let a = parse_activity(c, true)?;
                w.activities.push(a);
            }
            Tok::Ident(kw) if kw == "loop" => {
                let (line, col) = c.here();
                c.next();
                let lname = c.expect_ident()?;
                skip_block(c)?;
                // parsed, then rejected: bounded loop unrolling is out of scope
                return Err(ParseError::new(
                    &file_of(c),
                    line,
                    col,
                    DiagKind::LoopNotSupported,
                    format!("loop activity `{lname}`: unroll it manually or drop it from the model"),
                ));
            }
            Tok::Ident(kw) if kw == "subflow" => {
                let (line, col) = c.here();
                c.next();
                if !top {
                    return Err(ParseError::new(
                        &file_of(c),
                        line,
                        col,
                        DiagKind::Invalid,
                        "sub-flows may not nest (one level is supported)",
                    ));
                }
                let sname = c.expect_ident()?;
                c.expect_punct("{")?;
                let mut sub = RawWorkflow { name: sname, ..RawWorkflow::default() };
                parse_body(c, &mut sub, false)?;
                w.subflows.push(sub);
            }
            Tok::Ident(kw) if kw == "transition" => {
                c.next();
                let t = parse_transition(c)?;
                w.transitions.push(t);
            }
            Tok::Ident(kw) if kw == "start" => {
                c.next();
                if w.start.is_some() {
                    return Err(c.err(DiagKind::DuplicateName, "start declared twice"));
                }
                w.start = Some(c.expect_ident()?);
                c.expect_punct(";")?;
            }
            Tok::Ident(kw) if kw == "end" => {
                c.next();
                loop {
                    w.ends.push(c.expect_ident()?);
                    if c.eat_punct(",") {
                        continue;
                    }
                    break;
                }
                c.expect_punct(";")?;
            }
            other => {
                return Err(c.err(DiagKind::Syntax, format!("expected workflow item, found {}", other.describe())));
            }
        }
    }
}

fn file_of(c: &Cursor) -> String {
    // errors constructed away from the cursor still need the file name
    c.err(DiagKind::Syntax, "").file
}

fn skip_block(c: &mut Cursor) -> Result<(), ParseError> {
    c.expect_punct("{")?;
    let mut depth = 1usize;
    loop {
        match c.next() {
            Tok::Punct("{") => depth += 1,
            Tok::Punct("}") => {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
            Tok::Eof => return Err(c.err(DiagKind::Syntax, "unterminated block")),
            _ => {}
        }
    }
}

fn parse_activity(c: &mut Cursor, dummy: bool) -> Result<Activity, ParseError> {
    let name = c.expect_ident()?;
    c.expect_punct("{")?;
    let mut performer = None;
    let mut action = None;
    let mut target = None;
    let mut join = JoinKind::Xor;
    let mut split = SplitKind::And;
    loop {
        if c.eat_punct("}") {
            break;
        }
        match c.expect_ident()?.as_str() {
            "performer" => {
                performer = Some(c.expect_ident()?);
                c.expect_punct(";")?;
            }
            "action" => {
                action = Some(match c.next() {
                    Tok::Str(s) => Value::Str(s),
                    Tok::Ident(s) => Value::Atom(s),
                    other => {
                        return Err(c.err(DiagKind::Syntax, format!("expected action, found {}", other.describe())));
                    }
                });
                c.expect_punct(";")?;
            }
            "target" => {
                target = Some(c.expect_ident()?);
                c.expect_punct(";")?;
            }
            "join" => {
                join = match c.expect_ident()?.as_str() {
                    "and" => JoinKind::And,
                    "xor" => JoinKind::Xor,
                    other => return Err(c.err(DiagKind::Syntax, format!("unknown join kind `{other}`"))),
                };
                c.expect_punct(";")?;
            }
            "split" => {
                split = match c.expect_ident()?.as_str() {
                    "and" => SplitKind::And,
                    "xor" => {
                        c.expect_punct("[")?;
                        let mut prio = Vec::new();
                        if !c.eat_punct("]") {
                            loop {
                                prio.push(c.expect_ident()?);
                                if c.eat_punct(",") {
                                    continue;
                                }
                                c.expect_punct("]")?;
                                break;
                            }
                        }
                        SplitKind::Xor(prio)
                    }
                    other => return Err(c.err(DiagKind::Syntax, format!("unknown split kind `{other}`"))),
                };
                c.expect_punct(";")?;
            }
            other => {
                return Err(c.err(DiagKind::Syntax, format!("unknown activity field `{other}`")));
            }
        }
    }
    let kind = if dummy {
        ActivityKind::Dummy
    } else {
        let performer =
            performer.ok_or_else(|| c.err(DiagKind::Invalid, format!("activity `{name}` has no performer")))?;
        let action = action.ok_or_else(|| c.err(DiagKind::Invalid, format!("activity `{name}` has no action")))?;
        let target = target.ok_or_else(|| c.err(DiagKind::Invalid, format!("activity `{name}` has no target")))?;
        ActivityKind::Atomic { performer, action, target }
    };
    Ok(Activity { name, kind, join, split })
}

fn parse_transition(c: &mut Cursor) -> Result<Transition, ParseError> {
    let name = c.expect_ident()?;
    c.expect_punct("{")?;
    let mut from = None;
    let mut to = None;
    let mut condition = None;
    loop {
        if c.eat_punct("}") {
            break;
        }
        match c.expect_ident()?.as_str() {
            "from" => {
                from = Some(c.expect_ident()?);
                c.expect_punct(";")?;
            }
            "to" => {
                to = Some(c.expect_ident()?);
                c.expect_punct(";")?;
            }
            "when" => {
                let mut cmps = Vec::new();
                loop {
                    let field = c.expect_ident()?;
                    let op = match c.next() {
                        Tok::Punct("<") => CmpOp::Lt,
                        Tok::Punct("<=") => CmpOp::Le,
                        Tok::Punct(">") => CmpOp::Gt,
                        Tok::Punct(">=") => CmpOp::Ge,
                        Tok::Punct("=") => CmpOp::Eq,
                        Tok::Punct("!=") => CmpOp::Ne,
                        other => {
                            return Err(c.err(DiagKind::Syntax, format!("expected comparison, found {}", other.describe())));
                        }
                    };
                    let value = c.expect_int()?;
                    cmps.push(CondCmp { field, op, value });
                    if c.eat_kw("and") {
                        continue;
                    }
                    break;
                }
                c.expect_punct(";")?;
                condition = Some(cmps);
            }
            other => {
                return Err(c.err(DiagKind::Syntax, format!("unknown transition field `{other}`")));
            }
        }
    }
    let from = from.ok_or_else(|| c.err(DiagKind::Invalid, format!("transition `{name}` has no from-activity")))?;
    let to = to.ok_or_else(|| c.err(DiagKind::Invalid, format!("transition `{name}` has no to-activity")))?;
    Ok(Transition { name, from, to, condition })
}

impl RawWorkflow {
    /// Splice one level of sub-flows into the parent model.
    fn desugar(mut self, file: &str) -> Result<WorkflowModel, ParseError> {
        let subs = std::mem::take(&mut self.subflows);
        for sub in subs {
            let prefix = format!("{}__", sub.name);
            let sub_start = sub.start.clone().ok_or_else(|| {
                ParseError::new(file, 1, 1, DiagKind::MissingStartActivity, format!("sub-flow `{}`", sub.name))
            })?;
            if sub.ends.len() != 1 {
                return Err(ParseError::new(
                    file,
                    1,
                    1,
                    DiagKind::Invalid,
                    format!("sub-flow `{}` must declare exactly one end activity", sub.name),
                ));
            }
            let sub_end = sub.ends[0].clone();
            for mut a in sub.activities {
                a.name = format!("{prefix}{}", a.name);
                if let SplitKind::Xor(prio) = &mut a.split {
                    for p in prio {
                        *p = format!("{prefix}{p}");
                    }
                }
                self.activities.push(a);
            }
            for mut t in sub.transitions {
                t.name = format!("{prefix}{}", t.name);
                t.from = format!("{prefix}{}", t.from);
                t.to = format!("{prefix}{}", t.to);
                self.transitions.push(t);
            }
            self.participants.extend(sub.participants);
            self.objects.extend(sub.objects);
            // reattach the parent's references to the sub-flow
            for t in &mut self.transitions {
                if t.to == sub.name {
                    t.to = format!("{prefix}{sub_start}");
                }
                if t.from == sub.name {
                    t.from = format!("{prefix}{sub_end}");
                }
            }
            for e in &mut self.ends {
                if *e == sub.name {
                    *e = format!("{prefix}{sub_end}");
                }
            }
            if self.start.as_deref() == Some(sub.name.as_str()) {
                self.start = Some(format!("{prefix}{sub_start}"));
            }
        }
        let start = self.start.ok_or_else(|| {
            ParseError::new(file, 1, 1, DiagKind::MissingStartActivity, format!("workflow `{}`", self.name))
        })?;
        if self.ends.is_empty() {
            return Err(ParseError::new(
                file,
                1,
                1,
                DiagKind::Invalid,
                format!("workflow `{}` declares no end activity", self.name),
            ));
        }
        Ok(WorkflowModel {
            name: self.name,
            participants: self.participants,
            objects: self.objects,
            activities: self.activities,
            transitions: self.transitions,
            start,
            ends: self.ends,
        })
    }
}

fn validate(file: &str, w: &WorkflowModel) -> Result<(), ParseError> {
    let err = |kind, msg: String| ParseError::new(file, 1, 1, kind, msg);
    let mut names = HashSet::new();
    for a in &w.activities {
        if !names.insert(a.name.clone()) {
            return Err(err(DiagKind::DuplicateName, format!("activity `{}`", a.name)));
        }
    }
    for t in &w.transitions {
        if !names.insert(t.name.clone()) {
            return Err(err(DiagKind::DuplicateName, format!("transition `{}`", t.name)));
        }
    }

    let activity_names: HashSet<&str> = w.activities.iter().map(|a| a.name.as_str()).collect();
    let participant_names: HashSet<&str> = w.participants.iter().map(|p| p.name.as_str()).collect();

    if !activity_names.contains(w.start.as_str()) {
        return Err(err(DiagKind::DanglingReference, format!("start activity `{}` is not declared", w.start)));
    }
    for e in &w.ends {
        if !activity_names.contains(e.as_str()) {
            return Err(err(DiagKind::DanglingReference, format!("end activity `{e}` is not declared")));
        }
    }
    for t in &w.transitions {
        for refd in [&t.from, &t.to] {
            if !activity_names.contains(refd.as_str()) {
                return Err(err(
                    DiagKind::DanglingReference,
                    format!("transition `{}` references undeclared activity `{refd}`", t.name),
                ));
            }
        }
        if let Some(cond) = &t.condition {
            for cmp in cond {
                if w.field_object(&cmp.field).is_none() {
                    return Err(err(
                        DiagKind::UnboundName,
                        format!("transition `{}` condition uses unknown field `{}`", t.name, cmp.field),
                    ));
                }
            }
        }
    }
    // a field name must resolve to a single object
    let mut field_owner: HashMap<&str, &str> = HashMap::new();
    for o in &w.objects {
        for f in &o.fields {
            if let Some(prev) = field_owner.insert(f, &o.name) {
                return Err(err(
                    DiagKind::DuplicateName,
                    format!("field `{f}` is declared by both `{prev}` and `{}`", o.name),
                ));
            }
        }
    }
    for a in &w.activities {
        if let ActivityKind::Atomic { performer, .. } = &a.kind {
            if !participant_names.contains(performer.as_str()) {
                return Err(err(
                    DiagKind::DanglingReference,
                    format!("activity `{}` names undeclared participant `{performer}`", a.name),
                ));
            }
        }
        if let SplitKind::Xor(prio) = &a.split {
            let outgoing: HashSet<&str> = w.outgoing(&a.name).iter().map(|t| t.name.as_str()).collect();
            let listed: HashSet<&str> = prio.iter().map(|s| s.as_str()).collect();
            if listed.len() != prio.len() || listed != outgoing {
                return Err(err(
                    DiagKind::Invalid,
                    format!("activity `{}`: split priority list must be a permutation of its outgoing transitions", a.name),
                ));
            }
        }
    }

    // acyclicity (loop activities were already rejected at parse time)
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn dfs<'a>(w: &'a WorkflowModel, node: &'a str, state: &mut HashMap<&'a str, u8>) -> bool {
        match state.get(node) {
            Some(1) => return false, // back edge
            Some(2) => return true,
            _ => {}
        }
        state.insert(node, 1);
        for t in w.outgoing(node) {
            if !dfs(w, &t.to, state) {
                return false;
            }
        }
        state.insert(node, 2);
        true
    }
    for a in &w.activities {
        if !dfs(w, &a.name, &mut state) {
            return Err(err(DiagKind::CyclicGraph, "transition graph has a cycle".to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const EXPENSE: &str = r#"
        workflow Expense {
          participant Clerk : role;
          participant Boss  : role;
          object Budget : budget(Cost);
          activity a0 { performer Clerk; action "Build";   target Budget; split xor [t0, t1]; }
          activity a1 { performer Clerk; action "Approve"; target Budget; }
          activity a2 { performer Boss;  action "Approve"; target Budget; }
          transition t0 { from a0; to a1; when Cost < 1000; }
          transition t1 { from a0; to a2; }
          start a0;
          end a1, a2;
        }
    "#;

    #[test]
    fn parses_expense_workflow() {
        let w = parse_workflow("expense.wf", EXPENSE).unwrap();
        assert_eq!(w.activities.len(), 3);
        assert_eq!(w.transitions.len(), 2);
        let a0 = w.activity("a0").unwrap();
        assert_eq!(a0.split, SplitKind::Xor(vec!["t0".into(), "t1".into()]));
        assert_eq!(w.higher_priority_siblings("t1"), vec!["t0"]);
        assert!(w.transition("t1").unwrap().condition.is_none());
    }

    #[test]
    fn empty_workflow_missing_start() {
        let err = parse_workflow("w.wf", "workflow W { }").unwrap_err();
        assert_eq!(err.kind, DiagKind::MissingStartActivity);
    }

    #[test]
    fn dangling_transition_target() {
        let err = parse_workflow(
            "w.wf",
            r#"workflow W {
                 participant P : role;
                 activity a { performer P; action "x"; target t; }
                 transition t0 { from a; to ghost; }
                 start a; end a;
               }"#,
        )
        .unwrap_err();
        assert_eq!(err.kind, DiagKind::DanglingReference);
    }

    #[test]
    fn loops_are_rejected() {
        let err = parse_workflow(
            "w.wf",
            r#"workflow W { loop l0 { performer P; } start l0; end l0; }"#,
        )
        .unwrap_err();
        assert_eq!(err.kind, DiagKind::LoopNotSupported);
    }

    #[test]
    fn cycles_are_rejected() {
        let err = parse_workflow(
            "w.wf",
            r#"workflow W {
                 participant P : role;
                 activity a { performer P; action "x"; target t; }
                 activity b { performer P; action "y"; target t; }
                 transition t0 { from a; to b; }
                 transition t1 { from b; to a; }
                 start a; end b;
               }"#,
        )
        .unwrap_err();
        assert_eq!(err.kind, DiagKind::CyclicGraph);
    }

    #[test]
    fn subflow_inlines_one_level() {
        let w = parse_workflow(
            "w.wf",
            r#"workflow W {
                 participant P : role;
                 activity a { performer P; action "x"; target t; }
                 subflow S {
                   activity s1 { performer P; action "y"; target t; }
                   start s1; end s1;
                 }
                 transition t0 { from a; to S; }
                 start a; end S;
               }"#,
        )
        .unwrap();
        assert!(w.activity("S__s1").is_some());
        assert_eq!(w.transition("t0").unwrap().to, "S__s1");
        assert_eq!(w.ends, vec!["S__s1".to_string()]);
    }
}
