//! Recursive-descent parser for `.spl` policy files.
//!
//! ```text
//! policy Private( user set OrgUsers ) {
//!   object set IDocs;
//!   ?Private:
//!     event.action = "SendEmail" & event.target IN IDocs
//!     :: event.par[1] IN OrgUsers
//! }
//! ```
//!
//! Rule-level composition uses `AND`, `OR`, `NOT`, `FORALL v IN Set { .. }`,
//! `EXIST v IN Set { .. }` and bare rule names as references; a simple rule
//! is `domain-expr :: accept-expr`. Boolean expressions use `&`, `|`, `!`,
//! comparisons, `IN`, `true`/`false`, and `event.author/action/target/time`
//! plus `event.par[i]`.

use super::ast::*;
use crate::diag::{DiagKind, ParseError};
use crate::lex::{lex, Cursor, Tok};
use crate::value::Value;
use std::collections::HashSet;

const RESERVED: &[&str] = &[
    "policy", "set", "global", "user", "object", "value", "val", "IN", "AND", "OR", "NOT", "EXIST",
    "FORALL", "event", "true", "false",
];

pub fn parse_spl(file: &str, src: &str) -> Result<SplPolicyModel, ParseError> {
    let toks = lex(file, src)?;
    let mut c = Cursor::new(file, &toks);
    c.expect_kw("policy")?;
    let name = c.expect_ident()?;

    let mut params = Vec::new();
    if c.eat_punct("(") && !c.eat_punct(")") {
        loop {
            params.push(parse_param(&mut c)?);
            if c.eat_punct(",") {
                continue;
            }
            c.expect_punct(")")?;
            break;
        }
    }
    c.expect_punct("{")?;

    let mut internal_sets = Vec::new();
    let mut global_sets = Vec::new();
    let mut rules: Vec<(String, SplRuleExpr)> = Vec::new();
    let mut query_rule: Option<String> = None;

    loop {
        if c.eat_punct("}") {
            break;
        }
        if c.eat_kw("global") {
            c.expect_kw("set")?;
            let n = c.expect_ident()?;
            c.expect_punct(";")?;
            global_sets.push(n);
            continue;
        }
        if let Some(sort) = peek_sort(&c) {
            c.next();
            c.expect_kw("set")?;
            let n = c.expect_ident()?;
            c.expect_punct(";")?;
            internal_sets.push((n, sort));
            continue;
        }
        // rule declaration: `?name:` marks the query rule
        let is_query = c.eat_punct("?");
        let rname = c.expect_ident()?;
        if RESERVED.contains(&rname.as_str()) {
            return Err(c.err(DiagKind::Syntax, format!("`{rname}` is a reserved word")));
        }
        c.expect_punct(":")?;
        let expr = parse_rule_expr(&mut c)?;
        if rules.iter().any(|(n, _)| *n == rname) {
            return Err(c.err(DiagKind::DuplicateName, format!("rule `{rname}` declared twice")));
        }
        if is_query {
            if query_rule.is_some() {
                return Err(c.err(DiagKind::DuplicateName, "more than one query rule"));
            }
            query_rule = Some(rname.clone());
        }
        rules.push((rname, expr));
    }
    if !c.at_eof() {
        return Err(c.err(DiagKind::Syntax, "trailing input after policy"));
    }

    let query_rule = query_rule.ok_or_else(|| {
        ParseError::new(file, 1, 1, DiagKind::MissingQueryRule, format!("policy `{name}` has no `?name:` query rule"))
    })?;

    let model = SplPolicyModel { name, params, internal_sets, global_sets, rules, query_rule };
    validate(file, &model)?;
    Ok(model)
}

fn peek_sort(c: &Cursor) -> Option<ParamSort> {
    match c.peek() {
        Tok::Ident(s) if s == "user" => Some(ParamSort::UserSet),
        Tok::Ident(s) if s == "object" => Some(ParamSort::ObjectSet),
        Tok::Ident(s) if s == "value" => Some(ParamSort::Value),
        _ => None,
    }
}

fn parse_param(c: &mut Cursor) -> Result<SplParam, ParseError> {
    match peek_sort(c) {
        Some(ParamSort::Value) => {
            c.next();
            c.eat_kw("set"); // `value set N` and `value N` both read as a value binding
            let name = c.expect_ident()?;
            Ok(SplParam { name, sort: ParamSort::Value })
        }
        Some(sort) => {
            c.next();
            c.expect_kw("set")?;
            let name = c.expect_ident()?;
            Ok(SplParam { name, sort })
        }
        None => Err(c.err(DiagKind::Syntax, format!("expected parameter sort, found {}", c.peek().describe()))),
    }
}

// --- rule expressions -------------------------------------------------

fn parse_rule_expr(c: &mut Cursor) -> Result<SplRuleExpr, ParseError> {
    let mut lhs = parse_rule_and(c)?;
    while c.eat_kw("OR") {
        let rhs = parse_rule_and(c)?;
        lhs = SplRuleExpr::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_rule_and(c: &mut Cursor) -> Result<SplRuleExpr, ParseError> {
    let mut lhs = parse_rule_unary(c)?;
    while c.eat_kw("AND") {
        let rhs = parse_rule_unary(c)?;
        lhs = SplRuleExpr::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_rule_unary(c: &mut Cursor) -> Result<SplRuleExpr, ParseError> {
    if c.eat_kw("NOT") {
        let inner = parse_rule_unary(c)?;
        return Ok(SplRuleExpr::Not(Box::new(inner)));
    }
    if c.eat_kw("FORALL") {
        return parse_quantifier(c, true);
    }
    if c.eat_kw("EXIST") {
        return parse_quantifier(c, false);
    }

    // A simple rule (`expr :: expr`), a parenthesized rule expression, or a
    // rule reference. Try the simple form first and fall back.
    let mark = c.save();
    match try_parse_simple(c) {
        Ok(simple) => Ok(simple),
        Err(simple_err) => {
            c.restore(mark);
            if c.eat_punct("(") {
                let inner = parse_rule_expr(c)?;
                c.expect_punct(")")?;
                return Ok(inner);
            }
            if let Tok::Ident(name) = c.peek().clone() {
                if !RESERVED.contains(&name.as_str()) {
                    c.next();
                    return Ok(SplRuleExpr::Ref(name));
                }
            }
            Err(simple_err)
        }
    }
}

fn parse_quantifier(c: &mut Cursor, forall: bool) -> Result<SplRuleExpr, ParseError> {
    let var = c.expect_ident()?;
    c.expect_kw("IN")?;
    let set = c.expect_ident()?;
    c.expect_punct("{")?;
    let body = parse_rule_expr(c)?;
    c.expect_punct("}")?;
    Ok(if forall {
        SplRuleExpr::ForAll { var, set, body: Box::new(body) }
    } else {
        SplRuleExpr::Exists { var, set, body: Box::new(body) }
    })
}

fn try_parse_simple(c: &mut Cursor) -> Result<SplRuleExpr, ParseError> {
    let domain = parse_bool_or(c)?;
    c.expect_punct("::")?;
    let accept = parse_bool_or(c)?;
    Ok(SplRuleExpr::Simple { domain, accept })
}

// --- boolean expressions ----------------------------------------------

fn parse_bool_or(c: &mut Cursor) -> Result<BoolExpr, ParseError> {
    let mut lhs = parse_bool_and(c)?;
    while c.eat_punct("|") {
        let rhs = parse_bool_and(c)?;
        lhs = BoolExpr::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_bool_and(c: &mut Cursor) -> Result<BoolExpr, ParseError> {
    let mut lhs = parse_bool_not(c)?;
    while c.eat_punct("&") {
        let rhs = parse_bool_not(c)?;
        lhs = BoolExpr::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_bool_not(c: &mut Cursor) -> Result<BoolExpr, ParseError> {
    if c.eat_punct("!") {
        let inner = parse_bool_not(c)?;
        return Ok(BoolExpr::Not(Box::new(inner)));
    }
    parse_bool_atom(c)
}

fn parse_bool_atom(c: &mut Cursor) -> Result<BoolExpr, ParseError> {
    if c.eat_kw("true") {
        return Ok(BoolExpr::Const(true));
    }
    if c.eat_kw("false") {
        return Ok(BoolExpr::Const(false));
    }
    if c.eat_punct("(") {
        let inner = parse_bool_or(c)?;
        c.expect_punct(")")?;
        return Ok(inner);
    }
    let lhs = parse_val_expr(c)?;
    if c.eat_kw("IN") {
        let set = c.expect_ident()?;
        return Ok(BoolExpr::In { elem: lhs, set });
    }
    let op = match c.peek() {
        Tok::Punct("=") => CmpOp::Eq,
        Tok::Punct("!=") => CmpOp::Ne,
        Tok::Punct("<") => CmpOp::Lt,
        Tok::Punct("<=") => CmpOp::Le,
        Tok::Punct(">") => CmpOp::Gt,
        Tok::Punct(">=") => CmpOp::Ge,
        other => {
            return Err(c.err(
                DiagKind::Syntax,
                format!("expected comparison or `IN`, found {}", other.describe()),
            ))
        }
    };
    c.next();
    let rhs = parse_val_expr(c)?;
    Ok(BoolExpr::Cmp { op, lhs, rhs })
}

fn parse_val_expr(c: &mut Cursor) -> Result<ValExpr, ParseError> {
    match c.peek().clone() {
        Tok::Str(s) => {
            c.next();
            Ok(ValExpr::Lit(Value::Str(s)))
        }
        Tok::Int(n) => {
            c.next();
            Ok(ValExpr::Lit(Value::Int(n)))
        }
        Tok::Ident(s) if s == "event" => {
            c.next();
            c.expect_punct(".")?;
            let prop = c.expect_ident()?;
            let prop = match prop.as_str() {
                "author" => EventProp::Author,
                "action" => EventProp::Action,
                "target" => EventProp::Target,
                "time" => EventProp::Time,
                "par" => {
                    c.expect_punct("[")?;
                    let idx = c.expect_int()?;
                    c.expect_punct("]")?;
                    if idx < 1 {
                        return Err(c.err(DiagKind::Invalid, "par indexes are 1-based"));
                    }
                    EventProp::Par(idx as usize)
                }
                other => {
                    return Err(c.err(DiagKind::Syntax, format!("unknown event property `{other}`")));
                }
            };
            Ok(ValExpr::Prop(prop))
        }
        Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
            c.next();
            Ok(ValExpr::Name(s))
        }
        other => Err(c.err(DiagKind::Syntax, format!("expected value expression, found {}", other.describe()))),
    }
}

// --- validation ---------------------------------------------------------

fn validate(file: &str, model: &SplPolicyModel) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for p in &model.params {
        if !seen.insert(p.name.clone()) {
            return Err(ParseError::new(file, 1, 1, DiagKind::DuplicateName, format!("parameter `{}`", p.name)));
        }
    }
    for (n, _) in &model.internal_sets {
        if !seen.insert(n.clone()) {
            return Err(ParseError::new(file, 1, 1, DiagKind::DuplicateName, format!("set `{n}`")));
        }
    }
    for n in &model.global_sets {
        if !seen.insert(n.clone()) {
            return Err(ParseError::new(file, 1, 1, DiagKind::DuplicateName, format!("global set `{n}`")));
        }
    }

    let sets: HashSet<&str> = model.set_names().into_iter().collect();
    let value_names: HashSet<&str> = model
        .params
        .iter()
        .filter(|p| p.sort == ParamSort::Value)
        .map(|p| p.name.as_str())
        .collect();
    let rule_names: HashSet<&str> = model.rules.iter().map(|(n, _)| n.as_str()).collect();

    for (rname, expr) in &model.rules {
        let mut scope: Vec<String> = Vec::new();
        check_rule(file, rname, expr, &sets, &value_names, &rule_names, &mut scope)?;
    }

    // rule reference graph must be acyclic
    let mut visiting = HashSet::new();
    let mut done = HashSet::new();
    for (rname, _) in &model.rules {
        check_acyclic(file, model, rname, &mut visiting, &mut done)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn check_rule(
    file: &str,
    rname: &str,
    expr: &SplRuleExpr,
    sets: &HashSet<&str>,
    value_names: &HashSet<&str>,
    rule_names: &HashSet<&str>,
    scope: &mut Vec<String>,
) -> Result<(), ParseError> {
    let unbound_set = |n: &str| {
        ParseError::new(file, 1, 1, DiagKind::UnboundSet, format!("rule `{rname}` references undeclared set `{n}`"))
    };
    match expr {
        SplRuleExpr::Simple { domain, accept } => {
            check_bool(file, rname, domain, sets, value_names, scope)?;
            check_bool(file, rname, accept, sets, value_names, scope)?;
        }
        SplRuleExpr::And(l, r) | SplRuleExpr::Or(l, r) => {
            check_rule(file, rname, l, sets, value_names, rule_names, scope)?;
            check_rule(file, rname, r, sets, value_names, rule_names, scope)?;
        }
        SplRuleExpr::Not(b) => {
            check_rule(file, rname, b, sets, value_names, rule_names, scope)?;
        }
        SplRuleExpr::ForAll { var, set, body } | SplRuleExpr::Exists { var, set, body } => {
            if !sets.contains(set.as_str()) {
                return Err(unbound_set(set));
            }
            scope.push(var.clone());
            check_rule(file, rname, body, sets, value_names, rule_names, scope)?;
            scope.pop();
        }
        SplRuleExpr::Ref(name) => {
            if !rule_names.contains(name.as_str()) {
                return Err(ParseError::new(
                    file,
                    1,
                    1,
                    DiagKind::UnboundName,
                    format!("rule `{rname}` references unknown rule `{name}`"),
                ));
            }
        }
    }
    Ok(())
}

fn check_bool(
    file: &str,
    rname: &str,
    expr: &BoolExpr,
    sets: &HashSet<&str>,
    value_names: &HashSet<&str>,
    scope: &[String],
) -> Result<(), ParseError> {
    match expr {
        BoolExpr::Const(_) => Ok(()),
        BoolExpr::Not(b) => check_bool(file, rname, b, sets, value_names, scope),
        BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
            check_bool(file, rname, l, sets, value_names, scope)?;
            check_bool(file, rname, r, sets, value_names, scope)
        }
        BoolExpr::Cmp { lhs, rhs, .. } => {
            check_val(file, rname, lhs, value_names, scope)?;
            check_val(file, rname, rhs, value_names, scope)
        }
        BoolExpr::In { elem, set } => {
            if !sets.contains(set.as_str()) {
                return Err(ParseError::new(
                    file,
                    1,
                    1,
                    DiagKind::UnboundSet,
                    format!("rule `{rname}` references undeclared set `{set}`"),
                ));
            }
            check_val(file, rname, elem, value_names, scope)
        }
    }
}

fn check_val(
    file: &str,
    rname: &str,
    expr: &ValExpr,
    value_names: &HashSet<&str>,
    scope: &[String],
) -> Result<(), ParseError> {
    match expr {
        ValExpr::Prop(_) | ValExpr::Lit(_) => Ok(()),
        ValExpr::Name(n) => {
            if value_names.contains(n.as_str()) || scope.iter().any(|v| v == n) {
                Ok(())
            } else {
                Err(ParseError::new(
                    file,
                    1,
                    1,
                    DiagKind::UnboundName,
                    format!("rule `{rname}` references unknown name `{n}`"),
                ))
            }
        }
    }
}

fn check_acyclic<'m>(
    file: &str,
    model: &'m SplPolicyModel,
    rname: &'m str,
    visiting: &mut HashSet<&'m str>,
    done: &mut HashSet<&'m str>,
) -> Result<(), ParseError> {
    if done.contains(rname) {
        return Ok(());
    }
    if !visiting.insert(rname) {
        return Err(ParseError::new(
            file,
            1,
            1,
            DiagKind::CyclicRuleRef,
            format!("rule `{rname}` participates in a reference cycle"),
        ));
    }
    if let Some(expr) = model.rule(rname) {
        let mut refs = Vec::new();
        collect_refs(expr, &mut refs);
        for r in refs {
            check_acyclic(file, model, r, visiting, done)?;
        }
    }
    visiting.remove(rname);
    done.insert(rname);
    Ok(())
}

fn collect_refs<'e>(expr: &'e SplRuleExpr, out: &mut Vec<&'e str>) {
    match expr {
        SplRuleExpr::Simple { .. } => {}
        SplRuleExpr::And(l, r) | SplRuleExpr::Or(l, r) => {
            collect_refs(l, out);
            collect_refs(r, out);
        }
        SplRuleExpr::Not(b) => collect_refs(b, out),
        SplRuleExpr::ForAll { body, .. } | SplRuleExpr::Exists { body, .. } => collect_refs(body, out),
        SplRuleExpr::Ref(n) => out.push(n),
    }
}
