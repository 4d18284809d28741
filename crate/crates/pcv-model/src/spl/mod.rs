//! The SPL-subset policy language: model, parser and direct evaluation.
//!
//! A policy is a structure of sets and rules. A rule maps an event to one
//! of three values — allow, deny, notapply — represented by a pair of
//! boolean expressions: the applicability domain and the acceptability
//! expression. Rules compose through a tri-valued algebra (AND, OR, NOT,
//! FORALL, EXIST); each policy designates a single query rule (`?name:`)
//! that defines its behaviour.

pub mod ast;
pub mod eval;
pub mod parser;

pub use ast::{
    BoolExpr, CmpOp, EventProp, ParamSort, PathStep, SplParam, SplPolicyModel, SplRuleExpr,
    TriValue, ValExpr,
};
pub use eval::{bind_env, evaluate_tri, EvalError, SetEnv};
pub use parser::parse_spl;
