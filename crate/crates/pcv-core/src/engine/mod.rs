//! The committed-choice guarded rewriting engine.
//!
//! Guarded rules rewrite a store of user-defined constraints until nothing
//! more applies; built-in constraints are solved directly against the
//! binding map. Simplification rules replace their heads, propagation
//! rules keep them and add the body, simpagation rules keep the heads
//! before the `\` and remove the rest.

pub mod constraint;
pub mod dsl;
pub mod rule;
pub mod solve;
pub mod store;
pub mod term;

pub use constraint::{Constraint, FunctorDecl, Kind, BUILTIN_FUNCTORS};
pub use rule::{dump_rule, BodyItem, ChrRule, GuardAtom, GuardTest, HandlerPack, HeadPat, RuleProgram, LABELING};
pub use solve::{
    solve, Env, FireOutcome, Mark, Match, RunOutcome, SearchState, Solution, SolveOptions,
    SolveResult, DEFAULT_BUDGET,
};
pub use store::{ConstraintId, ConstraintStore, StoreStatus, UnifyOutcome};
pub use term::{Term, Var};

use thiserror::Error;

/// Engine misuse: malformed rules, undeclared functors, stale snapshot
/// marks, posting non-constraints. Distinct from failed stores, which are
/// ordinary search outcomes.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("program error: {0}")]
    Program(String),
}

impl EngineError {
    pub fn program(msg: impl Into<String>) -> EngineError {
        EngineError::Program(msg.into())
    }
}

#[cfg(test)]
mod tests;
