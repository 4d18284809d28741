//! Source-level models for the pcv consistency verifier.
//!
//! This crate holds everything that can be said about a verification problem
//! *before* any constraint solving happens: parsed policy and workflow
//! models, finite verification domains, ground events, tri-valued rule
//! evaluation, and the verdict/report types shared by the solver and the
//! exhaustive oracle.
//!
//! It deliberately knows nothing about the rewriting engine; the oracle
//! crate depends on this crate alone, which keeps the oracle's independence
//! a property of the crate graph rather than of discipline.

pub mod diag;
pub mod domain;
pub mod event;
pub mod lex;
pub mod spl;
pub mod value;
pub mod verdict;
pub mod wpdl;

pub use diag::ParseError;
pub use domain::DomainSpec;
pub use event::GroundEvent;
pub use spl::{SplPolicyModel, TriValue};
pub use value::Value;
pub use verdict::{Assumption, GoalKind, GoalReport, RuleTarget, RunStats, Search, Verdict, Witness};
pub use wpdl::WorkflowModel;
