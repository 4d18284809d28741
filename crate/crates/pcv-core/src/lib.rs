//! Consistency verification for security policies and workflow
//! definitions, built as layers over a committed-choice guarded
//! constraint-rewriting engine:
//!
//! 1. the engine itself ([`engine`]);
//! 2. kernel handler packs for order/equality, sets and cardinality
//!    ([`kernel`]);
//! 3. the policy and workflow constraint handlers ([`spl`], [`wpdl`]);
//! 4. rules compiled from the parsed specifications (also [`spl`] and
//!    [`wpdl`]);
//! 5. the inconsistency goals run on top ([`goals`]).

pub mod engine;
pub mod goals;
pub mod kernel;
pub mod spl;
pub mod wpdl;
