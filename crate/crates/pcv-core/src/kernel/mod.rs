//! Layer-2 handler packs for the basic constraint predicates.

pub mod cardinality;
pub mod order;
pub mod sets;
pub mod timed;

pub use cardinality::build_cardinality_pack;
pub use order::build_order_equality_pack;
pub use sets::build_set_pack;
pub use timed::{expand_optional_times, timed_expand, with_timed_variants};

use crate::engine::HandlerPack;

/// The full kernel, in layer order.
pub fn kernel_packs() -> Vec<HandlerPack> {
    vec![build_order_equality_pack(), build_set_pack(), build_cardinality_pack()]
}
