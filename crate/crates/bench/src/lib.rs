//! Benchmark fixtures.

use xintseq::{Context, IpSequence, Space};

/// The self "meets" context of `S_c^(r)`.
pub fn meets_context(caps: &[u32], rank: usize) -> (Space, Context) {
    let space = Space::new(IpSequence::new(caps.to_vec()).expect("valid caps"), rank).expect("valid rank");
    let ctx = Context::meets(&space, &space).expect("nonempty space");
    (space, ctx)
}
