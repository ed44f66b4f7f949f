//! Maximum-likelihood soft-decision decoding on tail-biting trellises.
//!
//! A first Viterbi pass over the unrolled trellis yields survivor costs
//! that serve as a consistent A* heuristic for a second, best-first pass
//! over per-subtrellis node copies. The two bounded-work variants close
//! each trellis node at most once or twice in the second pass.

pub mod error;
pub mod gf2;
pub mod trellis;
pub mod channel;
pub mod decoder;
pub mod codebook;
pub mod oracle;
pub mod sim;
pub mod selftest;

pub use error::{Error, Result};
