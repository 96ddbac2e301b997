//! Z-indexed vectors, weight sequences and weight products.

mod logmag;
mod weights;
mod zvector;

pub use logmag::{LogMag, LINEAR_LIMIT};
pub use weights::{Idx, WeightRule, WeightSequence};
pub use zvector::{apply_shift, pnorm, Entry, PExp, ZVector};
