//! Digital image correlation baseline: seeded speckle synthesis and
//! translational block matching with zero-normalized cross-correlation and
//! subpixel peak refinement.

mod correlate;
mod speckle;

pub use correlate::{auto_window, dic_displacement, DicNode, DicParams, DicResult, Subpixel};
pub use speckle::{speckle_pattern, SpeckleSpec};
