//! Frame-sequence pipeline: per-frame displacement estimation, rank-1
//! spatial profiles, spatio-temporal maps, directional wave isolation and
//! phase-regression dispersion curves.

mod curve;
mod profile;
mod sequence;
mod stmap;

pub use curve::{aggregate_runs, estimate_dispersion, AggregateCurve, DispersionCurve, DispersionSample};
pub use profile::rank1_profile;
pub use sequence::{per_frame_displacement, DisplacementStack, FrameMethod, FrameSequence};
pub use stmap::{build_map, isolate_incident, Direction, SpatioTemporalMap};
