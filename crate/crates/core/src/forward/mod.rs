//! Forward model: parametric wave fields built from Helmholtz potentials,
//! periodic pattern synthesis, image warping, the camera observation model,
//! and the spectral/physical constraint checks that keep a scenario valid.

mod constraints;
mod observe;
mod params;
mod pattern;
mod potential;
mod warp;

pub use constraints::{validate_constraints, ConstraintReport, HarmonicCheck};
pub use observe::{apply_observation, gaussian_blur};
pub use params::{CellKind, GridConfig, ObservationParams, PatternSpec, Scenario, WaveParams};
pub use pattern::synthesize_pattern;
pub use potential::{
    displacement_from_potentials, potential_field, DisplacementField, PotentialKind, WaveModel,
};
pub use warp::warp_pattern;
