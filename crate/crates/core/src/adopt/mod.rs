//! Phase-based displacement estimation from periodic textures.
//!
//! The estimator detects the two lattice orientations in the reference
//! spectrum, isolates the first harmonic of each with Gaussian angle/radius
//! filters, forms the partial oriented analytic signal, extracts the wrapped
//! per-orientation displacement from the phase of the Hermitian product of
//! reference and deformed analytic signals, unwraps it with a
//! reliability-sorted non-path-following algorithm, and projects the two
//! scalar estimates back onto the image axes.

mod analytic;
mod demod;
mod filter;
mod orientation;
mod unwrap;

pub use analytic::{
    analytic_spectrum, oriented_analytic, oriented_analytic_complex, wrapped_displacement,
    WrappedPhaseField,
};
pub use demod::{demodulate, demodulate_axis, resolution_limit, Axis, DemodInfo, DemodResult};
pub use filter::{orientation_filter, AdoptConfig, RhoCenter};
pub use orientation::{detect_orientations, OrientationEstimate};
pub use unwrap::unwrap_phase;
