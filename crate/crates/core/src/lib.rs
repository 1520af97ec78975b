//! Estimation of in-plane wave displacement fields from images of periodic
//! surface patterns.
//!
//! The crate is organized around a forward model that deforms a periodic
//! texture with a parametric wave field ([`forward`]), a phase-based
//! demodulation estimator built on an oriented 2D analytic signal ([`adopt`]),
//! a block-matching DIC baseline ([`dic`]), statistical benchmarking
//! machinery (Fisher information, Cramér-Rao bounds, Monte-Carlo sweeps,
//! [`eval`]), and a frame-sequence pipeline that extracts dispersion curves
//! from traveling waves ([`dispersion`]).
//!
//! All field containers live in [`grid`]; file formats and plot emission in
//! [`io`] and [`plot`].

pub mod adopt;
pub mod dic;
pub mod dispersion;
pub mod eval;
pub mod forward;
pub mod grid;
pub mod io;
pub mod plot;

mod error;

pub use error::{Error, Result};
pub use grid::{ComplexField, GridGeometry, PolarSpectrum, ScalarField};
pub use forward::{
    ConstraintReport, DisplacementField, ObservationParams, PatternSpec, Scenario, WaveParams,
};
