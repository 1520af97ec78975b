//! Field containers and the spectral/interpolation primitives shared by all
//! other modules.
//!
//! Conventions fixed here and relied on everywhere else:
//! - fields are row-major, row index = y, column index = x;
//! - spatial frequencies are in cycles/pixel, the DFT places zero frequency
//!   at index (0, 0), the forward transform is unnormalized and the inverse
//!   carries the 1/(rows*cols) factor;
//! - interpolation is Catmull-Rom bicubic with mirror boundary handling.

mod fft;
mod field;
mod interp;
mod polar;
mod window;

pub use fft::{fft2d, fft2d_real, freq_cycles, ifft2d};
pub use field::{ComplexField, GridGeometry, ScalarField};
pub use interp::{bicubic_sample, bicubic_sample_raw, mirror_index};
pub use polar::{default_polar_bins, to_polar, PolarSpectrum};
pub(crate) use polar::bilinear_periodic as polar_bilinear;
pub use window::{gaussian_from_fwhm, GaussianWindow};
