use std::f64::consts::PI;

use num_complex::Complex64;

use crate::grid::{fft2d, fft2d_real, freq_cycles, ifft2d};
use crate::{ComplexField, Error, Result, ScalarField};

/// Low-confidence threshold: pixels whose reference analytic magnitude falls
/// below this fraction of the field maximum carry no usable carrier.
pub(crate) const CARRIER_TAU: f64 = 0.05;

/// Half-plane selection factor 1 + sign(xi . e_theta) applied to a spectrum:
/// bins on the positive side double, bins on the negative side become exactly
/// zero, bins on the dividing line keep factor 1.
pub fn analytic_spectrum(spectrum: &ComplexField, theta: f64) -> ComplexField {
    let rows = spectrum.rows();
    let cols = spectrum.cols();
    let (sin_t, cos_t) = theta.sin_cos();
    let mut out = spectrum.clone();
    for r in 0..rows {
        let xi_y = freq_cycles(r, rows);
        for c in 0..cols {
            let xi_x = freq_cycles(c, cols);
            let d = xi_x * cos_t + xi_y * sin_t;
            let factor = if d > 0.0 {
                2.0
            } else if d < 0.0 {
                0.0
            } else {
                1.0
            };
            if factor != 1.0 {
                let v = out.at(r, c);
                out.set(r, c, v * factor);
            }
        }
    }
    out
}

/// Partial oriented analytic signal: doubles the spectral half-plane on the
/// `theta` side, zeroes the opposite half-plane, leaves the dividing line
/// untouched, and returns the inverse transform.
pub fn oriented_analytic(filtered: &ScalarField, theta: f64) -> Result<ComplexField> {
    let spectrum = fft2d_real(filtered)?;
    ifft2d(&analytic_spectrum(&spectrum, theta))
}

/// Complex-field variant used when the spectrum is already at hand.
pub fn oriented_analytic_complex(field: &ComplexField, theta: f64) -> Result<ComplexField> {
    let spectrum = fft2d(field)?;
    ifft2d(&analytic_spectrum(&spectrum, theta))
}

/// Wrapped per-orientation displacement extracted from the phase of the
/// Hermitian product of reference and deformed analytic signals, plus the
/// low-confidence mask.
#[derive(Debug, Clone)]
pub struct WrappedPhaseField {
    /// Phase in radians, wrapped to (-pi, pi].
    phase: ScalarField,
    xi_p: f64,
    low_confidence: Vec<bool>,
}

impl WrappedPhaseField {
    /// Builds from a raw wrapped-phase field; values must already lie in
    /// (-pi, pi].
    pub fn from_phase(phase: ScalarField, xi_p: f64) -> Result<Self> {
        if !phase.data().iter().all(|&p| p > -PI && p <= PI) {
            return Err(Error::InvalidArgument(
                "wrapped phase must lie in (-pi, pi]".into(),
            ));
        }
        let n = phase.data().len();
        Ok(Self { phase, xi_p, low_confidence: vec![false; n] })
    }

    pub fn phase(&self) -> &ScalarField {
        &self.phase
    }

    pub fn xi_p(&self) -> f64 {
        self.xi_p
    }

    pub fn low_confidence(&self) -> &[bool] {
        &self.low_confidence
    }

    pub fn masked_fraction(&self) -> f64 {
        self.low_confidence.iter().filter(|&&m| m).count() as f64
            / self.low_confidence.len() as f64
    }

    /// Wrapped displacement in pixels, values in (-1/(2 xi_p), 1/(2 xi_p)].
    pub fn displacement(&self) -> ScalarField {
        let scale = 1.0 / (2.0 * PI * self.xi_p);
        self.phase.map(|p| p * scale)
    }
}

/// Extracts the wrapped displacement along one orientation. A positive
/// translation of the deformed image along the orientation axis yields a
/// positive displacement.
pub fn wrapped_displacement(
    reference: &ComplexField,
    deformed: &ComplexField,
    xi_p: f64,
) -> Result<WrappedPhaseField> {
    if reference.geometry() != deformed.geometry() {
        return Err(Error::InvalidGeometry(
            "analytic fields must share a geometry".into(),
        ));
    }
    if !(xi_p > 0.0) {
        return Err(Error::InvalidArgument(format!("xi_p must be positive, got {xi_p}")));
    }

    let max_mag = reference.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max_mag <= 0.0 {
        return Err(Error::NoCarrier);
    }
    let tau = CARRIER_TAU * max_mag;

    let n = reference.data().len();
    let mut phase = Vec::with_capacity(n);
    let mut low_confidence = Vec::with_capacity(n);
    for (rv, dv) in reference.data().iter().zip(deformed.data()) {
        let prod: Complex64 = dv.conj() * rv;
        let mut p = prod.arg();
        if p <= -PI {
            p = PI;
        }
        phase.push(p);
        low_confidence.push(rv.norm() < tau);
    }

    Ok(WrappedPhaseField {
        phase: ScalarField::from_vec(reference.geometry(), phase)?,
        xi_p,
        low_confidence,
    })
}
