use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform pixel grid shared by all field containers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Physical size of one pixel (length units per pixel). Defaults to 1,
    /// in which case all frequencies are plain cycles/pixel.
    pub pixel_pitch: f64,
}

impl GridGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Self::with_pitch(rows, cols, 1.0)
    }

    pub fn with_pitch(rows: usize, cols: usize, pixel_pitch: f64) -> Result<Self> {
        if rows < 8 || cols < 8 {
            return Err(Error::InvalidGeometry(format!(
                "grid must be at least 8x8, got {rows}x{cols}"
            )));
        }
        if !(pixel_pitch > 0.0) || !pixel_pitch.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "pixel pitch must be positive and finite, got {pixel_pitch}"
            )));
        }
        Ok(Self { rows, cols, pixel_pitch })
    }

    /// Spatial sampling frequency, 1/pixel_pitch.
    pub fn sampling_frequency(&self) -> f64 {
        1.0 / self.pixel_pitch
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Real-valued 2D field sampled on a uniform grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    geometry: GridGeometry,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { geometry, data: vec![0.0; geometry.len()] }
    }

    pub fn from_vec(geometry: GridGeometry, data: Vec<f64>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::InvalidGeometry(format!(
                "data length {} does not match {}x{}",
                data.len(),
                geometry.rows,
                geometry.cols
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { geometry, data })
    }

    /// Builds a field by evaluating `f(x, y)` at every pixel center, with
    /// x = column index and y = row index.
    pub fn from_fn(geometry: GridGeometry, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(geometry.len());
        for r in 0..geometry.rows {
            for c in 0..geometry.cols {
                data.push(f(c as f64, r as f64));
            }
        }
        Self { geometry, data }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn rows(&self) -> usize {
        self.geometry.rows
    }

    pub fn cols(&self) -> usize {
        self.geometry.cols
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.geometry.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.geometry.cols + col] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            geometry: self.geometry,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Complex-valued 2D field, row-major. Holds spectra and analytic signals.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    geometry: GridGeometry,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { geometry, data: vec![Complex64::new(0.0, 0.0); geometry.len()] }
    }

    pub fn from_vec(geometry: GridGeometry, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::InvalidGeometry(format!(
                "data length {} does not match {}x{}",
                data.len(),
                geometry.rows,
                geometry.cols
            )));
        }
        if !data.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { geometry, data })
    }

    pub fn from_real(field: &ScalarField) -> Self {
        Self {
            geometry: field.geometry(),
            data: field.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Packs two real fields into the real/imaginary parts.
    pub fn from_re_im(re: &ScalarField, im: &ScalarField) -> Result<Self> {
        if re.geometry() != im.geometry() {
            return Err(Error::InvalidGeometry("parts must share a geometry".into()));
        }
        Ok(Self {
            geometry: re.geometry(),
            data: re
                .data()
                .iter()
                .zip(im.data())
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        })
    }

    /// Splits into real and imaginary parts.
    pub fn re_im(&self) -> (ScalarField, ScalarField) {
        let re = ScalarField {
            geometry: self.geometry,
            data: self.data.iter().map(|v| v.re).collect(),
        };
        let im = ScalarField {
            geometry: self.geometry,
            data: self.data.iter().map(|v| v.im).collect(),
        };
        (re, im)
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn rows(&self) -> usize {
        self.geometry.rows
    }

    pub fn cols(&self) -> usize {
        self.geometry.cols
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.geometry.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.geometry.cols + col] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn real_part(&self) -> ScalarField {
        ScalarField {
            geometry: self.geometry,
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.norm()).collect()
    }
}
