use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::{ComplexField, Error, Result, ScalarField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Frequency in cycles/pixel of DFT bin `index` out of `len`, wrapped to
/// [-1/2, 1/2). For even `len` the Nyquist bin maps to -1/2.
#[inline]
pub fn freq_cycles(index: usize, len: usize) -> f64 {
    let half = len.div_ceil(2);
    if index < half {
        index as f64 / len as f64
    } else {
        (index as f64 - len as f64) / len as f64
    }
}

fn fft2d_inner(field: &ComplexField, direction: FftDirection) -> ComplexField {
    let rows = field.rows();
    let cols = field.cols();
    let mut buf = field.data().to_vec();

    let row_fft = plan(cols, direction);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(cols) {
        row_fft.process_with_scratch(row, &mut scratch);
    }

    let mut transposed = transpose(&buf, rows, cols);
    let col_fft = plan(rows, direction);
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
    for col in transposed.chunks_exact_mut(rows) {
        col_fft.process_with_scratch(col, &mut scratch);
    }

    let data = transpose(&transposed, cols, rows);
    ComplexField::from_vec(field.geometry(), data).expect("fft output finite")
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Forward 2D DFT, unnormalized, zero frequency at index (0, 0).
pub fn fft2d(field: &ComplexField) -> Result<ComplexField> {
    if !field.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(fft2d_inner(field, FftDirection::Forward))
}

/// Forward 2D DFT of a real field.
pub fn fft2d_real(field: &ScalarField) -> Result<ComplexField> {
    if !field.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(fft2d_inner(&ComplexField::from_real(field), FftDirection::Forward))
}

/// Inverse 2D DFT carrying the 1/(rows*cols) normalization, so
/// `ifft2d(fft2d(x)) == x` up to roundoff.
pub fn ifft2d(field: &ComplexField) -> Result<ComplexField> {
    if !field.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut out = fft2d_inner(field, FftDirection::Inverse);
    let scale = 1.0 / (field.rows() * field.cols()) as f64;
    for v in out.data_mut() {
        *v *= scale;
    }
    Ok(out)
}
