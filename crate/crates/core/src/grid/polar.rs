use crate::{ComplexField, Error, Result};

/// Magnitude spectrum resampled onto a polar (theta, rho) grid.
///
/// Rows index theta over [0, 2*pi), columns index rho over [0, xi_s/2].
#[derive(Debug, Clone)]
pub struct PolarSpectrum {
    theta: Vec<f64>,
    rho: Vec<f64>,
    magnitudes: Vec<f64>,
}

impl PolarSpectrum {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_rho(&self) -> usize {
        self.rho.len()
    }

    pub fn theta_axis(&self) -> &[f64] {
        &self.theta
    }

    pub fn rho_axis(&self) -> &[f64] {
        &self.rho
    }

    #[inline]
    pub fn at(&self, theta_idx: usize, rho_idx: usize) -> f64 {
        self.magnitudes[theta_idx * self.rho.len() + rho_idx]
    }

    /// Mean magnitude over rho for one theta row, restricted to rho >= rho_min.
    pub fn row_mean(&self, theta_idx: usize, rho_min: f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (j, &rho) in self.rho.iter().enumerate() {
            if rho >= rho_min {
                sum += self.at(theta_idx, j);
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Default polar grid sizes: 360 theta bins, ceil(min(rows, cols)/2) rho bins.
pub fn default_polar_bins(rows: usize, cols: usize) -> (usize, usize) {
    (360, rows.min(cols).div_ceil(2))
}

/// Resamples |spectrum| onto a polar grid by bilinear interpolation in the
/// frequency plane (periodic in both axes). The value at rho = 0 is the DC
/// magnitude replicated across theta.
pub fn to_polar(spectrum: &ComplexField, n_theta: usize, n_rho: usize) -> Result<PolarSpectrum> {
    let rows = spectrum.rows();
    let cols = spectrum.cols();
    if n_theta < 180 {
        return Err(Error::InvalidArgument(format!(
            "n_theta must be at least 180, got {n_theta}"
        )));
    }
    if n_rho < rows.min(cols) / 2 {
        return Err(Error::InvalidArgument(format!(
            "n_rho must be at least min(rows, cols)/2 = {}, got {n_rho}",
            rows.min(cols) / 2
        )));
    }

    let mag: Vec<f64> = spectrum.data().iter().map(|v| v.norm()).collect();
    let xi_half = spectrum.geometry().sampling_frequency() / 2.0;

    let theta: Vec<f64> = (0..n_theta)
        .map(|i| i as f64 * 2.0 * std::f64::consts::PI / n_theta as f64)
        .collect();
    let rho: Vec<f64> = (0..n_rho)
        .map(|j| j as f64 * xi_half / (n_rho - 1) as f64)
        .collect();

    let pitch = spectrum.geometry().pixel_pitch;
    let mut magnitudes = Vec::with_capacity(n_theta * n_rho);
    for &th in &theta {
        let (sin_t, cos_t) = th.sin_cos();
        for &rh in &rho {
            // Cycles/pixel along each axis; fractional DFT bin with wrap.
            let xi_x = rh * cos_t * pitch;
            let xi_y = rh * sin_t * pitch;
            let fx = (xi_x * cols as f64).rem_euclid(cols as f64);
            let fy = (xi_y * rows as f64).rem_euclid(rows as f64);
            magnitudes.push(bilinear_periodic(&mag, rows, cols, fx, fy));
        }
    }

    Ok(PolarSpectrum { theta, rho, magnitudes })
}

/// Bilinear sample of a row-major frequency-plane grid at fractional bin
/// coordinates, with wraparound in both axes.
pub(crate) fn bilinear_periodic(data: &[f64], rows: usize, cols: usize, fx: f64, fy: f64) -> f64 {
    let x0 = fx.floor() as usize % cols;
    let y0 = fy.floor() as usize % rows;
    let x1 = (x0 + 1) % cols;
    let y1 = (y0 + 1) % rows;
    let tx = fx - fx.floor();
    let ty = fy - fy.floor();
    let v00 = data[y0 * cols + x0];
    let v01 = data[y0 * cols + x1];
    let v10 = data[y1 * cols + x0];
    let v11 = data[y1 * cols + x1];
    (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11)
}
