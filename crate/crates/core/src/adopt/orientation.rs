use std::f64::consts::PI;

use crate::grid::{default_polar_bins, fft2d_real, to_polar, PolarSpectrum};
use crate::{Error, Result, ScalarField};

/// The two lattice orientations detected in a pattern spectrum, in [0, pi),
/// with their folded-profile peak strengths.
#[derive(Debug, Clone, Copy)]
pub struct OrientationEstimate {
    pub theta_u: f64,
    pub theta_v: f64,
    pub strengths: (f64, f64),
}

/// Minimum peak separation on the folded angle axis.
const MIN_SEPARATION: f64 = PI / 8.0;
/// Peaks must exceed this multiple of the folded-profile median.
const PEAK_OVER_MEDIAN: f64 = 3.0;

/// Low-frequency exclusion radius (cycles/pixel): spectral content below a
/// few cycles per image width is window leakage, not carrier.
pub(crate) fn rho_exclusion(rows: usize, cols: usize) -> f64 {
    3.0 / rows.min(cols) as f64
}

/// Mean magnitude per angle with theta and theta + pi folded together;
/// length n_theta/2 over [0, pi).
fn folded_profile(polar: &PolarSpectrum, rho_min: f64) -> Vec<f64> {
    let half = polar.n_theta() / 2;
    (0..half)
        .map(|i| polar.row_mean(i, rho_min) + polar.row_mean(i + half, rho_min))
        .collect()
}

fn circular_distance_bins(a: usize, b: usize, len: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(len - d)
}

/// Sub-bin peak position by parabolic fit on the circular profile.
fn refine_peak(profile: &[f64], idx: usize) -> f64 {
    let len = profile.len();
    let y_l = profile[(idx + len - 1) % len];
    let y_c = profile[idx];
    let y_r = profile[(idx + 1) % len];
    let denom = y_l - 2.0 * y_c + y_r;
    let offset = if denom.abs() < 1e-300 { 0.0 } else { 0.5 * (y_l - y_r) / denom };
    idx as f64 + offset.clamp(-0.5, 0.5)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

/// Detects the two pattern orientations from the mean spectral magnitude per
/// angle (DC and low frequencies excluded, antipodal angles folded). Returns
/// the two largest well-separated peaks with parabolic refinement.
pub fn detect_orientations(img: &ScalarField, n_theta: usize) -> Result<OrientationEstimate> {
    let spectrum = fft2d_real(img)?;
    let (_, n_rho) = default_polar_bins(img.rows(), img.cols());
    let polar = to_polar(&spectrum, n_theta, n_rho)?;
    detect_from_polar(&polar, rho_exclusion(img.rows(), img.cols()))
}

pub(crate) fn detect_from_polar(
    polar: &PolarSpectrum,
    rho_min: f64,
) -> Result<OrientationEstimate> {
    let profile = folded_profile(polar, rho_min);
    let half = profile.len();
    let bin_width = PI / half as f64;
    let min_sep_bins = ((MIN_SEPARATION / bin_width).round() as usize).max(1);
    let threshold = PEAK_OVER_MEDIAN * median(&profile);

    // Local maxima on the circular profile.
    let mut maxima: Vec<usize> = (0..half)
        .filter(|&i| {
            let prev = profile[(i + half - 1) % half];
            let next = profile[(i + 1) % half];
            profile[i] >= prev && profile[i] > next
        })
        .collect();
    maxima.sort_by(|&a, &b| profile[b].partial_cmp(&profile[a]).unwrap());

    let Some(&first) = maxima.first() else {
        return Err(Error::OrientationNotFound);
    };
    let second = maxima
        .iter()
        .copied()
        .find(|&m| circular_distance_bins(m, first, half) >= min_sep_bins);
    let Some(second) = second else {
        return Err(Error::OrientationNotFound);
    };
    if profile[first] <= threshold || profile[second] <= threshold {
        return Err(Error::OrientationNotFound);
    }

    let theta_a = (refine_peak(&profile, first) * bin_width).rem_euclid(PI);
    let theta_b = (refine_peak(&profile, second) * bin_width).rem_euclid(PI);
    let strength_a = profile[first];
    let strength_b = profile[second];

    // The orientation closer to the x axis names the u direction.
    let dist_to_x = |t: f64| t.min(PI - t);
    if dist_to_x(theta_a) <= dist_to_x(theta_b) {
        Ok(OrientationEstimate {
            theta_u: theta_a,
            theta_v: theta_b,
            strengths: (strength_a, strength_b),
        })
    } else {
        Ok(OrientationEstimate {
            theta_u: theta_b,
            theta_v: theta_a,
            strengths: (strength_b, strength_a),
        })
    }
}

/// Radial position of the strongest spectral peak near one orientation axis
/// (angular wedge of +-pi/8), refined by a parabolic fit along the peak's
/// own radial ray; used to estimate the carrier frequency when it is not
/// supplied. Works on the Cartesian spectrum so exact-bin carriers come out
/// unbiased.
pub(crate) fn radial_peak(spectrum: &crate::ComplexField, theta: f64, rho_min: f64) -> Result<f64> {
    use crate::adopt::filter::axis_distance;
    use crate::grid::freq_cycles;

    let rows = spectrum.rows();
    let cols = spectrum.cols();
    let mag: Vec<f64> = spectrum.data().iter().map(|v| v.norm()).collect();

    let mut best: Option<(f64, f64, f64)> = None; // (magnitude, xi_x, xi_y)
    for r in 0..rows {
        let xi_y = freq_cycles(r, rows);
        for c in 0..cols {
            let xi_x = freq_cycles(c, cols);
            let rho = (xi_x * xi_x + xi_y * xi_y).sqrt();
            if rho < rho_min {
                continue;
            }
            if axis_distance(xi_y.atan2(xi_x), theta) > PI / 8.0 {
                continue;
            }
            let m = mag[r * cols + c];
            if best.map_or(true, |(bm, _, _)| m > bm) {
                best = Some((m, xi_x, xi_y));
            }
        }
    }
    let Some((peak, xi_x, xi_y)) = best else {
        return Err(Error::NoCarrier);
    };
    if peak <= 0.0 {
        return Err(Error::NoCarrier);
    }

    let rho0 = (xi_x * xi_x + xi_y * xi_y).sqrt();
    let (dir_x, dir_y) = (xi_x / rho0, xi_y / rho0);
    let delta = 0.5 / rows.max(cols) as f64;
    let sample = |rho: f64| {
        let fx = (rho * dir_x * cols as f64).rem_euclid(cols as f64);
        let fy = (rho * dir_y * rows as f64).rem_euclid(rows as f64);
        crate::grid::polar_bilinear(&mag, rows, cols, fx, fy)
    };
    let y_l = sample(rho0 - delta);
    let y_r = sample(rho0 + delta);
    let denom = y_l - 2.0 * peak + y_r;
    let offset =
        if denom.abs() < 1e-300 { 0.0 } else { (0.5 * (y_l - y_r) / denom).clamp(-0.5, 0.5) };
    Ok(rho0 + offset * delta)
}
