use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::adopt::analytic::analytic_spectrum;
use crate::adopt::filter::filter_spectrum;
use crate::adopt::orientation::{detect_from_polar, radial_peak, rho_exclusion};
use crate::adopt::unwrap::unwrap_phase;
use crate::adopt::{wrapped_displacement, AdoptConfig, RhoCenter};
use crate::forward::DisplacementField;
use crate::grid::{default_polar_bins, fft2d_real, ifft2d, to_polar};
use crate::{ComplexField, Error, Result, ScalarField};

/// Image axis selector for single-orientation demodulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    U,
    V,
}

/// Diagnostics attached to a demodulation result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemodInfo {
    pub theta_u: f64,
    pub theta_v: f64,
    pub xi_p_u: f64,
    pub xi_p_v: f64,
    pub masked_fraction: f64,
    /// Deformed-over-reference analytic band energy (worst orientation).
    /// Values near 1 mean the carrier survived deformation; a collapse
    /// signals a frame whose pattern was lost.
    pub carrier_ratio: f64,
}

/// Demodulated displacement field plus diagnostics.
#[derive(Debug, Clone)]
pub struct DemodResult {
    pub field: DisplacementField,
    pub info: DemodInfo,
}

fn carrier_frequency(
    cfg: &AdoptConfig,
    ref_spectrum: &ComplexField,
    theta: f64,
    rho_min: f64,
) -> Result<f64> {
    let base = match cfg.rho_center {
        RhoCenter::Explicit(xi_p) => xi_p,
        RhoCenter::AutoFromPeak => radial_peak(ref_spectrum, theta, rho_min)?,
    };
    Ok(base * cfg.harmonic_order as f64)
}

/// One orientation's scalar displacement: filter both spectra, form the
/// analytic signals, take the wrapped phase of the Hermitian product and
/// unwrap it. Returns the unwrapped displacement along the orientation axis,
/// the low-confidence mask, and the deformed/reference band energy ratio.
fn demodulate_orientation(
    ref_spectrum: &ComplexField,
    def_spectrum: &ComplexField,
    theta: f64,
    xi_carrier: f64,
    cfg: &AdoptConfig,
) -> Result<(ScalarField, Vec<bool>, f64)> {
    let ref_analytic = ifft2d(&analytic_spectrum(
        &filter_spectrum(ref_spectrum, theta, xi_carrier, cfg),
        theta,
    ))?;
    let def_analytic = ifft2d(&analytic_spectrum(
        &filter_spectrum(def_spectrum, theta, xi_carrier, cfg),
        theta,
    ))?;
    let energy = |f: &ComplexField| f.data().iter().map(|v| v.norm_sqr()).sum::<f64>();
    let e_ref = energy(&ref_analytic);
    let ratio = if e_ref > 0.0 { energy(&def_analytic) / e_ref } else { 0.0 };
    let wrapped = wrapped_displacement(&ref_analytic, &def_analytic, xi_carrier)?;
    let mask = wrapped.low_confidence().to_vec();
    Ok((unwrap_phase(&wrapped), mask, ratio))
}

/// Fills masked pixels with the value of the nearest unmasked pixel
/// (multi-source breadth-first search over the 4-neighborhood).
fn inpaint_nearest(field: &mut ScalarField, mask: &[bool]) {
    let rows = field.rows();
    let cols = field.cols();
    if !mask.iter().any(|&m| m) {
        return;
    }
    let mut source: Vec<i32> = mask.iter().map(|&m| if m { -1 } else { 0 }).collect();
    let mut queue: VecDeque<usize> = (0..rows * cols).filter(|&i| !mask[i]).collect();
    while let Some(i) = queue.pop_front() {
        let r = i / cols;
        let c = i % cols;
        let neighbors = [
            (r > 0).then(|| i - cols),
            (r + 1 < rows).then(|| i + cols),
            (c > 0).then(|| i - 1),
            (c + 1 < cols).then(|| i + 1),
        ];
        for n in neighbors.into_iter().flatten() {
            if source[n] == -1 {
                source[n] = 0;
                let v = field.data()[i];
                field.data_mut()[n] = v;
                queue.push_back(n);
            }
        }
    }
}

/// Full two-orientation demodulation: detect the lattice orientations on the
/// reference, demodulate each, and project the two oriented estimates onto
/// the (x, y) axes. Low-confidence pixels are inpainted from their nearest
/// valid neighbor and reported in the diagnostics.
pub fn demodulate(
    reference: &ScalarField,
    deformed: &ScalarField,
    cfg: &AdoptConfig,
) -> Result<DemodResult> {
    cfg.validate()?;
    if reference.geometry() != deformed.geometry() {
        return Err(Error::InvalidGeometry(
            "reference and deformed images must share a geometry".into(),
        ));
    }

    let ref_spectrum = fft2d_real(reference)?;
    let def_spectrum = fft2d_real(deformed)?;
    let (n_theta, n_rho) = default_polar_bins(reference.rows(), reference.cols());
    let polar = to_polar(&ref_spectrum, n_theta, n_rho)?;
    let rho_min = rho_exclusion(reference.rows(), reference.cols());
    let orientations = detect_from_polar(&polar, rho_min)?;

    let xi_u = carrier_frequency(cfg, &ref_spectrum, orientations.theta_u, rho_min)?;
    let xi_v = carrier_frequency(cfg, &ref_spectrum, orientations.theta_v, rho_min)?;

    let (s_u, mask_u, ratio_u) = demodulate_orientation(
        &ref_spectrum,
        &def_spectrum,
        orientations.theta_u,
        xi_u,
        cfg,
    )?;
    let (s_v, mask_v, ratio_v) = demodulate_orientation(
        &ref_spectrum,
        &def_spectrum,
        orientations.theta_v,
        xi_v,
        cfg,
    )?;

    // Project the oriented estimates onto (x, y): solve
    // [cos(t_u) sin(t_u); cos(t_v) sin(t_v)] (U, V)^T = (s_u, s_v)^T.
    let (sin_u, cos_u) = orientations.theta_u.sin_cos();
    let (sin_v, cos_v) = orientations.theta_v.sin_cos();
    let det = cos_u * sin_v - sin_u * cos_v;
    if det.abs() < 1e-6 {
        return Err(Error::EstimationFailed(
            "detected orientations are too close to invert the projection".into(),
        ));
    }

    let geometry = reference.geometry();
    let mut u = ScalarField::zeros(geometry);
    let mut v = ScalarField::zeros(geometry);
    for i in 0..geometry.len() {
        let su = s_u.data()[i];
        let sv = s_v.data()[i];
        u.data_mut()[i] = (su * sin_v - sv * sin_u) / det;
        v.data_mut()[i] = (-su * cos_v + sv * cos_u) / det;
    }

    let union_mask: Vec<bool> =
        mask_u.iter().zip(&mask_v).map(|(&a, &b)| a || b).collect();
    let masked_fraction =
        union_mask.iter().filter(|&&m| m).count() as f64 / union_mask.len() as f64;
    inpaint_nearest(&mut u, &union_mask);
    inpaint_nearest(&mut v, &union_mask);

    Ok(DemodResult {
        field: DisplacementField::new(u, v)?,
        info: DemodInfo {
            theta_u: orientations.theta_u,
            theta_v: orientations.theta_v,
            xi_p_u: xi_u,
            xi_p_v: xi_v,
            masked_fraction,
            carrier_ratio: ratio_u.min(ratio_v),
        },
    })
}

/// Single-orientation demodulation for frame pipelines that only track one
/// displacement axis: picks the detected orientation best aligned with the
/// requested axis and scales its scalar estimate by the axis projection,
/// assuming the orthogonal displacement component is negligible.
pub fn demodulate_axis(
    reference: &ScalarField,
    deformed: &ScalarField,
    axis: Axis,
    cfg: &AdoptConfig,
) -> Result<(ScalarField, DemodInfo)> {
    cfg.validate()?;
    if reference.geometry() != deformed.geometry() {
        return Err(Error::InvalidGeometry(
            "reference and deformed images must share a geometry".into(),
        ));
    }
    let ref_spectrum = fft2d_real(reference)?;
    let def_spectrum = fft2d_real(deformed)?;
    let (n_theta, n_rho) = default_polar_bins(reference.rows(), reference.cols());
    let polar = to_polar(&ref_spectrum, n_theta, n_rho)?;
    let rho_min = rho_exclusion(reference.rows(), reference.cols());
    let orientations = detect_from_polar(&polar, rho_min)?;

    let (theta, projection) = match axis {
        Axis::U => {
            let cu = orientations.theta_u.cos();
            let cv = orientations.theta_v.cos();
            if cu.abs() >= cv.abs() {
                (orientations.theta_u, cu)
            } else {
                (orientations.theta_v, cv)
            }
        }
        Axis::V => {
            let su = orientations.theta_u.sin();
            let sv = orientations.theta_v.sin();
            if su.abs() >= sv.abs() {
                (orientations.theta_u, su)
            } else {
                (orientations.theta_v, sv)
            }
        }
    };
    if projection.abs() < 0.3 {
        return Err(Error::EstimationFailed(
            "no detected orientation aligns with the requested axis".into(),
        ));
    }

    let xi = carrier_frequency(cfg, &ref_spectrum, theta, rho_min)?;
    let (s, mask, ratio) = demodulate_orientation(&ref_spectrum, &def_spectrum, theta, xi, cfg)?;
    let mut out = s.map(|v| v / projection);
    let masked_fraction = mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64;
    inpaint_nearest(&mut out, &mask);
    let info = DemodInfo {
        theta_u: orientations.theta_u,
        theta_v: orientations.theta_v,
        xi_p_u: xi,
        xi_p_v: xi,
        masked_fraction,
        carrier_ratio: ratio,
    };
    Ok((out, info))
}

/// Smallest detectable displacement: quantization step over the maximum
/// image gradient magnitude.
pub fn resolution_limit(quant_step: f64, grad_max: f64) -> Result<f64> {
    if !(grad_max > 0.0) || !grad_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grad_max must be positive, got {grad_max}"
        )));
    }
    if quant_step < 0.0 || !quant_step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "quant_step must be non-negative, got {quant_step}"
        )));
    }
    Ok(quant_step / grad_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{
        synthesize_pattern, warp_pattern, CellKind, DisplacementField, PatternSpec,
    };
    use crate::GridGeometry;

    fn test_pattern(n: usize) -> ScalarField {
        let g = GridGeometry::new(n, n).unwrap();
        let spec = PatternSpec::new(1.0 / 8.0, CellKind::Dots { diameter: None });
        synthesize_pattern(&spec, g).unwrap()
    }

    fn shifted(img: &ScalarField, du: f64, dv: f64) -> ScalarField {
        let g = img.geometry();
        let d = DisplacementField::new(
            ScalarField::from_fn(g, |_, _| du),
            ScalarField::from_fn(g, |_, _| dv),
        )
        .unwrap();
        warp_pattern(img, &d).unwrap()
    }

    fn interior_stats(f: &ScalarField, margin: usize) -> (f64, f64) {
        let mut sum = 0.0;
        let mut max_abs = 0.0f64;
        let mut count = 0usize;
        for r in margin..f.rows() - margin {
            for c in margin..f.cols() - margin {
                sum += f.at(r, c);
                max_abs = max_abs.max(f.at(r, c).abs());
                count += 1;
            }
        }
        (sum / count as f64, max_abs)
    }

    #[test]
    fn identical_images_give_zero_field() {
        let img = test_pattern(128);
        let out = demodulate(&img, &img, &AdoptConfig::default()).unwrap();
        let (_, max_u) = interior_stats(&out.field.u, 0);
        let (_, max_v) = interior_stats(&out.field.v, 0);
        assert!(max_u < 1e-3, "max |U| = {max_u}");
        assert!(max_v < 1e-3, "max |V| = {max_v}");
    }

    #[test]
    fn integer_translation_recovered() {
        let img = test_pattern(128);
        let def = shifted(&img, 2.0, 0.0);
        let out = demodulate(&img, &def, &AdoptConfig::default()).unwrap();
        let (mean_u, _) = interior_stats(&out.field.u, 8);
        let (mean_v, _) = interior_stats(&out.field.v, 8);
        assert!((mean_u - 2.0).abs() < 0.01, "mean U {mean_u}");
        assert!(mean_v.abs() < 0.01, "mean V {mean_v}");
    }

    #[test]
    fn subpixel_translations_recovered() {
        let img = test_pattern(128);
        for delta in [0.1, 0.25, 0.5] {
            let def = shifted(&img, delta, delta);
            let out = demodulate(&img, &def, &AdoptConfig::default()).unwrap();
            let (mean_u, _) = interior_stats(&out.field.u, 8);
            let (mean_v, _) = interior_stats(&out.field.v, 8);
            assert!((mean_u - delta).abs() < 0.02, "delta {delta}: U {mean_u}");
            assert!((mean_v - delta).abs() < 0.02, "delta {delta}: V {mean_v}");
        }
    }

    #[test]
    fn explicit_carrier_matches_auto() {
        let img = test_pattern(128);
        let def = shifted(&img, 0.3, -0.2);
        let auto = demodulate(&img, &def, &AdoptConfig::default()).unwrap();
        let explicit = demodulate(
            &img,
            &def,
            &AdoptConfig { rho_center: RhoCenter::Explicit(1.0 / 8.0), ..Default::default() },
        )
        .unwrap();
        let (a_u, _) = interior_stats(&auto.field.u, 8);
        let (e_u, _) = interior_stats(&explicit.field.u, 8);
        assert!((a_u - e_u).abs() < 5e-3, "auto {a_u} vs explicit {e_u}");
    }

    #[test]
    fn axis_demodulation_tracks_v() {
        let img = test_pattern(128);
        let def = shifted(&img, 0.0, 0.4);
        let (v, info) = demodulate_axis(&img, &def, Axis::V, &AdoptConfig::default()).unwrap();
        let mut sum = 0.0;
        let mut count = 0;
        for r in 8..120 {
            for c in 8..120 {
                sum += v.at(r, c);
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 0.4).abs() < 0.02, "mean V {mean}");
        assert!(info.masked_fraction < 0.2);
    }

    #[test]
    fn resolution_limit_cases() {
        let limit = resolution_limit(1.0 / 255.0, 0.5).unwrap();
        assert!((limit - 0.00784313725).abs() < 1e-9);
        assert_eq!(resolution_limit(0.0, 0.5).unwrap(), 0.0);
        assert!(resolution_limit(0.1, 0.0).is_err());
        // Doubling the gradient (doubling xi_p on a pure cosine) halves the
        // limit exactly.
        let l1 = resolution_limit(1.0 / 255.0, std::f64::consts::PI * 0.1).unwrap();
        let l2 = resolution_limit(1.0 / 255.0, std::f64::consts::PI * 0.2).unwrap();
        assert_eq!(l1 / 2.0, l2);
    }
}
