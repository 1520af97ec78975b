use nalgebra::Matrix4;

use crate::forward::{
    displacement_from_potentials, gaussian_blur, synthesize_pattern, warp_pattern, Scenario,
    WaveModel, WaveParams,
};
use crate::{Error, Result, ScalarField};

/// Parameter order of the information matrix. The transverse phase is held
/// fixed; the longitudinal phase stands in for the generic phase parameter.
pub const FISHER_PARAMS: [&str; 4] = ["a", "xi_m", "theta0", "phi_L"];

/// 4x4 Fisher information over (a, xi_m, theta0, phi_L).
#[derive(Debug, Clone)]
pub struct FisherMatrix {
    matrix: Matrix4<f64>,
    /// Noise variance the matrix was scaled with.
    pub noise_variance: f64,
}

impl FisherMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }

    pub fn condition_number(&self) -> f64 {
        let eig = self.matrix.symmetric_eigen().eigenvalues;
        let max = eig.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e.abs()));
        let min = eig.iter().fold(f64::INFINITY, |m, &e| m.min(e.abs()));
        max / min.max(1e-300)
    }
}

/// Noiseless blurred observation mean for the given wave parameters.
fn forward_mean(
    wave: &WaveParams,
    pattern_img: &ScalarField,
    psf_sigma: f64,
) -> Result<ScalarField> {
    let truth = displacement_from_potentials(wave, pattern_img.geometry())?;
    let warped = warp_pattern(pattern_img, &truth)?;
    Ok(gaussian_blur(&warped, psf_sigma))
}

fn perturbed(wave: &WaveParams, index: usize, delta: f64) -> WaveParams {
    let mut p = *wave;
    match index {
        0 => p.amplitude += delta,
        1 => p.xi_m += delta,
        2 => p.theta0 += delta,
        _ => p.phi_l += delta,
    }
    p
}

fn param_value(wave: &WaveParams, index: usize) -> f64 {
    match index {
        0 => wave.amplitude,
        1 => wave.xi_m,
        2 => wave.theta0,
        _ => wave.phi_l,
    }
}

/// Central finite-difference sensitivity of the observation mean to one
/// parameter, shrinking the step when a probe violates the wave constraints
/// (up to three halvings).
fn sensitivity(
    wave: &WaveParams,
    pattern_img: &ScalarField,
    psf_sigma: f64,
    index: usize,
    relative_step: f64,
) -> Result<Vec<f64>> {
    let mut h = (param_value(wave, index).abs() * relative_step).max(1e-6);
    for _ in 0..=3 {
        let plus = perturbed(wave, index, h);
        let minus = perturbed(wave, index, -h);
        if plus.validate().is_ok() && minus.validate().is_ok() {
            let mu_p = forward_mean(&plus, pattern_img, psf_sigma)?;
            let mu_m = forward_mean(&minus, pattern_img, psf_sigma)?;
            return Ok(mu_p
                .data()
                .iter()
                .zip(mu_m.data())
                .map(|(p, m)| (p - m) / (2.0 * h))
                .collect());
        }
        h *= 0.5;
    }
    Err(Error::ConstraintViolation(format!(
        "finite-difference step for {} keeps violating the wave constraints",
        FISHER_PARAMS[index]
    )))
}

/// Numeric Fisher information: F_ij = (1/sigma^2) sum_px dmu/dp_i dmu/dp_j,
/// with the observation mean differentiated by central finite differences
/// (relative step 1e-4, absolute floor 1e-6). Symmetric and PSD by
/// construction.
pub fn fisher_matrix(wave: &WaveParams, scenario: &Scenario) -> Result<FisherMatrix> {
    fisher_matrix_with_step(wave, scenario, 1e-4)
}

/// Step-size-exposed variant used by the convergence check.
pub fn fisher_matrix_with_step(
    wave: &WaveParams,
    scenario: &Scenario,
    relative_step: f64,
) -> Result<FisherMatrix> {
    let Some(snr_db) = scenario.observation.snr_db else {
        return Err(Error::InvalidArgument(
            "the information matrix needs a finite noise level".into(),
        ));
    };
    let geometry = scenario.geometry()?;
    let pattern_img = synthesize_pattern(&scenario.pattern, geometry)?;
    fisher_matrix_for_image(
        wave,
        &pattern_img,
        scenario.observation.psf_sigma,
        snr_db,
        relative_step,
    )
}

/// Core computation on an explicit pattern image.
pub fn fisher_matrix_for_image(
    wave: &WaveParams,
    pattern_img: &ScalarField,
    psf_sigma: f64,
    snr_db: f64,
    relative_step: f64,
) -> Result<FisherMatrix> {
    wave.validate()?;
    let mean = forward_mean(wave, pattern_img, psf_sigma)?;
    let signal_variance = mean.variance();
    if signal_variance < 1e-30 {
        // Structureless image: zero sensitivity to every parameter.
        return Ok(FisherMatrix { matrix: Matrix4::zeros(), noise_variance: 0.0 });
    }
    let noise_variance = signal_variance / 10f64.powf(snr_db / 10.0);

    let sensitivities: Vec<Vec<f64>> = (0..4)
        .map(|i| sensitivity(wave, pattern_img, psf_sigma, i, relative_step))
        .collect::<Result<_>>()?;

    let mut matrix = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let dot: f64 = sensitivities[i]
                .iter()
                .zip(&sensitivities[j])
                .map(|(a, b)| a * b)
                .sum();
            let val = dot / noise_variance;
            matrix[(i, j)] = val;
            matrix[(j, i)] = val;
        }
    }
    Ok(FisherMatrix { matrix, noise_variance })
}

/// Field-averaged Cramér-Rao bound on the displacement MSE, in dB relative
/// to 1 px^2.
#[derive(Debug, Clone, Copy)]
pub struct CrbReport {
    pub mse_db: f64,
    pub pseudo_inverse_used: bool,
    pub condition_number: f64,
}

/// Delta-method displacement bound: per pixel, J is the analytic Jacobian of
/// (U, V) in the four parameters and the pixel bound is tr(J F^-1 J^T) / 2;
/// the field average is returned in dB.
pub fn crb_displacement(
    fisher: &FisherMatrix,
    wave: &WaveParams,
    geometry: crate::GridGeometry,
) -> Result<CrbReport> {
    let (inv, pseudo) = match fisher.matrix.try_inverse() {
        Some(inv) => (inv, false),
        None => {
            let svd = fisher.matrix.svd(true, true);
            let inv = svd
                .pseudo_inverse(1e-12 * fisher.matrix.norm())
                .map_err(|e| Error::EstimationFailed(format!("pseudo-inverse failed: {e}")))?;
            (inv, true)
        }
    };

    let model = WaveModel::new(*wave)?;
    let mut acc = 0.0;
    for r in 0..geometry.rows {
        for c in 0..geometry.cols {
            let jac = model.displacement_jacobian_at(c as f64, r as f64);
            let mut pixel = 0.0;
            for row in &jac {
                for i in 0..4 {
                    for j in 0..4 {
                        pixel += row[i] * inv[(i, j)] * row[j];
                    }
                }
            }
            acc += pixel / 2.0;
        }
    }
    let mean = acc / geometry.len() as f64;
    Ok(CrbReport {
        mse_db: 10.0 * mean.log10(),
        pseudo_inverse_used: pseudo,
        condition_number: fisher.condition_number(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{CellKind, GridConfig, ObservationParams, PatternSpec};

    fn small_scenario() -> Scenario {
        let l = 128.0;
        Scenario {
            wave: WaveParams {
                amplitude: 0.01 * l,
                xi_m: 3.33 / l,
                theta0: std::f64::consts::FRAC_PI_4,
                phi_l: 1.0,
                phi_t: 0.33,
            },
            pattern: PatternSpec::new(1.0 / 8.0, CellKind::Dots { diameter: None }),
            observation: ObservationParams {
                psf_sigma: 0.5,
                snr_db: Some(20.0),
                quant_bits: 0,
                rng_seed: 0,
            },
            grid: GridConfig { rows: 128, cols: 128, pixel_pitch: 1.0 },
        }
    }

    #[test]
    fn quadrupled_noise_divides_entries_by_four() {
        let sc = small_scenario();
        let f1 = fisher_matrix(&sc.wave, &sc).unwrap();
        let mut sc4 = sc;
        // +6.0206 dB SNR halves sigma^2... quadruple sigma^2 instead:
        // snr_db drops by 10 log10(4).
        sc4.observation.snr_db = Some(20.0 - 10.0 * 4f64.log10());
        let f4 = fisher_matrix(&sc4.wave, &sc4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = f1.matrix()[(i, j)];
                let b = f4.matrix()[(i, j)];
                assert!(
                    (a / b - 4.0).abs() < 1e-9,
                    "entry ({i},{j}): {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn flat_pattern_has_no_information() {
        let sc = small_scenario();
        let g = sc.geometry().unwrap();
        let flat = crate::ScalarField::from_fn(g, |_, _| 0.5);
        let f = fisher_matrix_for_image(&sc.wave, &flat, 0.5, 20.0, 1e-4).unwrap();
        let scale = f.matrix().norm().max(1e-300);
        for j in 0..4 {
            assert!(
                f.matrix()[(3, j)].abs() / scale.max(1.0) < 1e-6,
                "phase row entry {j} not near zero"
            );
        }
    }

    #[test]
    fn symmetric_and_psd() {
        let sc = small_scenario();
        let f = fisher_matrix(&sc.wave, &sc).unwrap();
        assert!(f.max_asymmetry() < 1e-8 * f.matrix().norm());
        let trace = f.matrix().trace();
        assert!(f.min_eigenvalue() >= -1e-10 * trace);
    }

    #[test]
    fn step_halving_changes_little() {
        let sc = small_scenario();
        let f1 = fisher_matrix_with_step(&sc.wave, &sc, 1e-4).unwrap();
        let f2 = fisher_matrix_with_step(&sc.wave, &sc, 5e-5).unwrap();
        let diff = (f1.matrix() - f2.matrix()).norm();
        assert!(diff / f1.matrix().norm() < 0.01, "relative change {}", diff / f1.matrix().norm());
    }

    #[test]
    fn crb_shifts_by_exactly_ten_db_with_snr() {
        let sc = small_scenario();
        let g = sc.geometry().unwrap();
        let f20 = fisher_matrix(&sc.wave, &sc).unwrap();
        let mut sc30 = sc;
        sc30.observation.snr_db = Some(30.0);
        let f30 = fisher_matrix(&sc30.wave, &sc30).unwrap();
        let b20 = crb_displacement(&f20, &sc.wave, g).unwrap();
        let b30 = crb_displacement(&f30, &sc30.wave, g).unwrap();
        assert!(
            ((b20.mse_db - b30.mse_db) - 10.0).abs() < 1e-6,
            "{} vs {}",
            b20.mse_db,
            b30.mse_db
        );
    }

    #[test]
    fn crb_is_continuous_in_amplitude() {
        let sc = small_scenario();
        let g = sc.geometry().unwrap();
        let f = fisher_matrix(&sc.wave, &sc).unwrap();
        let b = crb_displacement(&f, &sc.wave, g).unwrap();
        let mut sc2 = sc;
        sc2.wave.amplitude *= 1.05;
        let f2 = fisher_matrix(&sc2.wave, &sc2).unwrap();
        let b2 = crb_displacement(&f2, &sc2.wave, g).unwrap();
        assert!((b.mse_db - b2.mse_db).abs() < 1.0, "{} vs {}", b.mse_db, b2.mse_db);
    }
}
