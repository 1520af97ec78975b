use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adopt::{demodulate, AdoptConfig};
use crate::dic::{auto_window, dic_displacement, speckle_pattern, DicParams, SpeckleSpec};
use crate::eval::{crb_displacement, fisher_matrix, mle_fit};
use crate::forward::{
    apply_observation, displacement_from_potentials, synthesize_pattern, warp_pattern,
    DisplacementField, Scenario, WaveParams,
};
use crate::{Error, Result};

/// Estimators a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Adopt,
    Dic,
    Mle,
}

impl EstimatorKind {
    pub fn tag(&self) -> &'static str {
        match self {
            EstimatorKind::Adopt => "adopt",
            EstimatorKind::Dic => "dic",
            EstimatorKind::Mle => "mle",
        }
    }
}

/// Sweep abscissa: either the observation SNR or the normalized frequency
/// (which rescales the wave frequency at fixed amplitude).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    SnrDb(Vec<f64>),
    NormalizedFrequency(Vec<f64>),
}

impl Abscissa {
    pub fn kind_tag(&self) -> &'static str {
        match self {
            Abscissa::SnrDb(_) => "snr_db",
            Abscissa::NormalizedFrequency(_) => "xi_n",
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Abscissa::SnrDb(v) | Abscissa::NormalizedFrequency(v) => v,
        }
    }
}

/// Monte-Carlo sweep configuration. All randomness derives from `base_seed`:
/// trial g (globally indexed) observes with seeds base+2g / base+2g+1 for
/// the reference and deformed images, and the speckle pattern uses
/// `base_seed` itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub abscissa: Abscissa,
    pub estimators: Vec<EstimatorKind>,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub adopt: AdoptConfig,
    /// DIC window override; defaults to the displacement-adapted rule.
    #[serde(default)]
    pub dic: Option<DicParams>,
    #[serde(default)]
    pub speckle: SpeckleSpec,
    #[serde(default = "default_true")]
    pub include_crb: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MsePoint {
    pub x: f64,
    pub mse_db: f64,
    pub std_err_db: f64,
    pub n_trials: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MseCurve {
    pub estimator: String,
    pub abscissa: String,
    pub points: Vec<MsePoint>,
    /// Set when more than 10% of trials failed at any point.
    pub flagged: bool,
}

/// Field MSE in px^2: mean over the (margin-cropped) grid of the average
/// squared error of the two components.
pub fn field_mse(
    estimate: &DisplacementField,
    truth: &DisplacementField,
    margin: usize,
) -> f64 {
    let rows = truth.geometry().rows;
    let cols = truth.geometry().cols;
    let mut acc = 0.0;
    let mut count = 0usize;
    for r in margin..rows - margin {
        for c in margin..cols - margin {
            let du = estimate.u.at(r, c) - truth.u.at(r, c);
            let dv = estimate.v.at(r, c) - truth.v.at(r, c);
            acc += 0.5 * (du * du + dv * dv);
            count += 1;
        }
    }
    acc / count as f64
}

fn scenario_at(base: &Scenario, abscissa: &Abscissa, x: f64) -> Scenario {
    let mut sc = *base;
    match abscissa {
        Abscissa::SnrDb(_) => sc.observation.snr_db = Some(x),
        Abscissa::NormalizedFrequency(_) => {
            sc.wave.xi_m = x / (4.0 * std::f64::consts::PI * sc.wave.amplitude);
        }
    }
    sc
}

struct TrialResult {
    adopt: Option<f64>,
    dic: Option<f64>,
    mle: Option<f64>,
}

/// Perturbs the true parameters by up to 2% per coordinate, deterministic in
/// the seed, retrying with a smaller factor if the result is infeasible.
fn perturbed_init(wave: &WaveParams, seed: u64) -> WaveParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factor = 0.02;
    loop {
        let mut jitter = || 1.0 + factor * (rng.random::<f64>() * 2.0 - 1.0);
        let cand = WaveParams {
            amplitude: wave.amplitude * jitter(),
            xi_m: wave.xi_m * jitter(),
            theta0: wave.theta0 * jitter(),
            phi_l: wave.phi_l * jitter(),
            phi_t: wave.phi_t * jitter(),
        };
        if cand.validate().is_ok() {
            return cand;
        }
        factor *= 0.5;
        if factor < 1e-6 {
            return *wave;
        }
    }
}

/// Runs the Monte-Carlo sweep: for every abscissa point and trial, a fresh
/// noise realization is generated, each requested estimator runs, and the
/// per-trial field MSE against the ground truth is aggregated into mean and
/// standard error. A CRB curve is attached when requested. Deterministic in
/// `base_seed`; trials run in parallel.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MseCurve>> {
    if cfg.trials < 30 {
        return Err(Error::InvalidArgument(format!(
            "at least 30 trials are required, got {}",
            cfg.trials
        )));
    }
    cfg.adopt.validate()?;
    let geometry = cfg.scenario.geometry()?;

    let dic_params = cfg.dic.unwrap_or_else(|| auto_window(cfg.scenario.wave.amplitude));
    let want = |k: EstimatorKind| cfg.estimators.contains(&k);

    let mut curves: Vec<MseCurve> = cfg
        .estimators
        .iter()
        .map(|e| MseCurve {
            estimator: e.tag().to_string(),
            abscissa: cfg.abscissa.kind_tag().to_string(),
            points: Vec::new(),
            flagged: false,
        })
        .collect();
    let mut crb_points: Vec<MsePoint> = Vec::new();

    for (point_idx, &x) in cfg.abscissa.values().iter().enumerate() {
        let sc = scenario_at(&cfg.scenario, &cfg.abscissa, x);
        sc.wave.validate()?;
        sc.observation.validate()?;

        let truth = displacement_from_potentials(&sc.wave, geometry)?;
        let pattern = synthesize_pattern(&sc.pattern, geometry)?;
        let warped_pattern = warp_pattern(&pattern, &truth)?;

        let speckle_spec = SpeckleSpec { rng_seed: cfg.base_seed, ..cfg.speckle };
        let (speckle, warped_speckle) = if want(EstimatorKind::Dic) {
            let s = speckle_pattern(&speckle_spec, geometry)?;
            let w = warp_pattern(&s, &truth)?;
            (Some(s), Some(w))
        } else {
            (None, None)
        };

        let dic_margin = dic_params.invalid_margin();

        let results: Vec<TrialResult> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let g = (point_idx * cfg.trials + trial) as u64;
                let seed_ref = cfg.base_seed + 2 * g;
                let seed_def = cfg.base_seed + 2 * g + 1;

                let mut out = TrialResult { adopt: None, dic: None, mle: None };

                if want(EstimatorKind::Adopt) || want(EstimatorKind::Mle) {
                    let obs_ref = apply_observation(
                        &pattern,
                        &crate::forward::ObservationParams {
                            rng_seed: seed_ref,
                            ..sc.observation
                        },
                    );
                    let obs_def = apply_observation(
                        &warped_pattern,
                        &crate::forward::ObservationParams {
                            rng_seed: seed_def,
                            ..sc.observation
                        },
                    );
                    if let (Ok(obs_ref), Ok(obs_def)) = (obs_ref, obs_def) {
                        if want(EstimatorKind::Adopt) {
                            out.adopt = demodulate(&obs_ref, &obs_def, &cfg.adopt)
                                .ok()
                                .map(|res| field_mse(&res.field, &truth, 0));
                        }
                        if want(EstimatorKind::Mle) {
                            let init = perturbed_init(&sc.wave, cfg.base_seed ^ (g << 1));
                            out.mle = mle_fit(
                                &pattern,
                                &obs_def,
                                &init,
                                sc.observation.psf_sigma,
                            )
                            .ok()
                            .and_then(|fit| {
                                displacement_from_potentials(&fit.params, geometry)
                                    .ok()
                                    .map(|est| field_mse(&est, &truth, 0))
                            });
                        }
                    }
                }

                if let (Some(speckle), Some(warped_speckle)) = (&speckle, &warped_speckle) {
                    let obs_ref = apply_observation(
                        speckle,
                        &crate::forward::ObservationParams {
                            rng_seed: seed_ref,
                            ..sc.observation
                        },
                    );
                    let obs_def = apply_observation(
                        warped_speckle,
                        &crate::forward::ObservationParams {
                            rng_seed: seed_def,
                            ..sc.observation
                        },
                    );
                    if let (Ok(obs_ref), Ok(obs_def)) = (obs_ref, obs_def) {
                        out.dic = dic_displacement(&obs_ref, &obs_def, &dic_params)
                            .ok()
                            .map(|res| field_mse(&res.field, &truth, dic_margin));
                    }
                }

                out
            })
            .collect();

        for (curve, kind) in curves.iter_mut().zip(&cfg.estimators) {
            let samples: Vec<f64> = results
                .iter()
                .filter_map(|r| match kind {
                    EstimatorKind::Adopt => r.adopt,
                    EstimatorKind::Dic => r.dic,
                    EstimatorKind::Mle => r.mle,
                })
                .collect();
            let dropped = cfg.trials - samples.len();
            if samples.is_empty() {
                curve.flagged = true;
                curve.points.push(MsePoint {
                    x,
                    mse_db: f64::NAN,
                    std_err_db: f64::NAN,
                    n_trials: 0,
                    dropped,
                });
                continue;
            }
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                / (n - 1.0).max(1.0);
            let std_err = (var / n).sqrt();
            // Delta method: d(10 log10 m) = (10/ln 10) dm/m.
            let std_err_db = 10.0 / std::f64::consts::LN_10 * std_err / mean;
            if dropped as f64 > 0.1 * cfg.trials as f64 {
                curve.flagged = true;
            }
            curve.points.push(MsePoint {
                x,
                mse_db: 10.0 * mean.log10(),
                std_err_db,
                n_trials: samples.len(),
                dropped,
            });
        }

        if cfg.include_crb {
            let fisher = fisher_matrix(&sc.wave, &sc)?;
            let crb = crb_displacement(&fisher, &sc.wave, geometry)?;
            crb_points.push(MsePoint {
                x,
                mse_db: crb.mse_db,
                std_err_db: 0.0,
                n_trials: 0,
                dropped: 0,
            });
        }
    }

    if cfg.include_crb {
        curves.push(MseCurve {
            estimator: "crb".to_string(),
            abscissa: cfg.abscissa.kind_tag().to_string(),
            points: crb_points,
            flagged: false,
        });
    }
    Ok(curves)
}
