//! Acceptance suite: one pass/fail line per criterion, run sequentially in a
//! single test so timing-sensitive checks are not perturbed by parallel
//! tests. Heavy Monte-Carlo work parallelizes internally across trials.
//!
//! Run with `cargo test -p texwave-cli --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use texwave_core::adopt::{
    analytic_spectrum, demodulate, oriented_analytic, orientation_filter, unwrap_phase,
    wrapped_displacement, AdoptConfig, WrappedPhaseField,
};
use texwave_core::dic::{DicParams, Subpixel};
use texwave_core::eval::{
    fisher_matrix_with_step, run_sweep, Abscissa, EstimatorKind, MseCurve, SweepConfig,
};
use texwave_core::forward::{
    displacement_from_potentials, synthesize_pattern, warp_pattern, CellKind, DisplacementField,
    PatternSpec, Scenario, WaveParams,
};
use texwave_core::grid::{fft2d_real, freq_cycles};
use texwave_core::{GridGeometry, ScalarField};

type CheckResult = Result<String, String>;

fn bench_dic_params() -> DicParams {
    // Tuned to the reference DIC operating point of the benchmark scenario.
    DicParams { block: 64, search: 4, overlap: 0.75, subpixel: Subpixel::Quadratic3x3 }
}

fn base_sweep(abscissa: Abscissa, estimators: Vec<EstimatorKind>, trials: usize) -> SweepConfig {
    SweepConfig {
        scenario: Scenario::benchmark_default(),
        abscissa,
        estimators,
        trials,
        base_seed: 20240,
        adopt: AdoptConfig::default(),
        dic: Some(bench_dic_params()),
        speckle: Default::default(),
        include_crb: true,
    }
}

fn curve<'a>(curves: &'a [MseCurve], tag: &str) -> &'a MseCurve {
    curves.iter().find(|c| c.estimator == tag).expect("curve present")
}

/// Least-squares slope of mse_db over x for a window of points.
fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}

// ---------------------------------------------------------------------------
// Criterion 1: benchmark-scenario MSE reproduction, >= 50 trials, <= 5 min.
// ---------------------------------------------------------------------------
fn criterion_1() -> CheckResult {
    let start = Instant::now();
    let cfg = base_sweep(
        Abscissa::SnrDb(vec![20.0]),
        vec![EstimatorKind::Adopt, EstimatorKind::Dic],
        50,
    );
    let curves = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let adopt = curve(&curves, "adopt").points[0].mse_db;
    let dic = curve(&curves, "dic").points[0].mse_db;
    let elapsed = start.elapsed().as_secs_f64();

    let mut failures = Vec::new();
    if !(adopt <= -18.0) {
        failures.push(format!("ADOPT MSE {adopt:.2} dB above the -18 dB gate"));
    }
    if !(-14.0..=-8.0).contains(&dic) {
        failures.push(format!("DIC MSE {dic:.2} dB outside [-14, -8] dB"));
    }
    if elapsed > 300.0 {
        failures.push(format!("runtime {elapsed:.0} s exceeds 5 min"));
    }
    if failures.is_empty() {
        Ok(format!(
            "ADOPT {adopt:.2} dB (<= -18), DIC {dic:.2} dB (in [-14, -8]), {elapsed:.0} s"
        ))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Criterion 2: MSE-vs-SNR curve shape.
// ---------------------------------------------------------------------------
fn criterion_2() -> CheckResult {
    let cfg = base_sweep(
        Abscissa::SnrDb(vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]),
        vec![EstimatorKind::Adopt, EstimatorKind::Dic],
        30,
    );
    let curves = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let adopt = curve(&curves, "adopt");
    let dic = curve(&curves, "dic");
    let crb = curve(&curves, "crb");

    let mut failures = Vec::new();

    // Non-increasing within standard error.
    for w in adopt.points.windows(2) {
        let slack = 2.0 * (w[0].std_err_db + w[1].std_err_db);
        if w[1].mse_db > w[0].mse_db + slack {
            failures.push(format!(
                "MSE increases from {:.2} to {:.2} dB between SNR {} and {}",
                w[0].mse_db, w[1].mse_db, w[0].x, w[1].x
            ));
        }
    }

    // Some 3-consecutive-point window fits with slope -1 +- 0.2 dB/dB.
    let pts: Vec<(f64, f64)> = adopt.points.iter().map(|p| (p.x, p.mse_db)).collect();
    let noise_limited = pts.windows(3).map(ls_slope).any(|s| (-1.2..=-0.8).contains(&s));
    if !noise_limited {
        let slopes: Vec<f64> = pts.windows(3).map(ls_slope).collect();
        failures.push(format!("no 3-point window with slope in [-1.2, -0.8]: {slopes:?}"));
    }

    // Plateau at the high-SNR end: the last three points are nearly flat.
    let tail_slope = ls_slope(&pts[pts.len() - 3..]);
    if tail_slope.abs() > 0.3 {
        failures.push(format!("no plateau: tail slope {tail_slope:.3} dB/dB"));
    }

    // Above the bound everywhere.
    for (p, c) in adopt.points.iter().zip(&crb.points) {
        if p.mse_db < c.mse_db - 2.0 * p.std_err_db {
            failures.push(format!("MSE below CRB at SNR {}", p.x));
        }
    }

    // Beats DIC at every point at or above 15 dB.
    for (p, d) in adopt.points.iter().zip(&dic.points) {
        if p.x >= 15.0 && p.mse_db >= d.mse_db {
            failures.push(format!(
                "ADOPT {:.2} dB not below DIC {:.2} dB at SNR {}",
                p.mse_db, d.mse_db, p.x
            ));
        }
    }

    if failures.is_empty() {
        let first = adopt.points.first().unwrap().mse_db;
        let last = adopt.points.last().unwrap().mse_db;
        Ok(format!(
            "ADOPT {first:.1} -> {last:.1} dB, noise-limited slope window found, \
             plateau tail slope {tail_slope:.3}"
        ))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Criterion 3: MSE vs normalized frequency at SNR 20 dB.
// ---------------------------------------------------------------------------
fn criterion_3() -> CheckResult {
    let cfg = base_sweep(
        Abscissa::NormalizedFrequency(vec![0.1, 0.3, 0.5, 0.7, 0.9]),
        vec![EstimatorKind::Adopt, EstimatorKind::Dic],
        30,
    );
    let curves = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let adopt = curve(&curves, "adopt");
    let dic = curve(&curves, "dic");

    let mut failures = Vec::new();
    for c in [adopt, dic] {
        let first = c.points.first().unwrap();
        let last = c.points.last().unwrap();
        if last.mse_db <= first.mse_db {
            failures.push(format!(
                "{} MSE does not increase with xi_n ({:.2} -> {:.2} dB)",
                c.estimator, first.mse_db, last.mse_db
            ));
        }
    }
    for (a, d) in adopt.points.iter().zip(&dic.points) {
        if a.x >= 0.3 && d.mse_db <= a.mse_db {
            failures.push(format!(
                "DIC {:.2} dB not above ADOPT {:.2} dB at xi_n = {}",
                d.mse_db, a.mse_db, a.x
            ));
        }
    }

    if failures.is_empty() {
        Ok(format!(
            "ADOPT {:.1} -> {:.1} dB, DIC {:.1} -> {:.1} dB over xi_n in [0.1, 0.9]",
            adopt.points[0].mse_db,
            adopt.points.last().unwrap().mse_db,
            dic.points[0].mse_db,
            dic.points.last().unwrap().mse_db
        ))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: the high-SNR plateau drops by at least 3 dB when the
// amplitude halves (a = 0.005 l vs a = 0.01 l).
// ---------------------------------------------------------------------------
fn criterion_4() -> CheckResult {
    let plateau = |amplitude: f64| -> Result<f64, String> {
        let mut cfg = base_sweep(
            Abscissa::SnrDb(vec![50.0, 60.0]),
            vec![EstimatorKind::Adopt],
            30,
        );
        cfg.scenario.wave.amplitude = amplitude;
        cfg.include_crb = false;
        let curves = run_sweep(&cfg).map_err(|e| e.to_string())?;
        Ok(curve(&curves, "adopt").points.last().unwrap().mse_db)
    };
    let l = 400.0;
    let low = plateau(0.005 * l)?;
    let high = plateau(0.01 * l)?;
    if low <= high - 3.0 {
        Ok(format!("plateau {low:.2} dB at a = 0.005 l vs {high:.2} dB at a = 0.01 l"))
    } else {
        Err(format!(
            "plateau gap {:.2} dB < 3 dB (a = 0.005 l: {low:.2}, a = 0.01 l: {high:.2})",
            high - low
        ))
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: estimator micro-properties, < 1 min total.
// ---------------------------------------------------------------------------
fn criterion_5() -> CheckResult {
    let start = Instant::now();
    let mut failures = Vec::new();

    let g = GridGeometry::new(128, 128).unwrap();
    let pattern =
        synthesize_pattern(&PatternSpec::new(0.125, CellKind::Dots { diameter: None }), g)
            .map_err(|e| e.to_string())?;

    // Zero displacement -> zero field.
    let res = demodulate(&pattern, &pattern, &AdoptConfig::default()).map_err(|e| e.to_string())?;
    let max_abs = res
        .field
        .u
        .data()
        .iter()
        .chain(res.field.v.data())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_abs >= 1e-3 {
        failures.push(format!("zero-displacement residual {max_abs:.2e} px"));
    }

    // Subpixel translations recovered within 0.02 px.
    for delta in [0.1, 0.25, 0.5] {
        let shift = DisplacementField::new(
            ScalarField::from_fn(g, |_, _| delta),
            ScalarField::from_fn(g, |_, _| delta),
        )
        .unwrap();
        let deformed = warp_pattern(&pattern, &shift).map_err(|e| e.to_string())?;
        let res =
            demodulate(&pattern, &deformed, &AdoptConfig::default()).map_err(|e| e.to_string())?;
        let mut sum_u = 0.0;
        let mut sum_v = 0.0;
        let mut n = 0usize;
        for r in 8..120 {
            for c in 8..120 {
                sum_u += res.field.u.at(r, c);
                sum_v += res.field.v.at(r, c);
                n += 1;
            }
        }
        let (mu, mv) = (sum_u / n as f64, sum_v / n as f64);
        if (mu - delta).abs() > 0.02 || (mv - delta).abs() > 0.02 {
            failures.push(format!("translation {delta} px recovered as ({mu:.4}, {mv:.4})"));
        }
    }

    // Unwrap then rewrap is the identity.
    let xi_p = 0.125;
    let truth = ScalarField::from_fn(g, |x, _| 20.0 * x / 127.0 - 10.0);
    let wrap_rad = |x: f64| {
        let tau = 2.0 * PI;
        let mut w = x - tau * (x / tau).round();
        if w <= -PI {
            w += tau;
        }
        w
    };
    let wrapped_phase = truth.map(|d| wrap_rad(d * 2.0 * PI * xi_p));
    let w = WrappedPhaseField::from_phase(wrapped_phase.clone(), xi_p).unwrap();
    let unwrapped = unwrap_phase(&w);
    for (u, p) in unwrapped.data().iter().zip(wrapped_phase.data()) {
        if (wrap_rad(u * 2.0 * PI * xi_p) - p).abs() > 1e-9 {
            failures.push("rewrap does not reproduce the wrapped input".to_string());
            break;
        }
    }

    // Analytic half-plane support is exactly zero.
    let theta = PI / 3.0;
    let filtered =
        orientation_filter(&pattern, theta, xi_p, &AdoptConfig::default()).map_err(|e| e.to_string())?;
    let masked = analytic_spectrum(&fft2d_real(&filtered).map_err(|e| e.to_string())?, theta);
    let (sin_t, cos_t) = theta.sin_cos();
    for r in 0..g.rows {
        for c in 0..g.cols {
            let d = freq_cycles(c, g.cols) * cos_t + freq_cycles(r, g.rows) * sin_t;
            let v = masked.at(r, c);
            if d < 0.0 && (v.re != 0.0 || v.im != 0.0) {
                failures.push(format!("half-plane bin ({r},{c}) not exactly zero"));
            }
        }
    }

    // Fisher: symmetric, PSD, step-halving changes entries by < 1%.
    let mut sc = Scenario::benchmark_default();
    sc.grid.rows = 128;
    sc.grid.cols = 128;
    sc.pattern = PatternSpec::new(0.125, CellKind::Dots { diameter: None });
    sc.wave.xi_m = 3.33 / 128.0;
    sc.wave.amplitude = 0.005 * 128.0;
    let two_periods = 2.0 / sc.wave.xi_m;
    sc.wave.phi_l = 1.0 + two_periods * 0.5;
    sc.wave.phi_t = 0.33 + two_periods * 0.5;
    let f1 = fisher_matrix_with_step(&sc.wave, &sc, 1e-4).map_err(|e| e.to_string())?;
    let f2 = fisher_matrix_with_step(&sc.wave, &sc, 5e-5).map_err(|e| e.to_string())?;
    if f1.max_asymmetry() > 1e-8 * f1.matrix().norm() {
        failures.push("information matrix asymmetric".to_string());
    }
    if f1.min_eigenvalue() < -1e-10 * f1.matrix().trace() {
        failures.push(format!("information matrix not PSD: {}", f1.min_eigenvalue()));
    }
    let rel_change = (f1.matrix() - f2.matrix()).norm() / f1.matrix().norm();
    if rel_change >= 0.01 {
        failures.push(format!("step-halving changes the matrix by {rel_change:.3}"));
    }

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 60.0 {
        failures.push(format!("micro-suite took {elapsed:.0} s (> 60 s)"));
    }

    if failures.is_empty() {
        Ok(format!("all micro-properties hold, {elapsed:.1} s"))
    } else {
        Err(failures.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Criterion 6: dispersion pipeline on the synthetic traveling wave.
// ---------------------------------------------------------------------------
fn texwave_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_texwave"))
}

fn synthseq_config(amplitude: f64, snr_db: Option<f64>, seed: u64) -> String {
    let snr = snr_db.map_or("null".to_string(), |v| v.to_string());
    format!(
        r#"{{
            "grid": {{ "rows": 1024, "cols": 64 }},
            "pattern": {{ "xi_p": 0.1, "cell": {{ "dots": {{ "diameter": null }} }} }},
            "speckle": {{ "coverage": 0.3, "dot_radius": 1.5, "rng_seed": 0 }},
            "wave": {{ "amplitude_px": {amplitude}, "speed_m_per_s": 11.0, "xi_m": 0.001667 }},
            "frame_rate_hz": 3000.0,
            "frames": 200,
            "px_per_cm": 30.0,
            "observation": {{ "psf_sigma": 0.5, "snr_db": {snr}, "quant_bits": 8, "seed": {seed} }},
            "emit": ["periodic", "speckle"]
        }}"#
    )
}

fn dispersion_config(stack: &Path, method: &str, max_displacement: f64) -> String {
    format!(
        r#"{{
            "sequence": {{ "stack": "{}", "frame_rate_hz": 3000.0, "px_per_cm": 30.0 }},
            "method": "{method}",
            "max_displacement": {max_displacement},
            "band_hz": [40.0, 80.0]
        }}"#,
        stack.display()
    )
}

fn run_dispersion(
    dir: &Path,
    tag: &str,
    stack: &Path,
    method: &str,
    max_displacement: f64,
) -> Result<Vec<(f64, f64)>, String> {
    let cfg_path = dir.join(format!("disp_{tag}.json"));
    std::fs::write(&cfg_path, dispersion_config(stack, method, max_displacement))
        .map_err(|e| e.to_string())?;
    let out = dir.join(format!("disp_{tag}"));
    let output = texwave_cmd()
        .args([
            "dispersion",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "dispersion {tag} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    let csv = std::fs::read_to_string(out.join("curve.csv")).map_err(|e| e.to_string())?;
    Ok(csv
        .lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            (cols[0].parse().unwrap(), cols[2].parse().unwrap())
        })
        .collect())
}

fn criterion_6() -> CheckResult {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut failures = Vec::new();

    // 6a: c = 11 m/s recovered flat within 2% over 40-80 Hz at SNR 20 dB.
    let cfg_path = dir.path().join("synth.json");
    std::fs::write(&cfg_path, synthseq_config(1.0, Some(20.0), 3)).map_err(|e| e.to_string())?;
    let seq_out = dir.path().join("seq");
    let output = texwave_cmd()
        .args([
            "synthseq",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            seq_out.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!("synthseq failed: {}", String::from_utf8_lossy(&output.stderr)));
    }

    // Ground-truth ridge speed from the truth map.
    let truth = texwave_core::io::read_field(&seq_out.join("truth_map.f32f"))
        .and_then(|f| f.into_real())
        .map_err(|e| e.to_string())?;
    let ridge_speed = truth_ridge_speed(&truth, 3000.0, 30.0);
    if (ridge_speed - 11.0).abs() / 11.0 > 0.005 {
        failures.push(format!("truth ridge speed {ridge_speed:.3} m/s off 11 m/s by > 0.5%"));
    }

    let samples = run_dispersion(
        dir.path(),
        "adopt20",
        &seq_out.join("periodic/frames.f32f"),
        "adopt",
        2.0,
    )?;
    if samples.is_empty() {
        failures.push("no dispersion samples in the band".to_string());
    }
    for (f, c) in &samples {
        if (c - 11.0).abs() / 11.0 > 0.02 {
            failures.push(format!("c({f}) = {c:.3} m/s off 11 m/s by > 2%"));
        }
    }

    // 6b: at amplitude 0.05 px and SNR 10 dB the ADOPT curve spread over 10
    // seeded runs stays below the DIC spread.
    let band_grid: Vec<f64> = vec![45.0, 60.0, 75.0];
    let mut adopt_runs: Vec<Vec<f64>> = Vec::new();
    let mut dic_runs: Vec<Vec<f64>> = Vec::new();
    let mut dic_failures = 0usize;
    for run in 0..10u64 {
        let cfg_path = dir.path().join(format!("synth_low_{run}.json"));
        std::fs::write(&cfg_path, synthseq_config(0.05, Some(10.0), 100 + run))
            .map_err(|e| e.to_string())?;
        let seq_out = dir.path().join(format!("seq_low_{run}"));
        let output = texwave_cmd()
            .args([
                "synthseq",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                seq_out.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(format!(
                "low-amplitude synthseq failed: {}",
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        match run_dispersion(
            dir.path(),
            &format!("a{run}"),
            &seq_out.join("periodic/frames.f32f"),
            "adopt",
            1.0,
        ) {
            Ok(samples) => adopt_runs.push(resample(&samples, &band_grid)),
            Err(e) => return Err(format!("ADOPT dispersion failed on run {run}: {e}")),
        }
        match run_dispersion(
            dir.path(),
            &format!("d{run}"),
            &seq_out.join("speckle/frames.f32f"),
            "dic",
            1.0,
        ) {
            Ok(samples) => dic_runs.push(resample(&samples, &band_grid)),
            Err(_) => dic_failures += 1,
        }
    }

    let adopt_std = mean_std(&adopt_runs);
    if dic_runs.len() >= 2 {
        let dic_std = mean_std(&dic_runs);
        if adopt_std >= dic_std {
            failures.push(format!(
                "ADOPT curve std {adopt_std:.4} not below DIC curve std {dic_std:.4}"
            ));
        } else {
            println!(
                "    criterion 6 detail: curve std {adopt_std:.4} m/s (ADOPT) vs \
                 {dic_std:.4} m/s (DIC, {dic_failures} failed runs)"
            );
        }
    } else {
        // DIC could not produce curves at this amplitude at all.
        println!(
            "    criterion 6 detail: DIC produced {} usable curves out of 10; \
             ADOPT std {adopt_std:.4} m/s",
            dic_runs.len()
        );
    }

    if failures.is_empty() {
        Ok(format!(
            "c recovered within 2% over the band; ADOPT spread {:.4} m/s vs DIC {} ({} DIC failures)",
            adopt_std,
            if dic_runs.len() >= 2 {
                format!("{:.4} m/s", mean_std(&dic_runs))
            } else {
                "unusable".to_string()
            },
            dic_failures
        ))
    } else {
        Err(failures.join("; "))
    }
}

/// Linear interpolation of (f, c) samples onto a fixed frequency grid.
fn resample(samples: &[(f64, f64)], grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&f| {
            if samples.is_empty() {
                return f64::NAN;
            }
            if f <= samples[0].0 {
                return samples[0].1;
            }
            if f >= samples[samples.len() - 1].0 {
                return samples[samples.len() - 1].1;
            }
            for w in samples.windows(2) {
                if f >= w[0].0 && f <= w[1].0 {
                    let t = (f - w[0].0) / (w[1].0 - w[0].0);
                    return (1.0 - t) * w[0].1 + t * w[1].1;
                }
            }
            samples[samples.len() - 1].1
        })
        .collect()
}

/// Mean over the grid of the per-frequency standard deviation across runs.
fn mean_std(runs: &[Vec<f64>]) -> f64 {
    let n_grid = runs[0].len();
    let mut acc = 0.0;
    for j in 0..n_grid {
        let vals: Vec<f64> = runs.iter().map(|r| r[j]).filter(|v| v.is_finite()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        acc += var.sqrt();
    }
    acc / n_grid as f64
}

/// Speed of the maximum-displacement ridge in a (position x time) truth map.
fn truth_ridge_speed(map: &ScalarField, frame_rate: f64, px_per_cm: f64) -> f64 {
    let n_pos = map.rows();
    let n_time = map.cols();
    let mut points = Vec::new();
    for t in 0..n_time {
        let mut best = (0usize, 0.0f64);
        for y in 0..n_pos {
            let v = map.at(y, t).abs();
            if v > best.1 {
                best = (y, v);
            }
        }
        // Use only frames where the ridge is interior and strong.
        if best.1 > 0.3 && best.0 > 8 && best.0 < n_pos - 8 {
            points.push((t as f64 / frame_rate, best.0 as f64 / px_per_cm / 100.0));
        }
    }
    ls_slope(&points)
}

// ---------------------------------------------------------------------------
// Criterion 7: resolution-limit scaling.
// ---------------------------------------------------------------------------
fn criterion_7() -> CheckResult {
    use texwave_core::adopt::resolution_limit;
    let mut failures = Vec::new();

    // Doubling xi_p on a pure cosine doubles the max gradient and halves the
    // limit exactly.
    let quant = 1.0 / 255.0;
    let grad = |xi_p: f64| 0.45 * 2.0 * PI * xi_p;
    let l1 = resolution_limit(quant, grad(0.0625)).map_err(|e| e.to_string())?;
    let l2 = resolution_limit(quant, grad(0.125)).map_err(|e| e.to_string())?;
    if l1 / 2.0 != l2 {
        failures.push(format!("halving not exact: {l1} vs {l2}"));
    }

    // Measured smallest reliably detected translation tracks the predicted
    // limit within a factor of two (noiseless, 8-bit quantization).
    let g = GridGeometry::new(128, 128).unwrap();
    let xi_p = 0.0625;
    let limit = quant / grad(xi_p);
    let quantize = |f: &ScalarField| f.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() / 255.0);
    let cosine = |shift: f64| {
        ScalarField::from_fn(g, |x, _| 0.5 + 0.45 * (2.0 * PI * xi_p * (x - shift)).cos())
    };
    let reference = quantize(&cosine(0.0));
    let cfg = AdoptConfig::default();
    let estimate = |delta: f64| -> Result<f64, String> {
        let deformed = quantize(&cosine(delta));
        let filt_ref =
            orientation_filter(&reference, 0.0, xi_p, &cfg).map_err(|e| e.to_string())?;
        let filt_def =
            orientation_filter(&deformed, 0.0, xi_p, &cfg).map_err(|e| e.to_string())?;
        let a_ref = oriented_analytic(&filt_ref, 0.0).map_err(|e| e.to_string())?;
        let a_def = oriented_analytic(&filt_def, 0.0).map_err(|e| e.to_string())?;
        let w = wrapped_displacement(&a_ref, &a_def, xi_p).map_err(|e| e.to_string())?;
        Ok(w.displacement().mean())
    };
    let mut detected: Option<f64> = None;
    for factor in [0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let delta = factor * limit;
        let est = estimate(delta)?;
        if (est - delta).abs() <= 0.5 * delta {
            detected = Some(delta);
            break;
        }
    }
    match detected {
        Some(d) if d >= limit / 2.0 && d <= 2.0 * limit => {
            if failures.is_empty() {
                return Ok(format!(
                    "exact halving holds; smallest detected translation {d:.2e} px vs \
                     predicted {limit:.2e} px"
                ));
            }
        }
        Some(d) => failures.push(format!(
            "smallest detected translation {d:.2e} px outside factor 2 of {limit:.2e} px"
        )),
        None => failures.push("no translation in the scan was detected".to_string()),
    }
    Err(failures.join("; "))
}

// ---------------------------------------------------------------------------
// Criterion 8: complexity scaling.
// ---------------------------------------------------------------------------
fn criterion_8() -> CheckResult {
    use texwave_core::dic::dic_displacement;
    use texwave_core::forward::apply_observation;
    use texwave_core::forward::ObservationParams;

    let mut failures = Vec::new();

    // ADOPT demodulation time ratio l = 800 vs l = 400 in [4, 6].
    let demod_time = |l: usize| -> Result<f64, String> {
        let g = GridGeometry::new(l, l).unwrap();
        let pattern =
            synthesize_pattern(&PatternSpec::new(33.33 / l as f64, CellKind::Dots { diameter: None }), g)
                .map_err(|e| e.to_string())?;
        let mut wave = Scenario::benchmark_default().wave;
        wave.xi_m = 3.33 / l as f64;
        wave.amplitude = 0.005 * l as f64;
        let two_periods = 2.0 / wave.xi_m;
        wave.phi_l = 1.0 + two_periods * (l as f64 / 800.0);
        wave.phi_t = 0.33 + two_periods * (l as f64 / 800.0);
        let truth = displacement_from_potentials(&wave, g).map_err(|e| e.to_string())?;
        let deformed = warp_pattern(&pattern, &truth).map_err(|e| e.to_string())?;
        let obs = ObservationParams { rng_seed: 5, ..Default::default() };
        let obs_ref = apply_observation(&pattern, &obs).map_err(|e| e.to_string())?;
        let obs_def = apply_observation(&deformed, &obs).map_err(|e| e.to_string())?;
        let cfg = AdoptConfig::default();
        // Warmup, then best of three.
        demodulate(&obs_ref, &obs_def, &cfg).map_err(|e| e.to_string())?;
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t = Instant::now();
            demodulate(&obs_ref, &obs_def, &cfg).map_err(|e| e.to_string())?;
            best = best.min(t.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    let t400 = demod_time(400)?;
    let t800 = demod_time(800)?;
    let adopt_ratio = t800 / t400;
    if !(4.0..=6.0).contains(&adopt_ratio) {
        failures.push(format!(
            "ADOPT time ratio {adopt_ratio:.2} outside [4, 6] ({t400:.3} s -> {t800:.3} s)"
        ));
    }

    // DIC time ratio for s -> 2s in [3.4, 5.2].
    let g = GridGeometry::new(400, 400).unwrap();
    let speckle = texwave_core::dic::speckle_pattern(
        &texwave_core::dic::SpeckleSpec { rng_seed: 2, ..Default::default() },
        g,
    )
    .map_err(|e| e.to_string())?;
    let shift = DisplacementField::new(
        ScalarField::from_fn(g, |_, _| 1.5),
        ScalarField::from_fn(g, |_, _| -0.5),
    )
    .unwrap();
    let deformed = warp_pattern(&speckle, &shift).map_err(|e| e.to_string())?;
    let dic_time = |search: usize| -> Result<f64, String> {
        let params =
            DicParams { block: 32, search, overlap: 0.75, subpixel: Subpixel::Quadratic3x3 };
        dic_displacement(&speckle, &deformed, &params).map_err(|e| e.to_string())?;
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t = Instant::now();
            dic_displacement(&speckle, &deformed, &params).map_err(|e| e.to_string())?;
            best = best.min(t.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    let t_s = dic_time(6)?;
    let t_2s = dic_time(12)?;
    let dic_ratio = t_2s / t_s;
    if !(3.4..=5.2).contains(&dic_ratio) {
        failures.push(format!(
            "DIC time ratio {dic_ratio:.2} outside [3.4, 5.2] ({t_s:.3} s -> {t_2s:.3} s)"
        ));
    }

    if failures.is_empty() {
        Ok(format!("ADOPT l-ratio {adopt_ratio:.2} in [4, 6]; DIC s-ratio {dic_ratio:.2} in [3.4, 5.2]"))
    } else {
        Err(failures.join("; "))
    }
}

#[test]
fn acceptance_criteria() {
    let checks: Vec<(&str, fn() -> CheckResult)> = vec![
        ("1 benchmark-scenario MSE", criterion_1),
        ("2 MSE-vs-SNR shape", criterion_2),
        ("3 MSE-vs-frequency trend", criterion_3),
        ("4 plateau-amplitude law", criterion_4),
        ("5 estimator micro-properties", criterion_5),
        ("6 dispersion pipeline", criterion_6),
        ("7 resolution-limit scaling", criterion_7),
        ("8 complexity scaling", criterion_8),
    ];

    let mut failed = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("criterion {name}: PASS — {detail}"),
            Err(detail) => {
                println!("criterion {name}: FAIL — {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
