use texwave_core::eval::{run_sweep, MseCurve, SweepConfig};
use texwave_core::io::write_csv;
use texwave_core::plot::{line_chart, ChartLabels, Series};

use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let mut config: SweepConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new("bench", serde_json::to_value(&config)?, Some(config.base_seed));

    let curves = manifest.stage("sweep", || run_sweep(&config))?;

    let csv_path = args.out.join("curves.csv");
    let mut rows = Vec::new();
    for curve in &curves {
        for p in &curve.points {
            rows.push(vec![
                curve.abscissa.clone(),
                curve.estimator.clone(),
                format!("{:.6}", p.x),
                format!("{:.4}", p.mse_db),
                format!("{:.4}", p.std_err_db),
                p.n_trials.to_string(),
                p.dropped.to_string(),
            ]);
        }
    }
    write_csv(
        &csv_path,
        &["abscissa", "estimator", "x", "mse_db", "std_err_db", "n_trials", "dropped"],
        &rows,
    )?;
    manifest.output(&csv_path);

    if args.plot {
        let svg_path = args.out.join("mse.svg");
        std::fs::write(&svg_path, curves_svg(&curves))?;
        manifest.output(&svg_path);
    }

    manifest.write(&args.out)?;
    for curve in &curves {
        let tail = curve
            .points
            .last()
            .map(|p| format!("{:.2} dB at x = {}", p.mse_db, p.x))
            .unwrap_or_default();
        println!(
            "bench: {} ({} points{}), last point {tail}",
            curve.estimator,
            curve.points.len(),
            if curve.flagged { ", FLAGGED: dropped trials" } else { "" },
        );
    }
    Ok(())
}

pub fn curves_svg(curves: &[MseCurve]) -> String {
    let abscissa = curves.first().map(|c| c.abscissa.clone()).unwrap_or_default();
    let labels = ChartLabels {
        title: "Displacement MSE".into(),
        x_label: if abscissa == "snr_db" { "SNR (dB)".into() } else { "normalized frequency".into() },
        y_label: "MSE (dB re 1 px^2)".into(),
    };
    let series: Vec<Series> = curves
        .iter()
        .map(|curve| {
            let pts: Vec<(f64, f64)> =
                curve.points.iter().filter(|p| p.mse_db.is_finite()).map(|p| (p.x, p.mse_db)).collect();
            let bands: Vec<f64> = curve
                .points
                .iter()
                .filter(|p| p.mse_db.is_finite())
                .map(|p| p.std_err_db)
                .collect();
            let s = Series::new(curve.estimator.clone(), pts).with_band(bands);
            if curve.estimator == "crb" {
                s.dashed()
            } else {
                s
            }
        })
        .collect();
    line_chart(&labels, &series)
}
