use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use texwave_core::dic::{auto_window, dic_displacement, DicParams};
use texwave_core::io::write_csv;

use crate::commands::{mse_report, read_displacement, read_scalar, write_displacement};
use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

#[derive(Debug, Serialize, Deserialize)]
pub struct DicCommandConfig {
    pub reference: PathBuf,
    pub deformed: PathBuf,
    /// Explicit correlation parameters; otherwise adapted to
    /// `max_displacement`.
    #[serde(default)]
    pub params: Option<DicParams>,
    /// Expected maximum displacement (pixels) for the window-size rule.
    #[serde(default)]
    pub max_displacement: Option<f64>,
}

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let config: DicCommandConfig = load_config(&args.config)?;
    let reference = read_scalar(&config.reference)?;
    let deformed = read_scalar(&config.deformed)?;

    let params = match (config.params, config.max_displacement) {
        (Some(p), _) => p,
        (None, Some(a)) => auto_window(a),
        (None, None) => {
            return Err(CliError::new(2, "config needs either `params` or `max_displacement`"));
        }
    };

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new("dic", serde_json::to_value(&config)?, args.seed);
    manifest.input(&config.reference);
    manifest.input(&config.deformed);

    let result = manifest.stage("correlate", || dic_displacement(&reference, &deformed, &params))?;

    let uv_path = args.out.join("uv.f32f");
    write_displacement(&uv_path, &result.field)?;
    manifest.output(&uv_path);

    let nodes_path = args.out.join("nodes.csv");
    let rows: Vec<Vec<String>> = result
        .nodes
        .iter()
        .map(|n| {
            vec![
                n.x.to_string(),
                n.y.to_string(),
                format!("{:.6}", n.u),
                format!("{:.6}", n.v),
                format!("{:.6}", n.score),
                (n.valid as u8).to_string(),
            ]
        })
        .collect();
    write_csv(&nodes_path, &["x", "y", "u", "v", "score", "valid"], &rows)?;
    manifest.output(&nodes_path);

    if let Some(truth_path) = &args.truth {
        let truth = read_displacement(truth_path)?;
        let report = mse_report(&result.field, &truth, result.valid_margin);
        let mse_path = args.out.join("mse.json");
        std::fs::write(&mse_path, serde_json::to_string_pretty(&report)?)?;
        manifest.input(truth_path);
        manifest.output(&mse_path);
        println!("dic: mse = {:.2} dB over the valid interior", report["mse_db"].as_f64().unwrap());
    }

    manifest.write(&args.out)?;
    println!(
        "dic: {} x {} nodes (block {}, search {}), invalid border {} px",
        result.nodes_x, result.nodes_y, params.block, params.search, result.valid_margin
    );
    Ok(())
}
