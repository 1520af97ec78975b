use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use texwave_core::adopt::{demodulate, AdoptConfig};

use crate::commands::{mse_report, read_displacement, read_scalar, write_displacement};
use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

#[derive(Debug, Serialize, Deserialize)]
pub struct DemodulateConfig {
    /// Reference (undeformed) image container.
    pub reference: PathBuf,
    /// Deformed image container.
    pub deformed: PathBuf,
    #[serde(default)]
    pub adopt: AdoptConfig,
}

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let config: DemodulateConfig = load_config(&args.config)?;
    let reference = read_scalar(&config.reference)?;
    let deformed = read_scalar(&config.deformed)?;

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new("demodulate", serde_json::to_value(&config)?, args.seed);
    manifest.input(&config.reference);
    manifest.input(&config.deformed);

    let result = manifest.stage("demodulate", || demodulate(&reference, &deformed, &config.adopt))?;

    let uv_path = args.out.join("uv.f32f");
    write_displacement(&uv_path, &result.field)?;
    manifest.output(&uv_path);

    let sidecar_path = args.out.join("sidecar.json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&result.info)?)?;
    manifest.output(&sidecar_path);

    if let Some(truth_path) = &args.truth {
        let truth = read_displacement(truth_path)?;
        let report = mse_report(&result.field, &truth, 0);
        let mse_path = args.out.join("mse.json");
        std::fs::write(&mse_path, serde_json::to_string_pretty(&report)?)?;
        manifest.input(truth_path);
        manifest.output(&mse_path);
        println!("demodulate: mse = {:.2} dB", report["mse_db"].as_f64().unwrap());
    }

    manifest.write(&args.out)?;
    println!(
        "demodulate: theta_u {:.4} rad, theta_v {:.4} rad, carrier {:.5} c/px, masked {:.3}%",
        result.info.theta_u,
        result.info.theta_v,
        result.info.xi_p_u,
        100.0 * result.info.masked_fraction
    );
    Ok(())
}
