use texwave_core::forward::{
    apply_observation, displacement_from_potentials, synthesize_pattern, validate_constraints,
    warp_pattern, Scenario,
};
use texwave_core::io::write_scalar;

use crate::commands::write_displacement;
use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let mut scenario: Scenario = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.observation.rng_seed = seed;
    }
    scenario.validate()?;
    let geometry = scenario.geometry()?;

    let report = validate_constraints(
        &scenario.wave,
        &scenario.pattern,
        &geometry,
        &[(1, 0), (0, 1)],
    );
    if !report.all_pass() {
        for failure in report.failures() {
            eprintln!("constraint violation: {failure}");
        }
        return Err(CliError::new(2, "scenario violates the physical/spectral constraints"));
    }

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new(
        "simulate",
        serde_json::to_value(&scenario)?,
        Some(scenario.observation.rng_seed),
    );

    let pattern = manifest.stage("pattern", || synthesize_pattern(&scenario.pattern, geometry))?;
    let truth =
        manifest.stage("displacement", || displacement_from_potentials(&scenario.wave, geometry))?;
    let deformed = manifest.stage("warp", || warp_pattern(&pattern, &truth))?;

    let obs_ref = manifest.stage("observe_ref", || {
        apply_observation(
            &pattern,
            &texwave_core::forward::ObservationParams {
                rng_seed: scenario.observation.rng_seed,
                ..scenario.observation
            },
        )
    })?;
    let obs_def = manifest.stage("observe_def", || {
        apply_observation(
            &deformed,
            &texwave_core::forward::ObservationParams {
                rng_seed: scenario.observation.rng_seed.wrapping_add(1),
                ..scenario.observation
            },
        )
    })?;

    let ref_path = args.out.join("ref.f32f");
    let def_path = args.out.join("def.f32f");
    let truth_path = args.out.join("truth_uv.f32f");
    let report_path = args.out.join("constraints.json");

    write_scalar(&ref_path, &obs_ref)?;
    write_scalar(&def_path, &obs_def)?;
    write_displacement(&truth_path, &truth)?;
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    manifest.output(&ref_path);
    manifest.output(&def_path);
    manifest.output(&truth_path);
    manifest.output(&report_path);
    manifest.write(&args.out)?;

    println!(
        "simulate: wrote {} (constraints all pass: {})",
        args.out.display(),
        report.all_pass()
    );
    Ok(())
}
