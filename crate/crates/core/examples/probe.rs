// Scratch probe for the benchmark scenario numbers (not part of the test
// suite; run with `cargo run -p texwave-core --example probe --release`).

use std::time::Instant;

use texwave_core::adopt::{demodulate, AdoptConfig};
use texwave_core::dic::{auto_window, dic_displacement, speckle_pattern, SpeckleSpec};
use texwave_core::eval::{crb_displacement, field_mse, fisher_matrix};
use texwave_core::forward::{
    apply_observation, displacement_from_potentials, synthesize_pattern, warp_pattern,
    ObservationParams, Scenario,
};

fn main() {
    let mut sc = Scenario::benchmark_default();
    if std::env::args().any(|a| a == "--midfield") {
        // Shift both window centers by two full carrier periods: identical
        // cosine phase, wave packet centered on the diagonal.
        let period = 1.0 / sc.wave.xi_m;
        sc.wave.phi_l += 2.0 * period;
        sc.wave.phi_t += 2.0 * period;
        println!("midfield: phi_L = {:.3}, phi_T = {:.3}", sc.wave.phi_l, sc.wave.phi_t);
    }
    if let Some(pos) = std::env::args().position(|a| a == "--amp") {
        let amp: f64 = std::env::args().nth(pos + 1).unwrap().parse().unwrap();
        sc.wave.amplitude = amp;
        println!("amplitude = {amp}");
    }
    if let Some(pos) = std::env::args().position(|a| a == "--snr") {
        let snr: f64 = std::env::args().nth(pos + 1).unwrap().parse().unwrap();
        sc.observation.snr_db = Some(snr);
        println!("snr = {snr} dB");
    }
    let g = sc.geometry().unwrap();
    let truth = displacement_from_potentials(&sc.wave, g).unwrap();
    println!("max |(U,V)| = {:.4} (a = {})", truth.max_norm(), sc.wave.amplitude);

    let pattern = synthesize_pattern(&sc.pattern, g).unwrap();
    let warped = warp_pattern(&pattern, &truth).unwrap();

    let speckle = speckle_pattern(&SpeckleSpec { rng_seed: 1, ..Default::default() }, g).unwrap();
    let warped_speckle = warp_pattern(&speckle, &truth).unwrap();

    let n_trials = 8;

    // ADOPT
    let t0 = Instant::now();
    let mut adopt_mses = Vec::new();
    for t in 0..n_trials {
        let obs_ref = apply_observation(
            &pattern,
            &ObservationParams { rng_seed: 100 + 2 * t, ..sc.observation },
        )
        .unwrap();
        let obs_def = apply_observation(
            &warped,
            &ObservationParams { rng_seed: 101 + 2 * t, ..sc.observation },
        )
        .unwrap();
        let res = demodulate(&obs_ref, &obs_def, &AdoptConfig::default()).unwrap();
        let mse = field_mse(&res.field, &truth, 0);
        adopt_mses.push(mse);
        if t == 0 {
            println!(
                "adopt info: theta_u {:.4} theta_v {:.4} xi_u {:.5} xi_v {:.5} masked {:.4}",
                res.info.theta_u, res.info.theta_v, res.info.xi_p_u, res.info.xi_p_v,
                res.info.masked_fraction
            );
        }
    }
    let adopt_mean = adopt_mses.iter().sum::<f64>() / n_trials as f64;
    println!(
        "ADOPT mse = {:.3e} px^2 = {:.2} dB   ({:.2?} per trial)",
        adopt_mean,
        10.0 * adopt_mean.log10(),
        t0.elapsed() / n_trials as u32
    );

    // DIC window scan
    let mut variants = vec![("auto".to_string(), auto_window(sc.wave.amplitude))];
    for b in [32usize, 48, 64] {
        let mut p = auto_window(sc.wave.amplitude);
        p.block = b;
        variants.push((format!("b{b}"), p));
    }
    for (tag, params) in variants {
        let t0 = Instant::now();
        let mut mses = Vec::new();
        for t in 0..n_trials {
            let obs_ref = apply_observation(
                &speckle,
                &ObservationParams { rng_seed: 100 + 2 * t, ..sc.observation },
            )
            .unwrap();
            let obs_def = apply_observation(
                &warped_speckle,
                &ObservationParams { rng_seed: 101 + 2 * t, ..sc.observation },
            )
            .unwrap();
            let res = dic_displacement(&obs_ref, &obs_def, &params).unwrap();
            mses.push(field_mse(&res.field, &truth, res.valid_margin));
        }
        let mean = mses.iter().sum::<f64>() / n_trials as f64;
        println!(
            "DIC {tag}: mse = {:.3e} px^2 = {:.2} dB   ({:.2?} per trial)",
            mean,
            10.0 * mean.log10(),
            t0.elapsed() / n_trials as u32
        );
    }

    // CRB
    let t0 = Instant::now();
    let fisher = fisher_matrix(&sc.wave, &sc).unwrap();
    let crb = crb_displacement(&fisher, &sc.wave, g).unwrap();
    println!(
        "CRB = {:.2} dB (cond {:.2e}) in {:.2?}",
        crb.mse_db,
        crb.condition_number,
        t0.elapsed()
    );
}
