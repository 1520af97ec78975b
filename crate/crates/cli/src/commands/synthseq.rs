use serde::{Deserialize, Serialize};
use texwave_core::dic::{speckle_pattern, SpeckleSpec};
use texwave_core::forward::{
    apply_observation, synthesize_pattern, warp_pattern, DisplacementField, GridConfig,
    ObservationParams, PatternSpec, WaveModel, WaveParams,
};
use texwave_core::io::{write_csv, write_scalar, write_stack};
use texwave_core::{GridGeometry, ScalarField};

use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

/// Traveling longitudinal wave: a windowed-sinusoid packet moving along +y
/// at constant speed, painted through the forward model frame by frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TravelingWave {
    pub amplitude_px: f64,
    pub speed_m_per_s: f64,
    /// Packet spatial frequency (cycles/pixel); sets the packet length and,
    /// together with the speed, the temporal band it excites.
    pub xi_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitKind {
    Periodic,
    Speckle,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthseqConfig {
    pub grid: GridConfig,
    pub pattern: PatternSpec,
    #[serde(default)]
    pub speckle: SpeckleSpec,
    pub wave: TravelingWave,
    pub frame_rate_hz: f64,
    pub frames: usize,
    pub px_per_cm: f64,
    pub observation: ObservationParams,
    pub emit: Vec<EmitKind>,
}

/// Per-frame sequence description written next to each stack.
#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceDescriptor {
    pub stack: String,
    pub frame_rate_hz: f64,
    pub px_per_cm: f64,
    pub frames: usize,
}

struct WavePath {
    speed_px_per_frame: f64,
    start_phi: f64,
    half_support: f64,
}

impl WavePath {
    fn new(cfg: &SynthseqConfig) -> Self {
        let speed_px_per_s = cfg.wave.speed_m_per_s * cfg.px_per_cm * 100.0;
        let half_support = 0.5 / cfg.wave.xi_m;
        Self {
            speed_px_per_frame: speed_px_per_s / cfg.frame_rate_hz,
            // Packet fully outside the grid on frame 0.
            start_phi: -half_support - 8.0,
            half_support,
        }
    }

    fn phi(&self, frame: usize) -> f64 {
        self.start_phi + self.speed_px_per_frame * frame as f64
    }
}

fn wave_params(cfg: &SynthseqConfig, phi: f64) -> WaveParams {
    WaveParams {
        amplitude: cfg.wave.amplitude_px,
        xi_m: cfg.wave.xi_m,
        theta0: std::f64::consts::FRAC_PI_2,
        phi_l: phi,
        // Transverse potential parked far outside any realistic grid.
        phi_t: -1e9,
    }
}

/// Displacement field of the packet at one frame; zero amplitude means a
/// perfectly still membrane.
fn frame_displacement(
    cfg: &SynthseqConfig,
    path: &WavePath,
    geometry: GridGeometry,
    frame: usize,
) -> Result<DisplacementField, CliError> {
    if cfg.wave.amplitude_px == 0.0 {
        return Ok(DisplacementField::zeros(geometry));
    }
    let params = wave_params(cfg, path.phi(frame));
    let model = WaveModel::new(params)?;
    let mut u = ScalarField::zeros(geometry);
    let mut v = ScalarField::zeros(geometry);
    for r in 0..geometry.rows {
        let (du, dv) = model.displacement_at(0.0, r as f64);
        for c in 0..geometry.cols {
            u.set(r, c, du);
            v.set(r, c, dv);
        }
    }
    Ok(DisplacementField::new(u, v)?)
}

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let mut config: SynthseqConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.observation.rng_seed = seed;
    }
    config.observation.validate()?;
    if config.frames < 2 {
        return Err(CliError::new(2, "need at least two frames"));
    }
    if config.wave.amplitude_px > 0.0 {
        wave_params(&config, 0.0).validate()?;
    }
    let geometry = config.geometry()?;
    config.pattern.validate(&geometry)?;

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new(
        "synthseq",
        serde_json::to_value(&config)?,
        Some(config.observation.rng_seed),
    );

    let path = WavePath::new(&config);
    if config.wave.amplitude_px > 0.0 {
        let travel = path.speed_px_per_frame * (config.frames - 1) as f64;
        let needed = geometry.rows as f64 + 2.0 * path.half_support + 16.0;
        if travel < needed {
            eprintln!(
                "note: the packet travels {travel:.0} px over the sequence but needs \
                 {needed:.0} px to fully cross the grid"
            );
        }
    }

    // Ground-truth spatio-temporal map (position x time) of the V component.
    let mut truth = vec![0.0f64; geometry.rows * config.frames];
    for frame in 0..config.frames {
        let d = frame_displacement(&config, &path, geometry, frame)?;
        for r in 0..geometry.rows {
            truth[r * config.frames + frame] = d.v.at(r, 0);
        }
    }
    let truth_path = args.out.join("truth_map.f32f");
    let truth_geom = GridGeometry::new(geometry.rows, config.frames)?;
    write_scalar(&truth_path, &ScalarField::from_vec(truth_geom, truth.clone())?)?;
    manifest.output(&truth_path);
    let truth_csv = args.out.join("truth_map.csv");
    write_truth_csv(&truth_csv, &truth, geometry.rows, config.frames)?;
    manifest.output(&truth_csv);

    for kind in &config.emit {
        let (dir_name, base_image, seed_offset) = match kind {
            EmitKind::Periodic => (
                "periodic",
                synthesize_pattern(&config.pattern, geometry)?,
                0u64,
            ),
            EmitKind::Speckle => (
                "speckle",
                speckle_pattern(
                    &SpeckleSpec {
                        rng_seed: config.observation.rng_seed,
                        ..config.speckle
                    },
                    geometry,
                )?,
                0x5eed_0000_0000u64,
            ),
        };
        let dir = args.out.join(dir_name);
        ensure_out_dir(&dir)?;

        let mut frames = Vec::with_capacity(config.frames);
        for frame in 0..config.frames {
            let displacement = frame_displacement(&config, &path, geometry, frame)?;
            let warped = warp_pattern(&base_image, &displacement)?;
            let observed = apply_observation(
                &warped,
                &ObservationParams {
                    rng_seed: config
                        .observation
                        .rng_seed
                        .wrapping_add(seed_offset)
                        .wrapping_add(frame as u64),
                    ..config.observation
                },
            )?;
            frames.push(observed);
        }

        let stack_path = dir.join("frames.f32f");
        write_stack(&stack_path, &frames)?;
        manifest.output(&stack_path);

        let descriptor = SequenceDescriptor {
            stack: "frames.f32f".to_string(),
            frame_rate_hz: config.frame_rate_hz,
            px_per_cm: config.px_per_cm,
            frames: config.frames,
        };
        let desc_path = dir.join("seq.json");
        std::fs::write(&desc_path, serde_json::to_string_pretty(&descriptor)?)?;
        manifest.output(&desc_path);
    }

    manifest.write(&args.out)?;
    println!(
        "synthseq: {} frames at {} fps, packet speed {:.2} px/frame",
        config.frames, config.frame_rate_hz, path.speed_px_per_frame
    );
    Ok(())
}

impl SynthseqConfig {
    fn geometry(&self) -> Result<GridGeometry, CliError> {
        Ok(GridGeometry::with_pitch(self.grid.rows, self.grid.cols, self.grid.pixel_pitch)?)
    }
}

fn write_truth_csv(
    path: &std::path::Path,
    truth: &[f64],
    n_pos: usize,
    n_time: usize,
) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = (0..n_pos)
        .map(|r| {
            let mut row = vec![r.to_string()];
            row.extend((0..n_time).map(|t| format!("{:.6}", truth[r * n_time + t])));
            row
        })
        .collect();
    let mut header = vec!["position_px".to_string()];
    header.extend((0..n_time).map(|t| format!("t{t}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(path, &header_refs, &rows)?;
    Ok(())
}
