use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use texwave_core::adopt::{AdoptConfig, Axis};
use texwave_core::dic::{auto_window, DicParams};
use texwave_core::dispersion::{
    build_map, estimate_dispersion, isolate_incident, per_frame_displacement, rank1_profile,
    Direction, FrameMethod, FrameSequence, SpatioTemporalMap,
};
use texwave_core::io::{read_field, read_stack, write_csv, write_scalar};
use texwave_core::plot::{heatmap, line_chart, ChartLabels, Series};
use texwave_core::{GridGeometry, ScalarField};

use crate::manifest::{ensure_out_dir, load_config, RunManifest};
use crate::{CliError, CommonArgs};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceInput {
    /// Multi-frame stack file; alternative to `frames_dir`.
    #[serde(default)]
    pub stack: Option<PathBuf>,
    /// Directory of .f32f frames, ordered by file name.
    #[serde(default)]
    pub frames_dir: Option<PathBuf>,
    pub frame_rate_hz: f64,
    pub px_per_cm: f64,
    #[serde(default)]
    pub roi: Option<Roi>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Adopt,
    Dic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Rank1,
    Mean,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DispersionConfig {
    pub sequence: SequenceInput,
    pub method: MethodKind,
    #[serde(default)]
    pub adopt: AdoptConfig,
    #[serde(default)]
    pub dic: Option<DicParams>,
    /// Expected maximum displacement for the DIC window rule.
    #[serde(default)]
    pub max_displacement: Option<f64>,
    #[serde(default = "default_axis")]
    pub axis: Axis,
    #[serde(default)]
    pub ref_index: usize,
    pub band_hz: (f64, f64),
    #[serde(default = "default_direction")]
    pub direction: Direction,
    /// Apply directional isolation before the dispersion fit.
    #[serde(default = "default_true")]
    pub isolate: bool,
    #[serde(default = "default_profile")]
    pub profile: ProfileKind,
}

fn default_axis() -> Axis {
    Axis::V
}

fn default_direction() -> Direction {
    Direction::Forward
}

fn default_true() -> bool {
    true
}

fn default_profile() -> ProfileKind {
    ProfileKind::Rank1
}

fn crop(field: &ScalarField, roi: &Roi) -> Result<ScalarField, CliError> {
    if roi.y + roi.height > field.rows() || roi.x + roi.width > field.cols() {
        return Err(CliError::new(2, "roi exceeds the frame bounds"));
    }
    let geometry = GridGeometry::with_pitch(roi.height, roi.width, field.geometry().pixel_pitch)?;
    let mut out = ScalarField::zeros(geometry);
    for r in 0..roi.height {
        for c in 0..roi.width {
            out.set(r, c, field.at(roi.y + r, roi.x + c));
        }
    }
    Ok(out)
}

fn load_frames(input: &SequenceInput, config_dir: &Path) -> Result<Vec<ScalarField>, CliError> {
    let resolve = |p: &PathBuf| {
        if p.is_absolute() {
            p.clone()
        } else {
            config_dir.join(p)
        }
    };
    let mut frames = match (&input.stack, &input.frames_dir) {
        (Some(stack), _) => read_stack(&resolve(stack))?,
        (None, Some(dir)) => {
            let dir = resolve(dir);
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "f32f"))
                .collect();
            paths.sort();
            let mut frames = Vec::with_capacity(paths.len());
            for p in paths {
                frames.push(read_field(&p)?.into_real()?);
            }
            frames
        }
        (None, None) => {
            return Err(CliError::new(2, "sequence needs either `stack` or `frames_dir`"));
        }
    };
    if let Some(roi) = &input.roi {
        frames = frames.iter().map(|f| crop(f, roi)).collect::<Result<_, _>>()?;
    }
    Ok(frames)
}

fn map_to_field(map: &SpatioTemporalMap) -> Result<ScalarField, CliError> {
    let geometry = GridGeometry::new(map.n_pos(), map.n_time())?;
    Ok(ScalarField::from_vec(geometry, map.values().to_vec())?)
}

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let config: DispersionConfig = load_config(&args.config)?;
    let config_dir = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();

    ensure_out_dir(&args.out)?;
    let mut manifest = RunManifest::new("dispersion", serde_json::to_value(&config)?, args.seed);

    let frames = manifest.stage("load", || load_frames(&config.sequence, &config_dir))?;
    let seq = FrameSequence::new(frames, config.sequence.frame_rate_hz, config.sequence.px_per_cm)?;

    let method = match config.method {
        MethodKind::Adopt => FrameMethod::Adopt(config.adopt),
        MethodKind::Dic => {
            let params = config
                .dic
                .or_else(|| config.max_displacement.map(auto_window))
                .ok_or_else(|| {
                    CliError::new(2, "dic method needs `dic` params or `max_displacement`")
                })?;
            FrameMethod::Dic(params)
        }
    };

    let stack = manifest.stage("per_frame", || {
        per_frame_displacement(&seq, config.ref_index, config.axis, &method)
    })?;
    if !stack.masked.is_empty() {
        let shown: Vec<usize> = stack.masked.iter().copied().take(8).collect();
        println!(
            "dispersion: {} masked frame(s), first {:?}",
            stack.masked.len(),
            shown
        );
    }

    // Both profile reductions are exported; the configured one drives the fit.
    let rank1: Vec<Option<Vec<f64>>> =
        stack.fields.iter().map(|f| f.as_ref().map(rank1_profile)).collect();
    let mean: Vec<Option<Vec<f64>>> = stack
        .fields
        .iter()
        .map(|f| {
            f.as_ref().map(|field| {
                (0..field.rows())
                    .map(|r| {
                        (0..field.cols()).map(|c| field.at(r, c)).sum::<f64>()
                            / field.cols() as f64
                    })
                    .collect()
            })
        })
        .collect();

    let map_rank1 = build_map(&rank1, seq.frame_rate(), seq.px_per_cm())?;
    let map_mean = build_map(&mean, seq.frame_rate(), seq.px_per_cm())?;

    for (name, map) in [("map_rank1", &map_rank1), ("map_mean", &map_mean)] {
        let path = args.out.join(format!("{name}.f32f"));
        write_scalar(&path, &map_to_field(map)?)?;
        manifest.output(&path);
    }

    let selected = match config.profile {
        ProfileKind::Rank1 => map_rank1,
        ProfileKind::Mean => map_mean,
    };
    let analyzed = if config.isolate {
        manifest.stage("isolate", || isolate_incident(&selected, config.direction))?
    } else {
        selected
    };

    let map_csv = args.out.join("map.csv");
    let rows: Vec<Vec<String>> = (0..analyzed.n_pos())
        .map(|r| {
            let mut row = vec![format!("{:.4}", r as f64 * analyzed.dy_cm())];
            row.extend((0..analyzed.n_time()).map(|t| format!("{:.6}", analyzed.at(r, t))));
            row
        })
        .collect();
    let mut header = vec!["position_cm".to_string()];
    header.extend((0..analyzed.n_time()).map(|t| format!("{:.4}", t as f64 * analyzed.dt() * 1e3)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&map_csv, &header_refs, &rows)?;
    manifest.output(&map_csv);

    let curve = manifest.stage("dispersion", || estimate_dispersion(&analyzed, config.band_hz))?;
    if curve.finite_size_warning {
        println!("dispersion: warning: map covers fewer than two wavelengths at the band floor");
    }

    let curve_csv = args.out.join("curve.csv");
    let rows: Vec<Vec<String>> = curve
        .samples
        .iter()
        .map(|s| {
            vec![
                format!("{:.4}", s.f_hz),
                format!("{:.6}", s.k_rad_per_m),
                format!("{:.6}", s.c_m_per_s),
                format!("{:.6}", s.r2),
            ]
        })
        .collect();
    write_csv(&curve_csv, &["f_hz", "k_rad_per_m", "c_m_per_s", "r2"], &rows)?;
    manifest.output(&curve_csv);

    if args.plot {
        let map_svg = args.out.join("map.svg");
        let labels = ChartLabels {
            title: "Spatio-temporal displacement".into(),
            x_label: "time (ms)".into(),
            y_label: "position (cm)".into(),
        };
        std::fs::write(
            &map_svg,
            heatmap(
                &labels,
                analyzed.values(),
                analyzed.n_pos(),
                analyzed.n_time(),
                (0.0, analyzed.n_time() as f64 * analyzed.dt() * 1e3),
                (0.0, analyzed.n_pos() as f64 * analyzed.dy_cm()),
            ),
        )?;
        manifest.output(&map_svg);

        let curve_svg = args.out.join("curve.svg");
        let labels = ChartLabels {
            title: "Dispersion curve".into(),
            x_label: "frequency (Hz)".into(),
            y_label: "phase velocity (m/s)".into(),
        };
        let series =
            vec![Series::new("estimate", curve.samples.iter().map(|s| (s.f_hz, s.c_m_per_s)).collect())];
        std::fs::write(&curve_svg, line_chart(&labels, &series))?;
        manifest.output(&curve_svg);
    }

    manifest.write(&args.out)?;
    let mean_c =
        curve.samples.iter().map(|s| s.c_m_per_s).sum::<f64>() / curve.samples.len() as f64;
    println!(
        "dispersion: {} samples in [{:.0}, {:.0}] Hz, mean c = {:.3} m/s",
        curve.samples.len(),
        config.band_hz.0,
        config.band_hz.1,
        mean_c
    );
    Ok(())
}
