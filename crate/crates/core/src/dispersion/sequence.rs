use rayon::prelude::*;

use crate::adopt::{demodulate_axis, AdoptConfig, Axis};
use crate::dic::{dic_displacement, DicParams};
use crate::{Error, GridGeometry, Result, ScalarField};

/// Ordered frames with temporal and spatial calibration.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    frames: Vec<ScalarField>,
    frame_rate: f64,
    px_per_cm: f64,
}

impl FrameSequence {
    pub fn new(frames: Vec<ScalarField>, frame_rate: f64, px_per_cm: f64) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::Sequence("a sequence needs at least two frames".into()));
        }
        if !(frame_rate > 0.0) || !frame_rate.is_finite() {
            return Err(Error::Sequence(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        if !(px_per_cm > 0.0) || !px_per_cm.is_finite() {
            return Err(Error::Sequence(format!(
                "spatial calibration must be positive, got {px_per_cm}"
            )));
        }
        let geometry = frames[0].geometry();
        if frames.iter().any(|f| f.geometry() != geometry) {
            return Err(Error::Sequence("frames must share a geometry".into()));
        }
        Ok(Self { frames, frame_rate, px_per_cm })
    }

    pub fn frames(&self) -> &[ScalarField] {
        &self.frames
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn px_per_cm(&self) -> f64 {
        self.px_per_cm
    }

    pub fn geometry(&self) -> GridGeometry {
        self.frames[0].geometry()
    }
}

/// Displacement estimator applied per frame.
#[derive(Debug, Clone)]
pub enum FrameMethod {
    Adopt(AdoptConfig),
    Dic(DicParams),
}

/// Per-frame displacement fields; frames whose estimation failed are `None`
/// and flagged in `masked`.
#[derive(Debug, Clone)]
pub struct DisplacementStack {
    pub fields: Vec<Option<ScalarField>>,
    pub masked: Vec<usize>,
}

impl DisplacementStack {
    pub fn masked_fraction(&self) -> f64 {
        self.masked.len() as f64 / self.fields.len() as f64
    }
}

/// Estimates the chosen displacement axis for every frame against the
/// reference frame; frames run in parallel and failures are flagged rather
/// than silently zeroed.
pub fn per_frame_displacement(
    seq: &FrameSequence,
    ref_index: usize,
    axis: Axis,
    method: &FrameMethod,
) -> Result<DisplacementStack> {
    if ref_index >= seq.frames.len() {
        return Err(Error::Sequence(format!(
            "reference index {ref_index} out of range ({} frames)",
            seq.frames.len()
        )));
    }
    let reference = &seq.frames[ref_index];

    // A frame whose analytic band energy collapsed relative to the
    // reference has lost its carrier and is flagged rather than returned.
    const MIN_CARRIER_RATIO: f64 = 0.2;

    let fields: Vec<Option<ScalarField>> = seq
        .frames
        .par_iter()
        .map(|frame| match method {
            FrameMethod::Adopt(cfg) => demodulate_axis(reference, frame, axis, cfg)
                .ok()
                .and_then(|(f, info)| (info.carrier_ratio >= MIN_CARRIER_RATIO).then_some(f)),
            FrameMethod::Dic(params) => {
                dic_displacement(reference, frame, params).ok().map(|res| match axis {
                    Axis::U => res.field.u,
                    Axis::V => res.field.v,
                })
            }
        })
        .collect();

    let masked: Vec<usize> =
        fields.iter().enumerate().filter(|(_, f)| f.is_none()).map(|(i, _)| i).collect();
    Ok(DisplacementStack { fields, masked })
}
