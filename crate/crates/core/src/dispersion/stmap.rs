use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{fft2d, freq_cycles, ifft2d};
use crate::{ComplexField, Error, GridGeometry, Result};

/// Propagation direction to retain when isolating a traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From the excitation source toward the far boundary (+position).
    Forward,
    Backward,
}

/// Position x time displacement matrix with calibrated axes.
#[derive(Debug, Clone)]
pub struct SpatioTemporalMap {
    /// Row-major, rows = positions, columns = time samples.
    values: Vec<f64>,
    n_pos: usize,
    n_time: usize,
    /// Time step, seconds.
    dt: f64,
    /// Position step, centimeters.
    dy_cm: f64,
    /// Frame indices that were reconstructed by interpolation.
    interpolated: Vec<usize>,
}

impl SpatioTemporalMap {
    pub fn new(
        values: Vec<f64>,
        n_pos: usize,
        n_time: usize,
        dt: f64,
        dy_cm: f64,
        interpolated: Vec<usize>,
    ) -> Result<Self> {
        if values.len() != n_pos * n_time {
            return Err(Error::Sequence("map dimensions do not match data".into()));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(dt > 0.0) || !(dy_cm > 0.0) {
            return Err(Error::Sequence("axis steps must be positive".into()));
        }
        Ok(Self { values, n_pos, n_time, dt, dy_cm, interpolated })
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dy_cm(&self) -> f64 {
        self.dy_cm
    }

    pub fn frame_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolated(&self) -> &[usize] {
        &self.interpolated
    }

    #[inline]
    pub fn at(&self, pos: usize, t: usize) -> f64 {
        self.values[pos * self.n_time + t]
    }

    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

/// Stacks per-frame 1D profiles into a spatio-temporal map (column t =
/// profile of frame t). Masked frames are linearly interpolated in time and
/// recorded; more than 20% masked frames is an error.
pub fn build_map(
    profiles: &[Option<Vec<f64>>],
    frame_rate: f64,
    px_per_cm: f64,
) -> Result<SpatioTemporalMap> {
    let n_time = profiles.len();
    if n_time < 2 {
        return Err(Error::Sequence("need at least two frames".into()));
    }
    let n_pos = profiles
        .iter()
        .flatten()
        .map(Vec::len)
        .next()
        .ok_or_else(|| Error::Sequence("every frame is masked".into()))?;
    if profiles.iter().flatten().any(|p| p.len() != n_pos) {
        return Err(Error::Sequence("profiles have inconsistent lengths".into()));
    }

    let masked: Vec<usize> = profiles
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_none())
        .map(|(i, _)| i)
        .collect();
    if masked.len() * 5 > n_time {
        return Err(Error::Sequence(format!(
            "{} of {} frames masked exceeds the 20% budget",
            masked.len(),
            n_time
        )));
    }

    let mut values = vec![0.0; n_pos * n_time];
    for (t, profile) in profiles.iter().enumerate() {
        if let Some(p) = profile {
            for (y, &v) in p.iter().enumerate() {
                values[y * n_time + t] = v;
            }
        }
    }
    // Fill masked columns by linear interpolation between the nearest valid
    // frames (nearest-copy at the ends).
    for &t in &masked {
        let prev = (0..t).rev().find(|&i| profiles[i].is_some());
        let next = (t + 1..n_time).find(|&i| profiles[i].is_some());
        match (prev, next) {
            (Some(a), Some(b)) => {
                let w = (t - a) as f64 / (b - a) as f64;
                for y in 0..n_pos {
                    values[y * n_time + t] =
                        (1.0 - w) * values[y * n_time + a] + w * values[y * n_time + b];
                }
            }
            (Some(a), None) => {
                for y in 0..n_pos {
                    values[y * n_time + t] = values[y * n_time + a];
                }
            }
            (None, Some(b)) => {
                for y in 0..n_pos {
                    values[y * n_time + t] = values[y * n_time + b];
                }
            }
            (None, None) => unreachable!("at least one valid frame exists"),
        }
    }

    SpatioTemporalMap::new(values, n_pos, n_time, 1.0 / frame_rate, 1.0 / px_per_cm, masked)
}

/// Keeps only the spectral quadrants matching the requested propagation
/// direction (forward: sign(k) = -sign(f)); bins on the k = 0 or f = 0 axes
/// are preserved. Idempotent up to roundoff.
pub fn isolate_incident(map: &SpatioTemporalMap, direction: Direction) -> Result<SpatioTemporalMap> {
    let geometry = GridGeometry::new(map.n_pos, map.n_time)?;
    let field = ComplexField::from_vec(
        geometry,
        map.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )?;
    let mut spec = fft2d(&field)?;
    for r in 0..map.n_pos {
        let k = freq_cycles(r, map.n_pos);
        for c in 0..map.n_time {
            let f = freq_cycles(c, map.n_time);
            let product = k * f;
            let keep = match direction {
                Direction::Forward => product <= 0.0,
                Direction::Backward => product >= 0.0,
            };
            if !keep {
                spec.set(r, c, Complex64::new(0.0, 0.0));
            }
        }
    }
    let back = ifft2d(&spec)?;
    SpatioTemporalMap::new(
        back.data().iter().map(|v| v.re).collect(),
        map.n_pos,
        map.n_time,
        map.dt,
        map.dy_cm,
        map.interpolated.clone(),
    )
}
