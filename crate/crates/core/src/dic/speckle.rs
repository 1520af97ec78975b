use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, GridGeometry, Result, ScalarField};

/// Random speckle description: target coverage (fraction of pixels above
/// half intensity), dot radius in pixels, and the placement seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeckleSpec {
    pub coverage: f64,
    pub dot_radius: f64,
    pub rng_seed: u64,
}

impl Default for SpeckleSpec {
    fn default() -> Self {
        Self { coverage: 0.30, dot_radius: 1.5, rng_seed: 0 }
    }
}

impl SpeckleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.coverage > 0.0 && self.coverage <= 0.7) {
            return Err(Error::InvalidArgument(format!(
                "coverage must lie in (0, 0.7], got {}",
                self.coverage
            )));
        }
        if !(self.dot_radius > 0.0) || !self.dot_radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dot radius must be positive, got {}",
                self.dot_radius
            )));
        }
        Ok(())
    }
}

/// Draws anti-aliased dots at seeded random positions until the fraction of
/// pixels above half intensity reaches the target coverage (within 1%).
pub fn speckle_pattern(spec: &SpeckleSpec, geometry: GridGeometry) -> Result<ScalarField> {
    spec.validate()?;
    let rows = geometry.rows;
    let cols = geometry.cols;
    let mut data = vec![0.0f64; rows * cols];
    let mut above_half = 0usize;
    let target = (spec.coverage * (rows * cols) as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let r_dot = spec.dot_radius;
    let reach = r_dot + 1.0;

    // Each dot adds a bounded number of pixels, so coverage lands within one
    // dot area of the target; the worst case is far inside the 1% band.
    while above_half < target {
        let cx = rng.random::<f64>() * cols as f64;
        let cy = rng.random::<f64>() * rows as f64;
        let c_lo = ((cx - reach).floor().max(0.0)) as usize;
        let c_hi = ((cx + reach).ceil().min(cols as f64 - 1.0)) as usize;
        let r_lo = ((cy - reach).floor().max(0.0)) as usize;
        let r_hi = ((cy + reach).ceil().min(rows as f64 - 1.0)) as usize;
        for r in r_lo..=r_hi {
            for c in c_lo..=c_hi {
                let d = ((c as f64 - cx).powi(2) + (r as f64 - cy).powi(2)).sqrt();
                let v = (0.5 + (r_dot - d)).clamp(0.0, 1.0);
                let idx = r * cols + c;
                let old = data[idx];
                let new = old.max(v);
                if new != old {
                    if old <= 0.5 && new > 0.5 {
                        above_half += 1;
                    }
                    data[idx] = new;
                }
            }
        }
    }

    ScalarField::from_vec(geometry, data)
}
