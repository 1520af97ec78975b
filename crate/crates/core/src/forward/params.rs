use serde::{Deserialize, Serialize};

use crate::{Error, GridGeometry, Result};

/// Parametric wave: peak displacement `a` (pixels), spatial frequency
/// `xi_m` (cycles/pixel), propagation orientation `theta0` (rad), and the
/// per-potential phase shifts (pixels, same units as the rotated coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    #[serde(rename = "a")]
    pub amplitude: f64,
    pub xi_m: f64,
    pub theta0: f64,
    #[serde(rename = "phi_L")]
    pub phi_l: f64,
    #[serde(rename = "phi_T")]
    pub phi_t: f64,
}

impl WaveParams {
    /// Checks positivity and the bijectivity bound xi_m < 1/(4 pi a).
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(self.xi_m > 0.0) || !self.xi_m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "xi_m must be positive, got {}",
                self.xi_m
            )));
        }
        if !self.theta0.is_finite() || !self.phi_l.is_finite() || !self.phi_t.is_finite() {
            return Err(Error::InvalidArgument("non-finite wave parameter".into()));
        }
        let bound = 1.0 / (4.0 * std::f64::consts::PI * self.amplitude);
        if self.xi_m >= bound {
            return Err(Error::ConstraintViolation(format!(
                "xi_m = {} must stay strictly below 1/(4*pi*a) = {}",
                self.xi_m, bound
            )));
        }
        Ok(())
    }

    /// Potential amplitude bound a_p = a / (2 pi xi_m).
    pub fn potential_amplitude(&self) -> f64 {
        self.amplitude / (2.0 * std::f64::consts::PI * self.xi_m)
    }
}

/// Elementary cell of the periodic pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    /// Bright disk centered in each cell. `diameter` defaults to half the
    /// lattice spacing.
    Dots { diameter: Option<f64> },
    /// Dark lines along both lattice directions. `line_width` defaults to a
    /// quarter of the lattice spacing.
    Grid { line_width: Option<f64> },
    /// Additive two-direction square wave: harmonics sit on the lattice axes.
    Checker,
}

impl Default for CellKind {
    fn default() -> Self {
        CellKind::Dots { diameter: None }
    }
}

fn default_theta_u() -> f64 {
    0.0
}

fn default_theta_v() -> f64 {
    std::f64::consts::FRAC_PI_2
}

/// Periodic texture description: fundamental frequency `xi_p`
/// (cycles/pixel), cell type, and the two lattice orientations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub xi_p: f64,
    #[serde(default)]
    pub cell: CellKind,
    #[serde(default = "default_theta_u")]
    pub theta_u: f64,
    #[serde(default = "default_theta_v")]
    pub theta_v: f64,
}

impl PatternSpec {
    pub fn new(xi_p: f64, cell: CellKind) -> Self {
        Self { xi_p, cell, theta_u: default_theta_u(), theta_v: default_theta_v() }
    }

    /// Lattice spacing, 1/xi_p.
    pub fn spacing(&self) -> f64 {
        1.0 / self.xi_p
    }

    pub fn validate(&self, geometry: &GridGeometry) -> Result<()> {
        let xi_s = geometry.sampling_frequency();
        if !(self.xi_p > 0.0) || self.xi_p >= xi_s / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "xi_p = {} must lie in (0, xi_s/2 = {})",
                self.xi_p,
                xi_s / 2.0
            )));
        }
        let diff = (self.theta_u - self.theta_v).rem_euclid(std::f64::consts::PI);
        if diff < 1e-9 || (std::f64::consts::PI - diff) < 1e-9 {
            return Err(Error::InvalidArgument(
                "lattice orientations must differ (mod pi)".into(),
            ));
        }
        Ok(())
    }
}

fn quant_bits_valid(bits: u8) -> bool {
    matches!(bits, 0 | 8 | 10 | 12 | 16)
}

/// Camera model: Gaussian PSF width, additive-noise SNR (None = noiseless),
/// quantization depth (0 = none) and the RNG seed for the noise stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationParams {
    pub psf_sigma: f64,
    /// SNR in decibels relative to the blurred-signal variance; `None`
    /// disables noise.
    pub snr_db: Option<f64>,
    pub quant_bits: u8,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
}

impl ObservationParams {
    pub fn noiseless(psf_sigma: f64, quant_bits: u8) -> Self {
        Self { psf_sigma, snr_db: None, quant_bits, rng_seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.psf_sigma >= 0.0) || !self.psf_sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "psf_sigma must be non-negative, got {}",
                self.psf_sigma
            )));
        }
        if !quant_bits_valid(self.quant_bits) {
            return Err(Error::InvalidArgument(format!(
                "quant_bits must be one of 0, 8, 10, 12, 16, got {}",
                self.quant_bits
            )));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::InvalidArgument(
                    "snr_db must be finite; use null for the noiseless case".into(),
                ));
            }
        }
        Ok(())
    }

    /// Quantization step in intensity units, 0 when quantization is off.
    pub fn quant_step(&self) -> f64 {
        if self.quant_bits == 0 {
            0.0
        } else {
            1.0 / ((1u32 << self.quant_bits) - 1) as f64
        }
    }
}

impl Default for ObservationParams {
    fn default() -> Self {
        Self { psf_sigma: 0.5, snr_db: Some(20.0), quant_bits: 8, rng_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_pitch")]
    pub pixel_pitch: f64,
}

fn default_pitch() -> f64 {
    1.0
}

/// Complete simulation scenario: wave, pattern, camera and grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub wave: WaveParams,
    pub pattern: PatternSpec,
    pub observation: ObservationParams,
    pub grid: GridConfig,
}

impl Scenario {
    pub fn geometry(&self) -> Result<GridGeometry> {
        GridGeometry::with_pitch(self.grid.rows, self.grid.cols, self.grid.pixel_pitch)
    }

    pub fn validate(&self) -> Result<()> {
        let geometry = self.geometry()?;
        self.wave.validate()?;
        self.pattern.validate(&geometry)?;
        self.observation.validate()
    }

    /// The simulation scenario used throughout the benchmark suite:
    /// 400x400 grid, a = 0.005 l = 2 px, xi_m = 3.33/l, theta0 = pi/4,
    /// dot pattern at xi_p = 33.33/l, SNR 20 dB. The carrier phase shifts
    /// are 1 and 0.33 px plus two full carrier periods, which leaves the
    /// cosine phase untouched but centers the wave packet on the image
    /// diagonal instead of clipping it at the corner.
    pub fn benchmark_default() -> Self {
        let l = 400.0;
        let xi_m = 3.33 / l;
        let two_periods = 2.0 / xi_m;
        Scenario {
            wave: WaveParams {
                amplitude: 0.005 * l,
                xi_m,
                theta0: std::f64::consts::FRAC_PI_4,
                phi_l: 1.0 + two_periods,
                phi_t: 0.33 + two_periods,
            },
            pattern: PatternSpec::new(33.33 / l, CellKind::default()),
            observation: ObservationParams::default(),
            grid: GridConfig { rows: 400, cols: 400, pixel_pitch: 1.0 },
        }
    }
}
