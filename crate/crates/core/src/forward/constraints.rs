use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::forward::{PatternSpec, WaveParams};
use crate::GridGeometry;

/// Constraint checks for one pattern harmonic (gamma, kappa).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCheck {
    pub gamma: i32,
    pub kappa: i32,
    /// Two-dimensional Carson bandwidth 2 (2 pi a xi_p n + 1) xi_m with
    /// n = sqrt(gamma^2 + kappa^2).
    pub carson_bandwidth: f64,
    /// Normalized frequency 4 pi a xi_m n; must stay below 1.
    pub xi_n: f64,
    /// carson_bandwidth < xi_p: the spread harmonics do not overlap.
    pub no_overlap: bool,
    /// xi_m < 1/(4 pi a n): the xi_p-independent bandwidth bound.
    pub bandwidth_ok: bool,
    /// xi_p < n / (max(gamma,kappa) (2n + 1)) xi_s: aliasing-free sampling
    /// and unambiguous pixel-to-pixel phase steps.
    pub sampling_ok: bool,
}

/// Full constraint report: per-harmonic checks plus the orientation-
/// preserving bijectivity bound on the warp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub harmonics: Vec<HarmonicCheck>,
    /// xi_m < 1/(4 pi a): the deformation map stays bijective and
    /// orientation-preserving.
    pub bijective_ok: bool,
}

impl ConstraintReport {
    /// The bandwidth, sampling and bijectivity checks. The Carson
    /// `no_overlap` flag is reported alongside but not gated on: its +1 term
    /// (the modulating-signal bandwidth) keeps it failing even as the
    /// modulation amplitude vanishes, where the sideband energy it guards
    /// against is zero.
    pub fn all_pass(&self) -> bool {
        self.bijective_ok && self.harmonics.iter().all(|h| h.bandwidth_ok && h.sampling_ok)
    }

    /// Human-readable list of failed gating checks, empty when everything
    /// passes.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.bijective_ok {
            out.push("bijectivity bound xi_m < 1/(4 pi a) violated".to_string());
        }
        for h in &self.harmonics {
            let tag = format!("harmonic ({}, {})", h.gamma, h.kappa);
            if !h.bandwidth_ok {
                out.push(format!("{tag}: xi_m exceeds 1/(4 pi a sqrt(g^2+k^2))"));
            }
            if !h.sampling_ok {
                out.push(format!("{tag}: xi_p violates the sampling bound"));
            }
        }
        out
    }
}

/// Evaluates the spectral-overlap, bandwidth and sampling constraints for
/// the given harmonics, plus the bijectivity bound. Report-only: never errors.
pub fn validate_constraints(
    wave: &WaveParams,
    pattern: &PatternSpec,
    geometry: &GridGeometry,
    harmonics: &[(i32, i32)],
) -> ConstraintReport {
    let a = wave.amplitude;
    let xi_m = wave.xi_m;
    let xi_p = pattern.xi_p;
    let xi_s = geometry.sampling_frequency();

    let harmonics = harmonics
        .iter()
        .map(|&(gamma, kappa)| {
            let n = ((gamma * gamma + kappa * kappa) as f64).sqrt();
            let carson = 2.0 * (2.0 * PI * a * xi_p * n + 1.0) * xi_m;
            let max_gk = gamma.abs().max(kappa.abs()) as f64;
            let sampling_bound = if max_gk > 0.0 {
                n / (max_gk * (2.0 * n + 1.0)) * xi_s
            } else {
                f64::INFINITY
            };
            HarmonicCheck {
                gamma,
                kappa,
                carson_bandwidth: carson,
                xi_n: 4.0 * PI * a * xi_m * n,
                no_overlap: carson < xi_p,
                bandwidth_ok: n == 0.0 || xi_m < 1.0 / (4.0 * PI * a * n),
                sampling_ok: xi_p < sampling_bound,
            }
        })
        .collect();

    ConstraintReport {
        harmonics,
        bijective_ok: xi_m < 1.0 / (4.0 * PI * a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::CellKind;

    fn paper_setup() -> (WaveParams, PatternSpec, GridGeometry) {
        let l = 400.0;
        let wave = WaveParams {
            amplitude: 0.01 * l,
            xi_m: 3.33 / l,
            theta0: std::f64::consts::FRAC_PI_4,
            phi_l: 1.0,
            phi_t: 0.33,
        };
        let pattern = PatternSpec::new(33.33 / l, CellKind::Dots { diameter: None });
        let geometry = GridGeometry::new(400, 400).unwrap();
        (wave, pattern, geometry)
    }

    #[test]
    fn benchmark_scenario_first_harmonic_passes() {
        let (wave, pattern, geometry) = paper_setup();
        let report = validate_constraints(&wave, &pattern, &geometry, &[(1, 0)]);
        assert!(report.all_pass(), "failures: {:?}", report.failures());
        let h = &report.harmonics[0];
        assert!((h.xi_n - 0.419).abs() < 1e-3, "xi_n = {}", h.xi_n);
    }

    #[test]
    fn vanishing_amplitude_always_passes() {
        let (_, pattern, geometry) = paper_setup();
        let wave = WaveParams {
            amplitude: 1e-12,
            xi_m: 0.2,
            theta0: 0.0,
            phi_l: 0.0,
            phi_t: 0.0,
        };
        let report = validate_constraints(&wave, &pattern, &geometry, &[(1, 0), (0, 1), (1, 1)]);
        assert!(report.all_pass());
    }

    #[test]
    fn boundary_case_fails_strict_inequality() {
        let (_, pattern, geometry) = paper_setup();
        let a = 4.0;
        let wave = WaveParams {
            amplitude: a,
            xi_m: 1.0 / (4.0 * PI * a),
            theta0: 0.0,
            phi_l: 0.0,
            phi_t: 0.0,
        };
        let report = validate_constraints(&wave, &pattern, &geometry, &[(1, 0)]);
        assert!(!report.bijective_ok);
        assert!(!report.all_pass());
    }

    #[test]
    fn higher_harmonics_are_stricter() {
        let (wave, pattern, geometry) = paper_setup();
        let report =
            validate_constraints(&wave, &pattern, &geometry, &[(1, 0), (2, 0), (3, 3)]);
        let xi_ns: Vec<f64> = report.harmonics.iter().map(|h| h.xi_n).collect();
        assert!(xi_ns[1] > xi_ns[0]);
        assert!(xi_ns[2] > xi_ns[1]);
    }

    #[test]
    fn report_serializes_to_json() {
        let (wave, pattern, geometry) = paper_setup();
        let report = validate_constraints(&wave, &pattern, &geometry, &[(1, 0)]);
        let json = serde_json::to_string_pretty(&report).unwrap();
        assert!(json.contains("carson_bandwidth"));
        assert!(json.contains("bijective_ok"));
    }
}
