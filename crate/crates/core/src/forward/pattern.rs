use crate::forward::{CellKind, PatternSpec};
use crate::{Error, GridGeometry, Result, ScalarField};

/// Anti-aliasing ramp width (pixels) for cell edges.
const EDGE_AA: f64 = 1.0;

/// Distance of `t` to the nearest lattice point, signed, in [-spacing/2, spacing/2].
#[inline]
fn wrap_center(t: f64, spacing: f64) -> f64 {
    t - spacing * (t / spacing).round()
}

/// Synthesizes the periodic surface pattern: the elementary cell replicated
/// on the lattice of spacing 1/xi_p along the two lattice orientations.
/// Values lie in [0, 1].
pub fn synthesize_pattern(spec: &PatternSpec, geometry: GridGeometry) -> Result<ScalarField> {
    spec.validate(&geometry)?;
    // Sampling constraint on the first harmonics (1,0)/(0,1): the pattern
    // frequency must stay below xi_s/3 so the modulated spectrum stays
    // unaliased and adjacent-pixel phase steps stay below half a cycle.
    let xi_s = geometry.sampling_frequency();
    let bound = xi_s / 3.0;
    if spec.xi_p >= bound {
        return Err(Error::ConstraintViolation(format!(
            "xi_p = {} violates the sampling bound xi_s/3 = {bound}",
            spec.xi_p
        )));
    }

    let eps = spec.spacing();
    let (sin_u, cos_u) = spec.theta_u.sin_cos();
    let (sin_v, cos_v) = spec.theta_v.sin_cos();

    let value = |x: f64, y: f64| -> f64 {
        let u = x * cos_u + y * sin_u;
        let v = x * cos_v + y * sin_v;
        match spec.cell {
            CellKind::Dots { diameter } => {
                let radius = diameter.unwrap_or(eps / 2.0) / 2.0;
                let du = wrap_center(u, eps);
                let dv = wrap_center(v, eps);
                let d = (du * du + dv * dv).sqrt();
                (0.5 + (radius - d) / EDGE_AA).clamp(0.0, 1.0)
            }
            CellKind::Grid { line_width } => {
                let w = line_width.unwrap_or(eps / 4.0);
                let lu = (0.5 + (wrap_center(u, eps).abs() - w / 2.0) / EDGE_AA).clamp(0.0, 1.0);
                let lv = (0.5 + (wrap_center(v, eps).abs() - w / 2.0) / EDGE_AA).clamp(0.0, 1.0);
                lu * lv
            }
            CellKind::Checker => {
                let su = if u.rem_euclid(eps) < eps / 2.0 { 1.0 } else { 0.0 };
                let sv = if v.rem_euclid(eps) < eps / 2.0 { 1.0 } else { 0.0 };
                0.5 * (su + sv)
            }
        }
    };

    Ok(ScalarField::from_fn(geometry, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fft2d_real;

    #[test]
    fn checker_spectrum_peaks_on_the_lattice_axes() {
        let g = GridGeometry::new(64, 64).unwrap();
        let spec = PatternSpec::new(1.0 / 8.0, CellKind::Checker);
        let f = synthesize_pattern(&spec, g).unwrap();
        let s = fft2d_real(&f).unwrap();

        let first_x = s.at(0, 8).norm();
        let first_y = s.at(8, 0).norm();
        assert!(first_x > 0.0 && first_y > 0.0);

        // Every non-lattice bin must sit at least 20 dB below the first
        // harmonics. Lattice bins are multiples of 8 in each index.
        let floor = first_x.min(first_y) / 10.0; // 20 dB in magnitude
        for r in 0..64 {
            for c in 0..64 {
                if r % 8 == 0 && c % 8 == 0 {
                    continue;
                }
                assert!(
                    s.at(r, c).norm() < floor,
                    "bin ({r},{c}) = {} above floor {floor}",
                    s.at(r, c).norm()
                );
            }
        }
    }

    #[test]
    fn pattern_is_lattice_periodic() {
        let g = GridGeometry::new(64, 64).unwrap();
        let spec = PatternSpec::new(1.0 / 8.0, CellKind::Checker);
        let f = synthesize_pattern(&spec, g).unwrap();
        for r in 0..56 {
            for c in 0..56 {
                assert_eq!(f.at(r, c), f.at(r, c + 8));
                assert_eq!(f.at(r, c), f.at(r + 8, c));
            }
        }
    }

    #[test]
    fn dots_mean_matches_area_fraction() {
        // Dots of diameter eps/2 cover pi/16 of each cell.
        let g = GridGeometry::new(128, 128).unwrap();
        let spec = PatternSpec::new(1.0 / 16.0, CellKind::Dots { diameter: None });
        let f = synthesize_pattern(&spec, g).unwrap();
        let expected = std::f64::consts::PI / 16.0;
        let mean = f.mean();
        assert!(
            (mean - expected).abs() / expected < 0.05,
            "mean {mean} vs {expected}"
        );
    }

    #[test]
    fn values_stay_in_unit_range() {
        let g = GridGeometry::new(64, 64).unwrap();
        for cell in [
            CellKind::Dots { diameter: None },
            CellKind::Grid { line_width: None },
            CellKind::Checker,
        ] {
            let f = synthesize_pattern(&PatternSpec::new(0.11, cell), g).unwrap();
            let (lo, hi) = f.min_max();
            assert!(lo >= 0.0 && hi <= 1.0);
        }
    }

    #[test]
    fn rejects_xi_p_above_sampling_bound() {
        let g = GridGeometry::new(64, 64).unwrap();
        let spec = PatternSpec::new(0.4, CellKind::Checker);
        assert!(matches!(
            synthesize_pattern(&spec, g),
            Err(Error::ConstraintViolation(_))
        ));
    }
}
