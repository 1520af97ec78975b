use crate::{Error, Result};

/// Gaussian weight parameterized by center and full width at half maximum.
#[derive(Debug, Clone, Copy)]
pub struct GaussianWindow {
    center: f64,
    fwhm: f64,
}

impl GaussianWindow {
    /// g(x) = exp(-(x-center)^2 / (2 sigma^2)) with sigma = fwhm/(2 sqrt(2 ln 2)),
    /// so g(center +- fwhm/2) = 1/2.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_distance(x - self.center)
    }

    /// Same weight as a function of the (signed) distance from the center.
    #[inline]
    pub fn eval_distance(&self, d: f64) -> f64 {
        let exponent = -(d * d) * (4.0 * std::f64::consts::LN_2) / (self.fwhm * self.fwhm);
        exponent.exp()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }
}

/// 1D Gaussian weight function with the given center and FWHM.
pub fn gaussian_from_fwhm(center: f64, fwhm: f64) -> Result<GaussianWindow> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "fwhm must be positive and finite, got {fwhm}"
        )));
    }
    Ok(GaussianWindow { center, fwhm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unity_at_center() {
        let g = gaussian_from_fwhm(0.3, 1.7).unwrap();
        assert_eq!(g.eval(0.3), 1.0);
    }

    #[test]
    fn half_at_half_width() {
        let g = gaussian_from_fwhm(2.0, 0.8).unwrap();
        assert!((g.eval(2.0 + 0.4) - 0.5).abs() < 1e-12);
        assert!((g.eval(2.0 - 0.4) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_case() {
        // fwhm = pi/2 centered at theta_u: weight at theta_u + pi/4 is 1/2.
        let theta_u = 0.9;
        let g = gaussian_from_fwhm(theta_u, PI / 2.0).unwrap();
        assert!((g.eval(theta_u + PI / 4.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_fwhm() {
        assert!(gaussian_from_fwhm(0.0, 0.0).is_err());
        assert!(gaussian_from_fwhm(0.0, -1.0).is_err());
    }

    #[test]
    fn symmetric_and_monotone() {
        let g = gaussian_from_fwhm(1.0, 2.0).unwrap();
        let mut prev = g.eval(1.0);
        for k in 1..50 {
            let d = k as f64 * 0.1;
            let right = g.eval(1.0 + d);
            let left = g.eval(1.0 - d);
            assert!((right - left).abs() < 1e-14);
            assert!(right < prev);
            prev = right;
        }
    }
}
