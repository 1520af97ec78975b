use std::f64::consts::PI;

use crate::forward::WaveParams;
use crate::{Error, GridGeometry, Result, ScalarField};

/// Which Helmholtz potential a quantity refers to: the curl-free
/// (longitudinal) or divergence-free (transverse) part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Longitudinal,
    Transverse,
}

/// Dense in-plane displacement field (pixels).
#[derive(Debug, Clone)]
pub struct DisplacementField {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl DisplacementField {
    pub fn new(u: ScalarField, v: ScalarField) -> Result<Self> {
        if u.geometry() != v.geometry() {
            return Err(Error::InvalidGeometry(
                "displacement components must share a geometry".into(),
            ));
        }
        Ok(Self { u, v })
    }

    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { u: ScalarField::zeros(geometry), v: ScalarField::zeros(geometry) }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.u.geometry()
    }

    /// Maximum Euclidean norm over the grid.
    pub fn max_norm(&self) -> f64 {
        self.u
            .data()
            .iter()
            .zip(self.v.data())
            .map(|(&u, &v)| (u * u + v * v).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Closed-form evaluator for the windowed-sinusoid potentials and every
/// derivative the rest of the crate needs (displacements, their spatial
/// slopes, and the sensitivities used for the information-matrix work).
///
/// Both potentials share the shape
/// `P(s) = -(a / (2 pi xi_m)) cos^2(pi xi_m s) cos(2 pi xi_m s)` on the
/// window `|s| <= 1/(2 xi_m)` (zero outside), with `s` the rotated
/// coordinate minus the per-potential phase shift.
#[derive(Debug, Clone, Copy)]
pub struct WaveModel {
    params: WaveParams,
}

impl WaveModel {
    pub fn new(params: WaveParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &WaveParams {
        &self.params
    }

    #[inline]
    fn omega(&self) -> f64 {
        2.0 * PI * self.params.xi_m
    }

    /// Window half-length 1/(2 xi_m).
    #[inline]
    fn half_support(&self) -> f64 {
        0.5 / self.params.xi_m
    }

    #[inline]
    fn rotated(&self, x: f64, y: f64) -> f64 {
        x * self.params.theta0.cos() + y * self.params.theta0.sin()
    }

    fn phase_shift(&self, kind: PotentialKind) -> f64 {
        match kind {
            PotentialKind::Longitudinal => self.params.phi_l,
            PotentialKind::Transverse => self.params.phi_t,
        }
    }

    /// Potential value at the rotated-and-shifted coordinate s.
    fn potential_profile(&self, s: f64) -> f64 {
        if s.abs() > self.half_support() {
            return 0.0;
        }
        let w = (PI * self.params.xi_m * s).cos().powi(2);
        -self.params.potential_amplitude() * w * (self.omega() * s).cos()
    }

    /// d potential / d s; equals (a/2) (sin(w s) + sin(2 w s)) on the window.
    fn slope_profile(&self, s: f64) -> f64 {
        if s.abs() > self.half_support() {
            return 0.0;
        }
        let ws = self.omega() * s;
        0.5 * self.params.amplitude * (ws.sin() + (2.0 * ws).sin())
    }

    /// d^2 potential / d s^2 = (a w / 2)(cos(w s) + 2 cos(2 w s)).
    fn curvature_profile(&self, s: f64) -> f64 {
        if s.abs() > self.half_support() {
            return 0.0;
        }
        let ws = self.omega() * s;
        0.5 * self.params.amplitude * self.omega() * (ws.cos() + 2.0 * (2.0 * ws).cos())
    }

    pub fn potential_at(&self, kind: PotentialKind, x: f64, y: f64) -> f64 {
        let s = self.rotated(x, y) - self.phase_shift(kind);
        self.potential_profile(s)
    }

    /// Displacement (U, V) at a point: the longitudinal part contributes its
    /// slope along the propagation direction, the transverse part orthogonally.
    pub fn displacement_at(&self, x: f64, y: f64) -> (f64, f64) {
        let r = self.rotated(x, y);
        let dl = self.slope_profile(r - self.params.phi_l);
        let dt = self.slope_profile(r - self.params.phi_t);
        let (sin_t, cos_t) = self.params.theta0.sin_cos();
        (dl * cos_t + dt * sin_t, dl * sin_t - dt * cos_t)
    }

    /// Spatial derivative bound 2 pi a xi_m on each displacement partial.
    pub fn slope_bound(&self) -> f64 {
        2.0 * PI * self.params.amplitude * self.params.xi_m
    }

    /// Sensitivities of (U, V) at a point with respect to the parameter
    /// vector (a, xi_m, theta0, phi_L), transverse phase held fixed.
    /// Row 0 is dU/dp, row 1 is dV/dp.
    pub fn displacement_jacobian_at(&self, x: f64, y: f64) -> [[f64; 4]; 2] {
        let p = &self.params;
        let (sin_t, cos_t) = p.theta0.sin_cos();
        let r = x * cos_t + y * sin_t;
        let dr_dtheta = -x * sin_t + y * cos_t;
        let sl = r - p.phi_l;
        let st = r - p.phi_t;

        let dl = self.slope_profile(sl);
        let dt = self.slope_profile(st);
        let dl_ds = self.curvature_profile(sl);
        let dt_ds = self.curvature_profile(st);
        // d slope / d xi_m = (s / xi_m) * d slope / d s on the open window.
        let dl_dxi = sl / p.xi_m * dl_ds;
        let dt_dxi = st / p.xi_m * dt_ds;

        let u_a = (dl * cos_t + dt * sin_t) / p.amplitude;
        let v_a = (dl * sin_t - dt * cos_t) / p.amplitude;

        let u_xi = dl_dxi * cos_t + dt_dxi * sin_t;
        let v_xi = dl_dxi * sin_t - dt_dxi * cos_t;

        let u_theta = dl_ds * dr_dtheta * cos_t - dl * sin_t + dt_ds * dr_dtheta * sin_t
            + dt * cos_t;
        let v_theta = dl_ds * dr_dtheta * sin_t + dl * cos_t
            - dt_ds * dr_dtheta * cos_t
            + dt * sin_t;

        let u_phi = -dl_ds * cos_t;
        let v_phi = -dl_ds * sin_t;

        [[u_a, u_xi, u_theta, u_phi], [v_a, v_xi, v_theta, v_phi]]
    }
}

/// Samples one Helmholtz potential on the grid.
pub fn potential_field(
    kind: PotentialKind,
    params: &WaveParams,
    geometry: GridGeometry,
) -> Result<ScalarField> {
    let model = WaveModel::new(*params)?;
    Ok(ScalarField::from_fn(geometry, |x, y| model.potential_at(kind, x, y)))
}

/// Samples the displacement field obtained by analytic differentiation of
/// the two potentials.
pub fn displacement_from_potentials(
    params: &WaveParams,
    geometry: GridGeometry,
) -> Result<DisplacementField> {
    let model = WaveModel::new(*params)?;
    let mut u = ScalarField::zeros(geometry);
    let mut v = ScalarField::zeros(geometry);
    for r in 0..geometry.rows {
        for c in 0..geometry.cols {
            let (du, dv) = model.displacement_at(c as f64, r as f64);
            u.set(r, c, du);
            v.set(r, c, dv);
        }
    }
    DisplacementField::new(u, v)
}
