use crate::forward::{
    displacement_from_potentials, gaussian_blur, warp_pattern, WaveParams,
};
use crate::{Error, Result, ScalarField};

/// Maximum-likelihood fit result.
#[derive(Debug, Clone, Copy)]
pub struct MleFit {
    pub params: WaveParams,
    pub residual: f64,
    pub converged: bool,
}

const DIM: usize = 5;

fn to_vec(p: &WaveParams) -> [f64; DIM] {
    [p.amplitude, p.xi_m, p.theta0, p.phi_l, p.phi_t]
}

fn from_vec(v: &[f64; DIM]) -> WaveParams {
    WaveParams { amplitude: v[0], xi_m: v[1], theta0: v[2], phi_l: v[3], phi_t: v[4] }
}

/// Sum of squared residuals between the observation and the forward model;
/// infeasible parameter vectors get a graded penalty that slopes back toward
/// the feasible region.
fn objective(v: &[f64; DIM], pattern: &ScalarField, observed: &ScalarField, psf: f64) -> f64 {
    let params = from_vec(v);
    let mut violation = 0.0;
    if !(params.amplitude > 0.0) {
        violation += 1.0 - params.amplitude;
    }
    if !(params.xi_m > 0.0) {
        violation += 1.0 - params.xi_m;
    } else if params.amplitude > 0.0 {
        let bound = 1.0 / (4.0 * std::f64::consts::PI * params.amplitude);
        if params.xi_m >= bound {
            violation += (params.xi_m - bound) / bound + 1.0;
        }
    }
    if violation > 0.0 {
        return 1e12 * (1.0 + violation);
    }

    let truth = match displacement_from_potentials(&params, pattern.geometry()) {
        Ok(d) => d,
        Err(_) => return 1e12,
    };
    let warped = match warp_pattern(pattern, &truth) {
        Ok(w) => w,
        Err(_) => return 1e12,
    };
    let model = gaussian_blur(&warped, psf);
    model
        .data()
        .iter()
        .zip(observed.data())
        .map(|(m, o)| (m - o) * (m - o))
        .sum()
}

/// Nelder-Mead simplex descent followed by a short finite-difference
/// gradient polish.
fn nelder_mead(
    f: &dyn Fn(&[f64; DIM]) -> f64,
    init: [f64; DIM],
    max_iter: usize,
) -> ([f64; DIM], f64, bool) {
    // Initial simplex: perturb each coordinate by 5% (absolute floor 0.01).
    let mut simplex: Vec<[f64; DIM]> = vec![init];
    for i in 0..DIM {
        let mut v = init;
        let step = (v[i].abs() * 0.05).max(0.01);
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut converged = false;
    for _ in 0..max_iter {
        // Order ascending by value.
        let mut order: Vec<usize> = (0..=DIM).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[DIM];
        let second_worst = order[DIM - 1];

        if (values[worst] - values[best]).abs() <= 1e-12 * (1.0 + values[best].abs()) {
            converged = true;
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = [0.0; DIM];
        for &idx in order.iter().take(DIM) {
            for d in 0..DIM {
                centroid[d] += simplex[idx][d] / DIM as f64;
            }
        }

        let mut reflect = [0.0; DIM];
        for d in 0..DIM {
            reflect[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
        }
        let f_reflect = f(&reflect);

        if f_reflect < values[best] {
            let mut expand = [0.0; DIM];
            for d in 0..DIM {
                expand[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
            }
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let mut contract = [0.0; DIM];
            for d in 0..DIM {
                contract[d] = centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]);
            }
            let f_contract = f(&contract);
            if f_contract < values[worst] {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // Shrink toward the best vertex.
                let best_v = simplex[best];
                for idx in 0..=DIM {
                    if idx == best {
                        continue;
                    }
                    for d in 0..DIM {
                        simplex[idx][d] = best_v[d] + 0.5 * (simplex[idx][d] - best_v[d]);
                    }
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..=DIM).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    (simplex[order[0]], values[order[0]], converged)
}

fn gradient_polish(
    f: &dyn Fn(&[f64; DIM]) -> f64,
    mut x: [f64; DIM],
    mut fx: f64,
    iterations: usize,
) -> ([f64; DIM], f64) {
    for _ in 0..iterations {
        let mut grad = [0.0; DIM];
        for i in 0..DIM {
            let h = (x[i].abs() * 1e-5).max(1e-8);
            let mut plus = x;
            plus[i] += h;
            let mut minus = x;
            minus[i] -= h;
            grad[i] = (f(&plus) - f(&minus)) / (2.0 * h);
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-14 {
            break;
        }
        // Backtracking line search along the negative gradient.
        let mut step = 1e-2 / norm * (1.0 + fx.sqrt());
        let mut improved = false;
        for _ in 0..12 {
            let mut cand = x;
            for d in 0..DIM {
                cand[d] -= step * grad[d];
            }
            let fc = f(&cand);
            if fc < fx {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

/// Fits the wave parameters by minimizing the squared difference between the
/// observed deformed image and the forward model (bicubic warp of the known
/// pattern plus PSF blur), starting from `init`. Constraint violations carry
/// a penalty; non-convergence returns the best point found with a flag.
pub fn mle_fit(
    pattern: &ScalarField,
    observed_deformed: &ScalarField,
    init: &WaveParams,
    psf_sigma: f64,
) -> Result<MleFit> {
    init.validate().map_err(|e| {
        Error::InvalidArgument(format!("initial parameters outside the constraint region: {e}"))
    })?;
    if pattern.geometry() != observed_deformed.geometry() {
        return Err(Error::InvalidGeometry("images must share a geometry".into()));
    }

    let f = |v: &[f64; DIM]| objective(v, pattern, observed_deformed, psf_sigma);
    let (best, value, converged) = nelder_mead(&f, to_vec(init), 400);
    let (best, value) = gradient_polish(&f, best, value, 5);

    let params = from_vec(&best);
    params.validate().map_err(|_| {
        Error::EstimationFailed("optimizer left the feasible region".into())
    })?;
    Ok(MleFit { params, residual: value, converged })
}
