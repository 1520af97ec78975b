use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::SpatioTemporalMap;
use crate::{Error, Result};

/// One dispersion sample: frequency, wavenumber, phase velocity and the
/// quality of the phase-position fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DispersionSample {
    pub f_hz: f64,
    pub k_rad_per_m: f64,
    pub c_m_per_s: f64,
    pub r2: f64,
}

/// Dispersion curve over a frequency band. `c = 2 pi f / k` holds exactly at
/// every sample by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub samples: Vec<DispersionSample>,
    pub band_hz: (f64, f64),
    /// Set when the map covers fewer than two wavelengths at the lowest
    /// band frequency (finite-size bias likely).
    pub finite_size_warning: bool,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Minimum fit quality for a frequency bin to enter the curve.
const MIN_R2: f64 = 0.9;

fn wrap_rad(x: f64) -> f64 {
    let mut w = x - TAU * (x / TAU).round();
    if w <= -PI {
        w += TAU;
    }
    w
}

/// Cumulative 1D phase unwrap.
fn unwrap_1d(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut prev = phases[0];
    let mut acc = phases[0];
    out.push(acc);
    for &p in &phases[1..] {
        acc += wrap_rad(p - prev);
        prev = p;
        out.push(acc);
    }
    out
}

/// Least-squares line fit returning (slope, intercept, r^2).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx.max(1e-300);
    let intercept = my - slope * mx;
    let r2 = if syy <= 1e-300 { 1.0 } else { (sxy * sxy) / (sxx * syy).max(1e-300) };
    (slope, intercept, r2)
}

/// Estimates the dispersion curve: per frequency bin within the band, the
/// phase of the temporal spectrum is unwrapped along position and fit with a
/// line; the wavenumber is the negated slope and the phase velocity follows
/// as 2 pi f / k. Bins with r^2 below 0.9 or a non-positive wavenumber are
/// rejected; an empty band is an error.
pub fn estimate_dispersion(
    map: &SpatioTemporalMap,
    band_hz: (f64, f64),
) -> Result<DispersionCurve> {
    let rate = map.frame_rate();
    let (f_min, f_max) = band_hz;
    if !(f_min > 0.0 && f_min < f_max && f_max < rate / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "band ({f_min}, {f_max}) Hz must lie inside (0, {})",
            rate / 2.0
        )));
    }

    let n_pos = map.n_pos();
    let n_time = map.n_time();
    let df = rate / n_time as f64;
    let bin_lo = (f_min / df).ceil() as usize;
    let bin_hi = (f_max / df).floor() as usize;
    if bin_lo > bin_hi || bin_hi >= n_time / 2 {
        return Err(Error::BandEmpty);
    }

    // Temporal spectrum per position row.
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n_time));
    let mut spectra: Vec<Vec<Complex64>> = Vec::with_capacity(n_pos);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for y in 0..n_pos {
        let mut row: Vec<Complex64> =
            (0..n_time).map(|t| Complex64::new(map.at(y, t), 0.0)).collect();
        fft.process_with_scratch(&mut row, &mut scratch);
        spectra.push(row);
    }

    let dy_m = map.dy_cm() / 100.0;
    let positions_m: Vec<f64> = (0..n_pos).map(|y| y as f64 * dy_m).collect();

    let mut samples = Vec::new();
    for bin in bin_lo..=bin_hi {
        let f_hz = bin as f64 * df;
        let h: Vec<Complex64> = (0..n_pos).map(|y| spectra[y][bin]).collect();
        if h.iter().map(|v| v.norm()).fold(0.0, f64::max) <= 0.0 {
            continue;
        }
        let phases: Vec<f64> = h.iter().map(|v| v.arg()).collect();
        let unwrapped = unwrap_1d(&phases);
        let (slope, _, r2) = line_fit(&positions_m, &unwrapped);
        let k = -slope;
        if r2 < MIN_R2 || k <= 0.0 {
            continue;
        }
        samples.push(DispersionSample { f_hz, k_rad_per_m: k, c_m_per_s: TAU * f_hz / k, r2 });
    }

    if samples.is_empty() {
        return Err(Error::BandEmpty);
    }

    // Finite-size check at the lowest surviving frequency.
    let first = &samples[0];
    let wavelength_m = TAU / first.k_rad_per_m;
    let map_length_m = n_pos as f64 * dy_m;
    let finite_size_warning = map_length_m < 2.0 * wavelength_m;

    Ok(DispersionCurve { samples, band_hz, finite_size_warning })
}

/// Pointwise mean and standard deviation of several dispersion curves,
/// resampled by linear interpolation onto a common frequency grid over the
/// intersection of their bands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub f_hz: Vec<f64>,
    pub mean_c: Vec<f64>,
    /// Population standard deviation over runs.
    pub std_c: Vec<f64>,
}

fn interp_curve(curve: &DispersionCurve, f: f64) -> f64 {
    let s = &curve.samples;
    if f <= s[0].f_hz {
        return s[0].c_m_per_s;
    }
    if f >= s[s.len() - 1].f_hz {
        return s[s.len() - 1].c_m_per_s;
    }
    for w in s.windows(2) {
        if f >= w[0].f_hz && f <= w[1].f_hz {
            let t = (f - w[0].f_hz) / (w[1].f_hz - w[0].f_hz).max(1e-300);
            return (1.0 - t) * w[0].c_m_per_s + t * w[1].c_m_per_s;
        }
    }
    s[s.len() - 1].c_m_per_s
}

pub fn aggregate_runs(curves: &[DispersionCurve]) -> Result<AggregateCurve> {
    if curves.len() < 2 {
        return Err(Error::InvalidArgument("need at least two curves".into()));
    }
    if curves.iter().any(|c| c.samples.is_empty()) {
        return Err(Error::InvalidArgument("empty curve".into()));
    }
    let lo = curves
        .iter()
        .map(|c| c.samples[0].f_hz)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = curves
        .iter()
        .map(|c| c.samples[c.samples.len() - 1].f_hz)
        .fold(f64::INFINITY, f64::min);
    if !(lo <= hi) {
        return Err(Error::InvalidArgument("curves cover disjoint bands".into()));
    }

    let n_grid = curves.iter().map(|c| c.samples.len()).max().unwrap().max(2);
    let f_hz: Vec<f64> = (0..n_grid)
        .map(|i| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64)
        .collect();

    let mut mean_c = Vec::with_capacity(n_grid);
    let mut std_c = Vec::with_capacity(n_grid);
    for &f in &f_hz {
        let values: Vec<f64> = curves.iter().map(|c| interp_curve(c, f)).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        mean_c.push(mean);
        std_c.push(var.sqrt());
    }
    Ok(AggregateCurve { f_hz, mean_c, std_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Synthesizes a map from a closed-form dispersion relation c(f).
    fn synthetic_map(
        n_pos: usize,
        n_time: usize,
        rate: f64,
        dy_cm: f64,
        c_of_f: impl Fn(f64) -> f64,
        band: (f64, f64),
    ) -> SpatioTemporalMap {
        let dy_m = dy_cm / 100.0;
        let mut values = vec![0.0; n_pos * n_time];
        let df = rate / n_time as f64;
        let bins: Vec<usize> = (1..n_time / 2)
            .filter(|&b| {
                let f = b as f64 * df;
                f >= band.0 && f <= band.1
            })
            .collect();
        for &b in &bins {
            let f = b as f64 * df;
            let k = TAU * f / c_of_f(f);
            for y in 0..n_pos {
                for t in 0..n_time {
                    values[y * n_time + t] +=
                        (TAU * f * (t as f64 / rate) - k * y as f64 * dy_m).cos();
                }
            }
        }
        SpatioTemporalMap::new(values, n_pos, n_time, 1.0 / rate, dy_cm, vec![]).unwrap()
    }

    #[test]
    fn non_dispersive_wave_recovers_eleven_m_per_s() {
        let map = synthetic_map(256, 256, 3000.0, 1.0 / 30.0, |_| 11.0, (30.0, 90.0));
        let curve = estimate_dispersion(&map, (40.0, 80.0)).unwrap();
        assert!(!curve.samples.is_empty());
        for s in &curve.samples {
            assert!(
                (s.c_m_per_s - 11.0).abs() / 11.0 < 0.02,
                "c({}) = {}",
                s.f_hz,
                s.c_m_per_s
            );
            assert!((s.c_m_per_s - TAU * s.f_hz / s.k_rad_per_m).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersive_wave_matches_closed_form() {
        let c0 = 9.0;
        let f0 = 40.0;
        let c_of_f = move |f: f64| c0 * (f / f0).sqrt();
        let map = synthetic_map(256, 256, 3000.0, 1.0 / 30.0, c_of_f, (30.0, 90.0));
        let curve = estimate_dispersion(&map, (40.0, 80.0)).unwrap();
        assert!(curve.samples.len() >= 3);
        for s in &curve.samples {
            let expected = c_of_f(s.f_hz);
            assert!(
                (s.c_m_per_s - expected).abs() / expected < 0.03,
                "c({}) = {} vs {expected}",
                s.f_hz,
                s.c_m_per_s
            );
        }
    }

    #[test]
    fn pure_noise_rejects_all_bins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..128 * 128).map(|_| rng.random::<f64>() - 0.5).collect();
        let map = SpatioTemporalMap::new(values, 128, 128, 1.0 / 3000.0, 0.1, vec![]).unwrap();
        assert!(matches!(
            estimate_dispersion(&map, (40.0, 80.0)),
            Err(Error::BandEmpty)
        ));
    }

    #[test]
    fn band_outside_nyquist_rejected() {
        let map = synthetic_map(64, 64, 1000.0, 0.1, |_| 11.0, (10.0, 400.0));
        assert!(estimate_dispersion(&map, (100.0, 600.0)).is_err());
        assert!(estimate_dispersion(&map, (0.0, 100.0)).is_err());
    }

    #[test]
    fn identical_curves_have_zero_std() {
        let map = synthetic_map(256, 256, 3000.0, 1.0 / 30.0, |_| 11.0, (30.0, 90.0));
        let c1 = estimate_dispersion(&map, (40.0, 80.0)).unwrap();
        let c2 = c1.clone();
        let agg = aggregate_runs(&[c1, c2]).unwrap();
        assert!(agg.std_c.iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn symmetric_offset_gives_center_and_delta() {
        let map = synthetic_map(256, 256, 3000.0, 1.0 / 30.0, |_| 11.0, (30.0, 90.0));
        let base = estimate_dispersion(&map, (40.0, 80.0)).unwrap();
        let delta = 0.5;
        let mut up = base.clone();
        let mut down = base.clone();
        for s in &mut up.samples {
            s.c_m_per_s += delta;
        }
        for s in &mut down.samples {
            s.c_m_per_s -= delta;
        }
        let agg = aggregate_runs(&[up, down]).unwrap();
        for (m, s) in agg.mean_c.iter().zip(&agg.std_c) {
            let base_c = 11.0;
            assert!((m - base_c).abs() < 0.05, "mean {m}");
            assert!((s - delta).abs() < 1e-9, "std {s}");
        }
    }

    #[test]
    fn disjoint_bands_error() {
        let map = synthetic_map(256, 512, 3000.0, 1.0 / 30.0, |_| 11.0, (20.0, 200.0));
        let a = estimate_dispersion(&map, (40.0, 60.0)).unwrap();
        let b = estimate_dispersion(&map, (100.0, 140.0)).unwrap();
        assert!(aggregate_runs(&[a, b]).is_err());
    }
}
