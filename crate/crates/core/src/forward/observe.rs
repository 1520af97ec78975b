use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::forward::ObservationParams;
use crate::grid::mirror_index;
use crate::{Result, ScalarField};

/// Applies the camera model: Gaussian PSF blur, quantization, then additive
/// white Gaussian noise with variance set from `snr_db` against the
/// blurred-signal variance. Fully determined by the seed.
pub fn apply_observation(img: &ScalarField, params: &ObservationParams) -> Result<ScalarField> {
    params.validate()?;
    let blurred = gaussian_blur(img, params.psf_sigma);
    let signal_variance = blurred.variance();

    let mut out = if params.quant_bits > 0 {
        let levels = ((1u32 << params.quant_bits) - 1) as f64;
        blurred.map(|v| (v.clamp(0.0, 1.0) * levels).round() / levels)
    } else {
        blurred
    };

    if let Some(snr_db) = params.snr_db {
        let noise_var = signal_variance / 10f64.powf(snr_db / 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        let normal = Normal::new(0.0, noise_var.sqrt()).expect("valid sigma");
        for v in out.data_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Separable Gaussian blur with mirror boundary; sigma = 0 is the identity.
pub fn gaussian_blur(img: &ScalarField, sigma: f64) -> ScalarField {
    if sigma <= 0.0 {
        return img.clone();
    }
    let radius = (4.0 * sigma).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for k in -(radius as isize)..=(radius as isize) {
        kernel.push((-(k * k) as f64 / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }

    let rows = img.rows();
    let cols = img.cols();
    let mut horiz = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0.0;
            for (ki, w) in kernel.iter().enumerate() {
                let cc = mirror_index(c as isize + ki as isize - radius as isize, cols);
                acc += w * img.at(r, cc);
            }
            horiz[r * cols + c] = acc;
        }
    }
    let mut out = ScalarField::zeros(img.geometry());
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0.0;
            for (ki, w) in kernel.iter().enumerate() {
                let rr = mirror_index(r as isize + ki as isize - radius as isize, rows);
                acc += w * horiz[rr * cols + c];
            }
            out.set(r, c, acc);
        }
    }
    out
}
