use nalgebra::DMatrix;

use crate::ScalarField;

/// Best rank-1 spatial profile of a displacement field: the leading singular
/// triple is kept, the rank-1 field is averaged along the transverse (x)
/// axis, and the sign is fixed so the profile correlates positively with
/// the raw transverse mean. Returns one value per row (position).
pub fn rank1_profile(field: &ScalarField) -> Vec<f64> {
    let rows = field.rows();
    let cols = field.cols();
    let m = DMatrix::from_row_slice(rows, cols, field.data());

    let svd = m.svd(true, true);
    let sigma1 = svd.singular_values[0];
    if sigma1 <= 0.0 {
        return vec![0.0; rows];
    }
    let u1 = svd.u.as_ref().expect("u requested").column(0);
    let v1 = svd.v_t.as_ref().expect("v_t requested").row(0);
    let v_mean: f64 = v1.iter().sum::<f64>() / cols as f64;

    let mut profile: Vec<f64> = u1.iter().map(|&u| sigma1 * u * v_mean).collect();

    // Positive correlation with the plain transverse mean.
    let row_means: Vec<f64> =
        (0..rows).map(|r| (0..cols).map(|c| field.at(r, c)).sum::<f64>() / cols as f64).collect();
    let dot: f64 = profile.iter().zip(&row_means).map(|(p, m)| p * m).sum();
    if dot < 0.0 {
        for p in &mut profile {
            *p = -*p;
        }
    }
    profile
}
