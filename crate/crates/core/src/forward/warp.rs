use crate::forward::DisplacementField;
use crate::grid::bicubic_sample;
use crate::{Error, Result, ScalarField};

/// Deforms a pattern by the displacement field:
/// `out(x, y) = bicubic(img, x - U(x,y), y - V(x,y))`, mirror boundary.
pub fn warp_pattern(img: &ScalarField, displacement: &DisplacementField) -> Result<ScalarField> {
    if img.geometry() != displacement.geometry() {
        return Err(Error::InvalidGeometry(
            "image and displacement field must share a geometry".into(),
        ));
    }
    let mut out = ScalarField::zeros(img.geometry());
    for r in 0..img.rows() {
        for c in 0..img.cols() {
            let u = displacement.u.at(r, c);
            let v = displacement.v.at(r, c);
            out.set(r, c, bicubic_sample(img, c as f64 - u, r as f64 - v));
        }
    }
    Ok(out)
}
