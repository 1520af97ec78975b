pub mod bench;
pub mod demodulate;
pub mod dic;
pub mod dispersion;
pub mod simulate;
pub mod synthseq;

use std::path::Path;

use texwave_core::forward::DisplacementField;
use texwave_core::io::{read_field, write_complex};
use texwave_core::{ComplexField, ScalarField};

use crate::CliError;

/// Displacement fields travel as one complex container: re = U, im = V.
pub fn write_displacement(path: &Path, field: &DisplacementField) -> Result<(), CliError> {
    let complex = ComplexField::from_re_im(&field.u, &field.v)?;
    write_complex(path, &complex)?;
    Ok(())
}

pub fn read_displacement(path: &Path) -> Result<DisplacementField, CliError> {
    let complex = read_field(path)?.into_complex()?;
    let (u, v) = complex.re_im();
    Ok(DisplacementField::new(u, v)?)
}

pub fn read_scalar(path: &Path) -> Result<ScalarField, CliError> {
    Ok(read_field(path)?.into_real()?)
}

/// Field MSE of an estimate against a truth container, in dB (px^2 ref).
pub fn mse_report(
    estimate: &DisplacementField,
    truth: &DisplacementField,
    margin: usize,
) -> serde_json::Value {
    let mse = texwave_core::eval::field_mse(estimate, truth, margin);
    serde_json::json!({
        "mse_px2": mse,
        "mse_db": 10.0 * mse.log10(),
        "margin_px": margin,
    })
}
