//! File formats: the F32F binary field container, multi-frame stacks, and
//! small CSV helpers.

mod f32f;

pub use f32f::{
    read_field, read_stack, write_complex, write_scalar, write_stack, Field, F32F_MAGIC,
};

use std::io::Write as _;
use std::path::Path;

use crate::Result;

/// Writes rows of already-formatted CSV cells under a header line.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
