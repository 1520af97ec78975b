//! F32F field container.
//!
//! Layout: a 16-byte header (8-byte magic `F32FIELD`, u32 LE version = 1,
//! u32 LE reserved = 0), a u32 LE length-prefixed UTF-8 JSON metadata block
//! `{rows, cols, pixel_pitch, kind}`, then the little-endian f32 payload,
//! row-major, interleaved re/im for complex fields. Round trips are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexField, Error, GridGeometry, Result, ScalarField};

pub const F32F_MAGIC: &[u8; 8] = b"F32FIELD";
const F32F_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    rows: usize,
    cols: usize,
    pixel_pitch: f64,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Real,
    Complex,
}

/// A field read back from an F32F container.
#[derive(Debug, Clone)]
pub enum Field {
    Real(ScalarField),
    Complex(ComplexField),
}

impl Field {
    pub fn geometry(&self) -> GridGeometry {
        match self {
            Field::Real(f) => f.geometry(),
            Field::Complex(f) => f.geometry(),
        }
    }

    pub fn into_real(self) -> Result<ScalarField> {
        match self {
            Field::Real(f) => Ok(f),
            Field::Complex(_) => Err(Error::Format("expected a real field".into())),
        }
    }

    pub fn into_complex(self) -> Result<ComplexField> {
        match self {
            Field::Complex(f) => Ok(f),
            Field::Real(_) => Err(Error::Format("expected a complex field".into())),
        }
    }
}

fn write_header(w: &mut impl Write, meta: &Meta) -> Result<()> {
    w.write_all(F32F_MAGIC)?;
    w.write_all(&F32F_VERSION.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    let json = serde_json::to_vec(meta)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    Ok(())
}

pub fn write_scalar(path: &Path, field: &ScalarField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_scalar_to(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn write_complex(path: &Path, field: &ComplexField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_complex_to(&mut w, field)?;
    w.flush()?;
    Ok(())
}

fn write_scalar_to(w: &mut impl Write, field: &ScalarField) -> Result<()> {
    let g = field.geometry();
    let meta = Meta { rows: g.rows, cols: g.cols, pixel_pitch: g.pixel_pitch, kind: Kind::Real };
    write_header(w, &meta)?;
    for &v in field.data() {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    Ok(())
}

fn write_complex_to(w: &mut impl Write, field: &ComplexField) -> Result<()> {
    let g = field.geometry();
    let meta =
        Meta { rows: g.rows, cols: g.cols, pixel_pitch: g.pixel_pitch, kind: Kind::Complex };
    write_header(w, &meta)?;
    for v in field.data() {
        w.write_all(&(v.re as f32).to_le_bytes())?;
        w.write_all(&(v.im as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let field = read_field_from(&mut r)?;
    Ok(field)
}

fn read_field_from(r: &mut impl Read) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != F32F_MAGIC {
        return Err(Error::Format("bad magic, not an F32F container".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != F32F_VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    r.read_exact(&mut word)?; // reserved
    r.read_exact(&mut word)?;
    let json_len = u32::from_le_bytes(word) as usize;
    let mut json = vec![0u8; json_len];
    r.read_exact(&mut json)?;
    let meta: Meta = serde_json::from_slice(&json)?;
    let geometry = GridGeometry::with_pitch(meta.rows, meta.cols, meta.pixel_pitch)?;

    let scalar_count = geometry.len() * if meta.kind == Kind::Complex { 2 } else { 1 };
    let mut payload = vec![0u8; scalar_count * 4];
    r.read_exact(&mut payload)?;
    let values: Vec<f64> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();

    match meta.kind {
        Kind::Real => Ok(Field::Real(ScalarField::from_vec(geometry, values)?)),
        Kind::Complex => {
            let data: Vec<Complex64> =
                values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            Ok(Field::Complex(ComplexField::from_vec(geometry, data)?))
        }
    }
}

/// Writes a multi-frame stack: F32F records concatenated back to back.
pub fn write_stack(path: &Path, frames: &[ScalarField]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for frame in frames {
        write_scalar_to(&mut w, frame)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a multi-frame stack until end of file.
pub fn read_stack(path: &Path) -> Result<Vec<ScalarField>> {
    let bytes = std::fs::read(path)?;
    let mut frames = Vec::new();
    let mut cursor = std::io::Cursor::new(&bytes[..]);
    while (cursor.position() as usize) < bytes.len() {
        let field = read_field_from(&mut cursor)?;
        frames.push(field.into_real()?);
    }
    Ok(frames)
}
