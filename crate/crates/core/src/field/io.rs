//! FLD1 binary field files.
//!
//! Layout: 8-byte magic `HOMSOBF1`, then little-endian `u32 d`, `u32 N`,
//! `f64 L`, `u8 kind` (0 real, 1 complex), then `N^d` complex samples as
//! interleaved `f64` pairs `(re, im)` in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Field, FieldKind, GridSpec};
use crate::error::{Error, Result};

pub const FLD_MAGIC: &[u8; 8] = b"HOMSOBF1";

pub fn write_fld(field: &Field, mut w: impl Write) -> Result<()> {
    let g = field.grid();
    w.write_all(FLD_MAGIC)?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.period().to_le_bytes())?;
    let kind = match field.kind() {
        FieldKind::Real => 0u8,
        FieldKind::Complex => 1u8,
    };
    w.write_all(&[kind])?;
    for z in field.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated FLD1 stream: {e}")))?;
    Ok(buf)
}

pub fn read_fld(mut r: impl Read) -> Result<Field> {
    let magic: [u8; 8] = take(&mut r)?;
    if &magic != FLD_MAGIC {
        return Err(Error::Format(format!(
            "unknown magic {:?}, expected HOMSOBF1",
            String::from_utf8_lossy(&magic)
        )));
    }
    let d = u32::from_le_bytes(take(&mut r)?) as usize;
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    let period = f64::from_le_bytes(take(&mut r)?);
    let kind = match take::<1>(&mut r)?[0] {
        0 => FieldKind::Real,
        1 => FieldKind::Complex,
        k => return Err(Error::Format(format!("unknown field kind byte {k}"))),
    };
    let grid = GridSpec::new(d, period, n).map_err(|e| Error::Format(e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(take(&mut r)?);
        let im = f64::from_le_bytes(take(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after FLD1 payload".into()));
    }
    Field::new(grid, values, kind)
}

pub fn write_fld_file(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    write_fld(field, BufWriter::new(File::create(path)?))
}

pub fn read_fld_file(path: impl AsRef<Path>) -> Result<Field> {
    read_fld(BufReader::new(File::open(path)?))
}
