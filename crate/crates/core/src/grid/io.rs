//! FLD1 binary field format (little-endian):
//! `"FLD1"`, u32 version, u32 dim, u32 N, f64 period, u32 j, j x u32 blocks,
//! then `N^dim` samples as (re, im) f64 pairs, axis 0 slowest.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Field, GridSpec};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FLD1";
const VERSION: u32 = 1;
/// Refuse payloads beyond this many samples.
const MAX_SAMPLES: usize = 1 << 28;

pub fn write_field<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let spec = field.spec();
    let mut buf = Vec::with_capacity(28 + 4 * spec.blocks().len() + 16 * spec.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.samples() as u32).to_le_bytes());
    buf.extend_from_slice(&spec.period().to_le_bytes());
    buf.extend_from_slice(&(spec.blocks().len() as u32).to_le_bytes());
    for &b in spec.blocks() {
        buf.extend_from_slice(&(b as u32).to_le_bytes());
    }
    for z in field.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Truncated { needed: end, found: self.bytes.len() });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    let magic: [u8; 4] = c.take(4)?.try_into().unwrap();
    if &magic != MAGIC {
        return Err(Error::MagicMismatch(magic));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = c.u32()? as usize;
    let n = c.u32()? as usize;
    let period = c.f64()?;
    let j = c.u32()? as usize;
    if j > dim.max(1) {
        return Err(Error::DimensionOverflow(format!("{j} blocks for dimension {dim}")));
    }
    let mut blocks = Vec::with_capacity(j);
    for _ in 0..j {
        blocks.push(c.u32()? as usize);
    }
    let count = u32::try_from(dim)
        .ok()
        .and_then(|d| n.checked_pow(d))
        .filter(|&c| c <= MAX_SAMPLES)
        .ok_or_else(|| Error::DimensionOverflow(format!("{n}^{dim} samples")))?;
    let spec = GridSpec::new(dim, n, period, blocks)?;
    let payload = c.take(16 * count)?;
    let samples = payload
        .chunks_exact(16)
        .map(|ch| {
            Complex64::new(
                f64::from_le_bytes(ch[..8].try_into().unwrap()),
                f64::from_le_bytes(ch[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::new(spec, samples)
}

pub fn save_field(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let f = fs::File::create(path)?;
    write_field(field, std::io::BufWriter::new(f))
}

pub fn load_field(path: impl AsRef<Path>) -> Result<Field> {
    read_field(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> Field {
        let spec = GridSpec::new(2, 8, 3.5, vec![2]).unwrap();
        Field::from_fn(&spec, |x| Complex64::new(x[0].sin(), x[1] * 0.25 - 1.0 / 3.0))
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.fld");
        let u = sample_field();
        save_field(&u, &path).unwrap();
        let v = load_field(&path).unwrap();
        assert_eq!(u.spec(), v.spec());
        for (a, b) in u.samples().iter().zip(v.samples()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let mut buf = Vec::new();
        write_field(&sample_field(), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(matches!(read_field(&buf[..]), Err(Error::MagicMismatch(_))));
    }

    #[test]
    fn rejects_truncation() {
        let mut buf = Vec::new();
        write_field(&sample_field(), &mut buf).unwrap();
        assert!(matches!(read_field(&buf[..10]), Err(Error::Truncated { .. })));
        assert!(matches!(read_field(&buf[..buf.len() - 3]), Err(Error::Truncated { .. })));
    }

    #[test]
    fn rejects_huge_dimension() {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&40u32.to_le_bytes());
        buf.extend_from_slice(&1024u32.to_le_bytes());
        buf.extend_from_slice(&1.0f64.to_le_bytes());
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&40u32.to_le_bytes());
        assert!(matches!(read_field(&buf[..]), Err(Error::DimensionOverflow(_))));
    }
}
