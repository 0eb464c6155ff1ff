//! The `TTV1` binary container.
//!
//! Layout (all little-endian): magic `TTV1`, `u32` order `d`, `d` x `u64`
//! mode sizes, `d + 1` x `u64` ranks, then every core's `f64` values in
//! storage order. A set file is a `u32` count followed by that many records.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::tt::{Core, TTVector};

pub const MAGIC: &[u8; 4] = b"TTV1";

/// Encoded size of one record in bytes.
pub fn encoded_len(x: &TTVector) -> usize {
    let d = x.order();
    4 + 4 + 8 * d + 8 * (d + 1) + 8 * x.storage_count()
}

pub fn write_ttv1<W: Write>(w: &mut W, x: &TTVector) -> Result<()> {
    let mut buf = Vec::with_capacity(encoded_len(x));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(x.order() as u32).to_le_bytes());
    for n in x.mode_sizes() {
        buf.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for r in x.ranks() {
        buf.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for core in x.cores() {
        for v in core.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn to_bytes(x: &TTVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(x));
    write_ttv1(&mut out, x).expect("writing to a Vec cannot fail");
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Format(format!("truncated record: need {n} bytes at offset {}", self.pos))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| Error::Format(format!("size {v} does not fit in memory")))
    }
}

fn read_record(c: &mut Cursor<'_>) -> Result<TTVector> {
    if c.take(4)? != MAGIC {
        return Err(Error::Format("bad magic, expected TTV1".into()));
    }
    let d = c.u32()? as usize;
    if d == 0 {
        return Err(Error::Format("order 0".into()));
    }
    let modes = (0..d).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
    let ranks = (0..=d).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
    let mut total = 0usize;
    for k in 0..d {
        let len = ranks[k]
            .checked_mul(modes[k])
            .and_then(|v| v.checked_mul(ranks[k + 1]))
            .ok_or_else(|| Error::Format("core size overflows".into()))?;
        total = total.checked_add(len).ok_or_else(|| Error::Format("core size overflows".into()))?;
    }
    let remaining = c.bytes.len() - c.pos;
    if total.checked_mul(8).map_or(true, |b| b > remaining) {
        return Err(Error::Format(format!(
            "record declares {total} values but only {remaining} bytes remain"
        )));
    }
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let len = ranks[k] * modes[k] * ranks[k + 1];
        let data = c
            .take(8 * len)?
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect();
        cores.push(Core::new(ranks[k], modes[k], ranks[k + 1], data).map_err(|e| Error::Format(e.to_string()))?);
    }
    TTVector::from_cores(cores).map_err(|e| Error::Format(e.to_string()))
}

/// Decodes exactly one record; trailing bytes are an error.
pub fn from_bytes(bytes: &[u8]) -> Result<TTVector> {
    let mut c = Cursor { bytes, pos: 0 };
    let x = read_record(&mut c)?;
    if c.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes after record", bytes.len() - c.pos)));
    }
    Ok(x)
}

pub fn read_ttv1<R: Read>(r: &mut R) -> Result<TTVector> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn set_to_bytes(set: &[TTVector]) -> Result<Vec<u8>> {
    let count = u32::try_from(set.len()).map_err(|_| Error::InvalidArgument("too many vectors".into()))?;
    let mut out = count.to_le_bytes().to_vec();
    for x in set {
        write_ttv1(&mut out, x)?;
    }
    Ok(out)
}

/// Decodes a count-prefixed set; the byte length must match exactly.
pub fn set_from_bytes(bytes: &[u8]) -> Result<Vec<TTVector>> {
    let mut c = Cursor { bytes, pos: 0 };
    let count = c.u32()? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        out.push(read_record(&mut c)?);
    }
    if c.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes after {count} records", bytes.len() - c.pos)));
    }
    Ok(out)
}

pub fn write_set<W: Write>(w: &mut W, set: &[TTVector]) -> Result<()> {
    w.write_all(&set_to_bytes(set)?)?;
    Ok(())
}

pub fn read_set<R: Read>(r: &mut R) -> Result<Vec<TTVector>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    set_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TTVector {
        let cores = vec![
            Core::new(1, 2, 2, vec![1.0, -2.0, 0.5, 3.0]).unwrap(),
            Core::new(2, 3, 1, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap(),
        ];
        TTVector::from_cores(cores).unwrap()
    }

    #[test]
    fn round_trip() {
        let x = sample();
        let bytes = to_bytes(&x);
        assert_eq!(bytes.len(), encoded_len(&x));
        assert_eq!(&bytes[..4], b"TTV1");
        assert_eq!(from_bytes(&bytes).unwrap(), x);
    }

    #[test]
    fn rejects_bad_lengths() {
        let bytes = to_bytes(&sample());
        assert!(matches!(from_bytes(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(from_bytes(&longer), Err(Error::Format(_))));
        let mut bad_magic = bytes;
        bad_magic[0] = b'X';
        assert!(matches!(from_bytes(&bad_magic), Err(Error::Format(_))));
    }

    #[test]
    fn set_round_trip() {
        let set = vec![sample(), sample().scale(2.0)];
        let bytes = set_to_bytes(&set).unwrap();
        assert_eq!(u32::from_le_bytes(bytes[..4].try_into().unwrap()), 2);
        assert_eq!(set_from_bytes(&bytes).unwrap(), set);
        assert!(set_from_bytes(&bytes[..bytes.len() - 8]).is_err());
    }
}
