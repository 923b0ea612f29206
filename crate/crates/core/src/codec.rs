//! Bit-exact coordinate files.
//!
//! Binary layout: `"SGE1"`, version byte `0x01`, `u64` LE vertex count, then
//! one record per vertex: `u16` LE `len_x`, `u16` LE `len_y`, and the bits of
//! `y` packed MSB-first into `ceil(len_y / 8)` zero-padded bytes. `x` is the
//! first `len_x` bits of `y`.

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicPoint, TreeAddress};
use crate::embed::EmbeddingTable;
use crate::error::CodecError;

pub const MAGIC: &[u8; 4] = b"SGE1";
pub const VERSION: u8 = 0x01;

/// One vertex's record without the header.
pub fn encode_point(vertex: usize, p: &DyadicPoint, out: &mut Vec<u8>) -> Result<(), CodecError> {
    let len = |a: &TreeAddress| u16::try_from(a.len()).map_err(|_| CodecError::LengthOverflow { vertex, len: a.len() });
    let (len_x, len_y) = (len(p.x())?, len(p.y())?);
    out.extend_from_slice(&len_x.to_le_bytes());
    out.extend_from_slice(&len_y.to_le_bytes());
    let start = out.len();
    out.resize(start + (len_y as usize).div_ceil(8), 0);
    for (i, bit) in p.y().bits().enumerate() {
        if bit {
            out[start + i / 8] |= 0x80 >> (i % 8);
        }
    }
    Ok(())
}

pub fn encode(table: &EmbeddingTable) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(13 + 6 * table.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(table.len() as u64).to_le_bytes());
    for (v, p) in table.points().iter().enumerate() {
        encode_point(v, p, &mut out)?;
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(CodecError::TruncatedStream(what))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<EmbeddingTable, CodecError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic").map_err(|_| CodecError::BadMagic)? != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let version = r.take(1, "version")?[0];
    if version != VERSION {
        return Err(CodecError::VersionMismatch(version));
    }
    let n = u64::from_le_bytes(r.take(8, "vertex count")?.try_into().unwrap());
    // every record takes at least four bytes; bounds the allocation
    let remaining = (bytes.len() - r.pos) as u64;
    if n > remaining / 4 {
        return Err(CodecError::TruncatedStream("records"));
    }
    let mut points = Vec::with_capacity(n as usize);
    for vertex in 0..n as usize {
        let len_x = r.u16("record length")? as usize;
        let len_y = r.u16("record length")? as usize;
        if len_x > len_y {
            return Err(CodecError::LengthViolation { vertex, len_x, len_y });
        }
        let packed = r.take(len_y.div_ceil(8), "record bits")?;
        let y = TreeAddress::from_bits((0..len_y).map(|i| packed[i / 8] & (0x80 >> (i % 8)) != 0));
        points.push(DyadicPoint::new(y.prefix(len_x), y).expect("a prefix is an ancestor"));
    }
    if r.pos != bytes.len() {
        return Err(CodecError::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(EmbeddingTable::new(points))
}

#[derive(Serialize, Deserialize)]
struct JsonPoint {
    x: String,
    y: String,
}

fn bit_string(a: &TreeAddress) -> String {
    a.bits().map(|b| if b { '1' } else { '0' }).collect()
}

/// Pretty-printed JSON array of `{"x": "<bits>", "y": "<bits>"}`.
pub fn to_json(table: &EmbeddingTable) -> String {
    let rows: Vec<JsonPoint> =
        table.points().iter().map(|p| JsonPoint { x: bit_string(p.x()), y: bit_string(p.y()) }).collect();
    serde_json::to_string_pretty(&rows).expect("plain strings serialize")
}

pub fn from_json(text: &str) -> Result<EmbeddingTable, CodecError> {
    let rows: Vec<JsonPoint> = serde_json::from_str(text).map_err(|e| CodecError::Json(e.to_string()))?;
    let parse = |s: &str, v: usize| {
        if s.chars().any(|c| c != '0' && c != '1') {
            return Err(CodecError::Json(format!("vertex {v}: {s:?} is not a bit string")));
        }
        Ok(TreeAddress::from_bits(s.chars().map(|c| c == '1')))
    };
    let mut points = Vec::with_capacity(rows.len());
    for (v, row) in rows.iter().enumerate() {
        let (x, y) = (parse(&row.x, v)?, parse(&row.y, v)?);
        if x.len() > y.len() {
            return Err(CodecError::LengthViolation { vertex: v, len_x: x.len(), len_y: y.len() });
        }
        let point = DyadicPoint::new(x, y)
            .ok_or_else(|| CodecError::Json(format!("vertex {v}: x is not a prefix of y")))?;
        points.push(point);
    }
    Ok(EmbeddingTable::new(points))
}

/// Binary when the stream starts with the magic bytes, JSON otherwise.
pub fn decode_any(bytes: &[u8]) -> Result<EmbeddingTable, CodecError> {
    if bytes.starts_with(MAGIC) {
        return decode(bytes);
    }
    let text = std::str::from_utf8(bytes).map_err(|_| CodecError::BadMagic)?;
    if text.trim_start().starts_with('[') {
        from_json(text)
    } else {
        Err(CodecError::BadMagic)
    }
}
