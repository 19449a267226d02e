//! `wag.idx`: vertex table plus CSR out-adjacency. In-edges are rebuilt on
//! load. Layout in `docs/index-format.md`.

use std::path::Path;

use super::{EdgeRecord, Wag};
use crate::codec::{write_atomic, DecodeError, Decoder, Encoder};
use crate::corpus::store::StoreError;
use crate::corpus::ArticleKind;

pub const WAG_MAGIC: &[u8; 8] = b"EESDWAG\0";
pub const WAG_VERSION: u32 = 1;
pub const WAG_FILE: &str = "wag.idx";

pub fn encode_wag(wag: &Wag) -> Vec<u8> {
    let mut e = Encoder::default();
    e.bytes(WAG_MAGIC);
    e.u32(WAG_VERSION);
    e.u32(wag.vertex_count() as u32);
    e.u32(wag.edge_count() as u32);
    for (title, kind) in wag.titles().iter().zip(wag.kinds()) {
        e.str(title);
        e.u8(kind.as_byte());
    }
    for offset in wag.out_offsets() {
        e.u32(*offset);
    }
    for edge in wag.out_edges() {
        e.u32(edge.target);
        e.f64(edge.weight);
        e.f64(edge.position_fraction);
        e.u32(edge.snippet_ordinal);
    }
    e.buf
}

pub fn decode_wag(bytes: &[u8]) -> Result<Wag, DecodeError> {
    let mut d = Decoder::new(bytes);
    d.magic(WAG_MAGIC, "wag.idx")?;
    d.version(WAG_VERSION)?;
    let n = d.count(5)?;
    let m = d.u32()? as usize;
    let mut titles = Vec::with_capacity(n);
    let mut kinds = Vec::with_capacity(n);
    for _ in 0..n {
        titles.push(d.str()?.to_string());
        let kind = ArticleKind::from_byte(d.u8()?).ok_or_else(|| d.invalid("unknown kind byte"))?;
        kinds.push(kind);
    }
    if m.saturating_mul(24) > d.remaining() {
        return Err(DecodeError::Truncated(d.pos()));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(d.u32()? as usize);
    }
    if offsets[0] != 0 || offsets[n] != m || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(d.invalid("adjacency offsets must rise from 0 to the edge count"));
    }
    let mut adjacency = vec![Vec::new(); n];
    for (source, list) in adjacency.iter_mut().enumerate() {
        for _ in offsets[source]..offsets[source + 1] {
            let target = d.u32()?;
            if target as usize >= n {
                return Err(d.invalid("edge target out of range"));
            }
            if list.last().is_some_and(|prev: &EdgeRecord| prev.target >= target) {
                return Err(d.invalid("edge targets must be strictly ascending per source"));
            }
            list.push(EdgeRecord {
                target,
                weight: d.f64()?,
                position_fraction: d.f64()?,
                snippet_ordinal: d.u32()?,
            });
        }
    }
    let at = d.pos();
    d.finish()?;
    Wag::from_adjacency(titles, kinds, adjacency).map_err(|e| DecodeError::Invalid {
        offset: at,
        message: e.to_string(),
    })
}

pub fn write_wag(dir: &Path, wag: &Wag) -> Result<(), StoreError> {
    let path = dir.join(WAG_FILE);
    write_atomic(&path, &encode_wag(wag)).map_err(|e| StoreError::io(&path, e))
}

pub fn read_wag(dir: &Path) -> Result<Wag, StoreError> {
    let path = dir.join(WAG_FILE);
    let bytes = std::fs::read(&path).map_err(|e| StoreError::io(&path, e))?;
    decode_wag(&bytes).map_err(|source| StoreError::Decode { file: WAG_FILE, source })
}
