//! Binary cache of the two-qubit enumeration.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic    4 bytes  "CLFT"
//! version  u32
//! length   u64      payload byte count
//! payload  count:u32, then per element: key:u32, word_len:u8, word codes (u8 each)
//! sha256   32 bytes over the payload
//! ```
//!
//! Words use codes H1=0, H2=1, S1=2, S2=3, CZ=4. On load every word is
//! replayed and checked against its stored key, so a stale or corrupted file
//! can never produce wrong tables; [`load_or_build`] regenerates on any
//! mismatch.

use super::{assemble, build_tables, gen2_code, gen2_from_code, key2, replay_word2, CliffordTables, C2_ORDER};
use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const CACHE_MAGIC: &[u8; 4] = b"CLFT";
pub const CACHE_VERSION: u32 = 1;

fn cache_err(msg: impl Into<String>) -> Error {
    Error::Cache(msg.into())
}

pub fn save_tables(t: &CliffordTables, path: &Path) -> Result<()> {
    let mut payload = Vec::with_capacity(t.two.len() * 16);
    payload.extend_from_slice(&(t.two.len() as u32).to_le_bytes());
    for e in &t.two {
        payload.extend_from_slice(&(key2(&e.action) as u32).to_le_bytes());
        payload.push(e.word.len() as u8);
        payload.extend(e.word.iter().map(|g| gen2_code(*g)));
    }
    let mut out = Vec::with_capacity(payload.len() + 48);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    std::fs::write(path, out).map_err(|e| cache_err(e.to_string()))
}

pub fn load_tables(path: &Path) -> Result<CliffordTables> {
    let bytes = std::fs::read(path).map_err(|e| cache_err(e.to_string()))?;
    if bytes.len() < 16 + 32 || &bytes[..4] != CACHE_MAGIC {
        return Err(cache_err("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(cache_err(format!("version {version}, expected {CACHE_VERSION}")));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if bytes.len() != 16 + len + 32 {
        return Err(cache_err("truncated file"));
    }
    let payload = &bytes[16..16 + len];
    if Sha256::digest(payload).as_slice() != &bytes[16 + len..] {
        return Err(cache_err("checksum mismatch"));
    }

    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = payload.get(pos..pos + n).ok_or_else(|| cache_err("payload overrun"))?;
        pos += n;
        Ok(s)
    };
    let count = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    if count != C2_ORDER {
        return Err(cache_err(format!("{count} elements, expected {C2_ORDER}")));
    }
    let mut words = Vec::with_capacity(count);
    for _ in 0..count {
        let key = u32::from_le_bytes(take(4)?.try_into().unwrap()) as u64;
        let n = take(1)?[0] as usize;
        let word = take(n)?
            .iter()
            .map(|&c| gen2_from_code(c).ok_or_else(|| cache_err("bad generator code")))
            .collect::<Result<Vec<_>>>()?;
        let action = replay_word2(&word)?;
        if key2(&action) != key {
            return Err(cache_err("stored word does not reproduce its element"));
        }
        words.push((action, word));
    }
    assemble(words)
}

/// Loads the cache at `path`, rebuilding and rewriting it if it is missing or invalid.
pub fn load_or_build(path: &Path) -> Result<CliffordTables> {
    match load_tables(path) {
        Ok(t) => Ok(t),
        Err(_) => {
            let t = build_tables()?;
            save_tables(&t, path)?;
            Ok(t)
        }
    }
}
