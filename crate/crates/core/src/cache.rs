//! Content-addressed on-disk store for profile encodings.
//!
//! File layout: magic `CHBPROF\0`, format version (u32 LE), entry count
//! (u64 LE), then each entry as a u32 LE length followed by its bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

const MAGIC: &[u8; 8] = b"CHBPROF\0";
pub const FORMAT_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "CHABAUTY_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct ProfileCache {
    dir: PathBuf,
}

impl ProfileCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ProfileCache { dir: dir.into() }
    }

    /// `$CHABAUTY_CACHE_DIR`, or `.cache` in the working directory.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".cache"));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex SHA-256 of the key parts, separated by newlines.
    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.prof"))
    }

    /// Stored entries, or `None` on a miss. Unreadable or corrupt files count
    /// as misses.
    pub fn lookup(&self, key: &str) -> Option<Vec<Vec<u8>>> {
        let path = self.path(key);
        let bytes = fs::read(&path).ok()?;
        match decode(&bytes) {
            Some(v) => Some(v),
            None => {
                log::warn!("ignoring corrupt cache entry {}", path.display());
                None
            }
        }
    }

    /// Writes atomically through a temporary file in the cache directory.
    pub fn store(&self, key: &str, entries: &[Vec<u8>]) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&encode(entries))?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

fn encode(entries: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for e in entries {
        out.extend_from_slice(&(e.len() as u32).to_le_bytes());
        out.extend_from_slice(e);
    }
    out
}

fn decode(bytes: &[u8]) -> Option<Vec<Vec<u8>>> {
    let rest = bytes.strip_prefix(MAGIC.as_slice())?;
    let version = u32::from_le_bytes(rest.get(..4)?.try_into().ok()?);
    if version != FORMAT_VERSION {
        return None;
    }
    let count = u64::from_le_bytes(rest.get(4..12)?.try_into().ok()?);
    let mut pos = 12;
    let mut out = Vec::new();
    for _ in 0..count {
        let len = u32::from_le_bytes(rest.get(pos..pos + 4)?.try_into().ok()?) as usize;
        pos += 4;
        out.push(rest.get(pos..pos + len)?.to_vec());
        pos += len;
    }
    (pos == rest.len()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ProfileCache::new(dir.path());
        let entries = vec![vec![1, 2, 3], vec![], vec![9; 40]];
        let key = ProfileCache::key(&["a", "b"]);
        assert!(cache.lookup(&key).is_none());
        cache.store(&key, &entries).unwrap();
        assert_eq!(cache.lookup(&key).unwrap(), entries);
        assert!(cache.lookup(&ProfileCache::key(&["a", "c"])).is_none());
    }

    #[test]
    fn version_mismatch_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ProfileCache::new(dir.path());
        let key = ProfileCache::key(&["v"]);
        let mut bytes = encode(&[vec![7]]);
        bytes[8] = 99;
        fs::write(cache.path(&key), bytes).unwrap();
        assert!(cache.lookup(&key).is_none());
        fs::write(cache.path(&key), b"garbage").unwrap();
        assert!(cache.lookup(&key).is_none());
    }
}
