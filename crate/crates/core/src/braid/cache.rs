//! On-disk cache of braid homology, one text file per key.
//!
//! ```text
//! polystab-braid-cache 1
//! key k=3 coeff=sign ring=z
//! 0 0 2
//! 1 0 3
//! checksum <sha256 of every preceding line>
//! ```
//!
//! Each body line is `degree free_rank torsion…`. File names are a digest of
//! the key line. Writes go to a temporary file in the same directory and are
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use super::BraidHomologyKey;
use crate::error::Result;
use crate::exactalg::{AbelianGroup, GradedAbelianGroup};

pub const CACHE_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "polystab-braid-cache";
const EXTENSION: &str = "phc";

#[derive(Debug, Clone)]
pub struct HomologyCache {
    dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
}

impl HomologyCache {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(HomologyCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &BraidHomologyKey) -> PathBuf {
        let digest = Sha256::digest(key.canonical().as_bytes());
        self.dir.join(format!("{}.{EXTENSION}", &hex::encode(digest)[..16]))
    }

    /// Returns `None` on a miss. Corrupted entries are deleted with a warning;
    /// entries written by another format version are ignored.
    pub fn get(&self, key: &BraidHomologyKey) -> Option<GradedAbelianGroup> {
        let path = self.path_for(key);
        let text = fs::read_to_string(&path).ok()?;
        match decode(&text, key) {
            Decoded::Hit(h) => Some(h),
            Decoded::OtherVersion => None,
            Decoded::Corrupt(why) => {
                log::warn!("discarding corrupted cache entry {}: {why}", path.display());
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    pub fn put(&self, key: &BraidHomologyKey, value: &GradedAbelianGroup) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(encode(key, value).as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }

    fn entries(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == EXTENSION) {
                out.push(path);
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> Result<CacheStats> {
        let mut stats = CacheStats::default();
        for path in self.entries()? {
            stats.entries += 1;
            stats.bytes += fs::metadata(&path)?.len();
        }
        Ok(stats)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for path in &entries {
            fs::remove_file(path)?;
        }
        Ok(entries.len())
    }
}

fn encode(key: &BraidHomologyKey, value: &GradedAbelianGroup) -> String {
    let mut body = format!("{MAGIC} {CACHE_FORMAT_VERSION}\nkey {}\n", key.canonical());
    for (degree, group) in value.iter() {
        body.push_str(&format!("{degree} {}", group.free_rank));
        for t in &group.torsion {
            body.push_str(&format!(" {t}"));
        }
        body.push('\n');
    }
    let sum = hex::encode(Sha256::digest(body.as_bytes()));
    body.push_str(&format!("checksum {sum}\n"));
    body
}

enum Decoded {
    Hit(GradedAbelianGroup),
    OtherVersion,
    Corrupt(String),
}

fn decode(text: &str, key: &BraidHomologyKey) -> Decoded {
    let mut lines = text.lines();
    match lines.next().and_then(|l| l.strip_prefix(MAGIC)).map(str::trim) {
        Some(v) if v == CACHE_FORMAT_VERSION.to_string() => {}
        Some(_) => return Decoded::OtherVersion,
        None => return Decoded::Corrupt("missing header".into()),
    }
    let Some(pos) = text.rfind("checksum ") else {
        return Decoded::Corrupt("missing checksum".into());
    };
    let (body, tail) = text.split_at(pos);
    if tail.trim_end() != format!("checksum {}", hex::encode(Sha256::digest(body.as_bytes()))) {
        return Decoded::Corrupt("checksum mismatch".into());
    }
    let expected_key = format!("key {}", key.canonical());
    if lines.next() != Some(expected_key.as_str()) {
        return Decoded::Corrupt("key mismatch".into());
    }
    let mut out = GradedAbelianGroup::new();
    for line in body.lines().skip(2) {
        let mut fields = line.split_whitespace();
        let degree = fields.next().and_then(|f| f.parse::<i64>().ok());
        let free = fields.next().and_then(|f| f.parse::<usize>().ok());
        let torsion: Option<Vec<BigUint>> = fields.map(|f| f.parse().ok()).collect();
        match (degree, free, torsion) {
            (Some(d), Some(free_rank), Some(torsion)) => out.set(d, AbelianGroup { free_rank, torsion }),
            _ => return Decoded::Corrupt(format!("bad line `{line}`")),
        }
    }
    Decoded::Hit(out)
}
