//! Persistent dimension tables: one JSON document keyed by `(k, i, N)` and
//! stamped with the tool version. Entries written by another version are
//! ignored and dropped on the next write.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde::{Deserialize, Serialize};

use pslab_core::characters::BivariateSeries;

use crate::{CliError, VERSION};

/// Bumped when the cached data would change for the same tool version.
const FORMAT: u32 = 1;

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// List cached tables
    Inspect,
    /// Delete the cache file
    Clear,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CacheEntry {
    pub k: u32,
    pub i: u32,
    pub max_weight: u32,
    pub dimension: BivariateSeries,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: String,
    entries: BTreeMap<String, CacheEntry>,
}

pub struct DimensionCache {
    path: PathBuf,
    file: CacheFile,
    stale: usize,
}

fn current_version() -> String {
    format!("{VERSION}+{FORMAT}")
}

fn key(k: u32, i: u32, max_weight: u32) -> String {
    format!("k{k}/i{i}/n{max_weight}")
}

/// `--cache`, then `$PSLAB_CACHE`, then the user cache directory.
pub fn resolve_path(explicit: Option<PathBuf>) -> PathBuf {
    if let Some(p) = explicit {
        return p;
    }
    if let Some(p) = std::env::var_os("PSLAB_CACHE").filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")));
    match base {
        Some(dir) => dir.join("pslab").join("dimensions.json"),
        None => PathBuf::from("pslab-dimensions.json"),
    }
}

impl DimensionCache {
    /// Loads the cache; a missing or unreadable file is an empty cache.
    pub fn open(path: PathBuf) -> Self {
        let empty = || CacheFile {
            version: current_version(),
            entries: BTreeMap::new(),
        };
        let (file, stale) = match std::fs::read_to_string(&path) {
            Err(_) => (empty(), 0),
            Ok(text) => match serde_json::from_str::<CacheFile>(&text) {
                Ok(f) if f.version == current_version() => (f, 0),
                Ok(f) => (empty(), f.entries.len()),
                Err(e) => {
                    eprintln!("pslab: ignoring unreadable cache {}: {e}", path.display());
                    (empty(), 0)
                }
            },
        };
        DimensionCache { path, file, stale }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, k: u32, i: u32, max_weight: u32) -> Option<&BivariateSeries> {
        self.file
            .entries
            .get(&key(k, i, max_weight))
            .filter(|e| (e.k, e.i, e.max_weight) == (k, i, max_weight))
            .filter(|e| e.dimension.order() == max_weight as usize)
            .map(|e| &e.dimension)
    }

    pub fn insert(&mut self, k: u32, i: u32, max_weight: u32, dimension: BivariateSeries) {
        self.file.entries.insert(
            key(k, i, max_weight),
            CacheEntry {
                k,
                i,
                max_weight,
                dimension,
            },
        );
    }

    /// Writes the cache through a temporary file in the same directory.
    pub fn save(&self) -> Result<(), CliError> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
        }
        let text =
            serde_json::to_string(&self.file).map_err(|e| CliError::Internal(e.to_string()))?;
        let tmp = self
            .path
            .with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, text).map_err(|e| CliError::io(tmp.display(), e))?;
        std::fs::rename(&tmp, &self.path).map_err(|e| CliError::io(self.path.display(), e))
    }
}

pub fn run(action: CacheAction, explicit: Option<PathBuf>) -> Result<(), CliError> {
    let path = resolve_path(explicit);
    match action {
        CacheAction::Inspect => {
            let cache = DimensionCache::open(path);
            println!("path: {}", cache.path().display());
            println!("version: {}", current_version());
            println!("entries: {}", cache.file.entries.len());
            if cache.stale > 0 {
                println!("stale entries from another version: {}", cache.stale);
            }
            for e in cache.file.entries.values() {
                println!("k={} i={} max-weight={}", e.k, e.i, e.max_weight);
            }
        }
        CacheAction::Clear => match std::fs::remove_file(&path) {
            Ok(()) => println!("removed {}", path.display()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                println!("no cache at {}", path.display())
            }
            Err(e) => return Err(CliError::io(path.display(), e)),
        },
    }
    Ok(())
}
