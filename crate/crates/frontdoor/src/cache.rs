//! Precomputed global theme layers, persisted next to the index.
//!
//! Each cached layer records the hash of the configuration and graph it
//! was built from; a cache built under a different hash is ignored on
//! load. A cached layer answers any extent by filtering its features and
//! rescaling radii, which gives the same result as computing the layer
//! for that extent directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use eesd_core::codec::write_atomic;
use eesd_core::layers::{theme_layer, EesdSet, Extent, LayerError};
use eesd_core::wag::store::encode_wag;
use eesd_core::Engine;
use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::ThemeCatalog;

pub const CACHE_DIR: &str = "themes";
pub const CACHE_INDEX: &str = "index.json";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad cache file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CacheError + '_ {
    move |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of everything a layer depends on: engine settings and the graph.
pub fn config_hash(engine: &Engine) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(engine.config()).expect("config serializes"));
    h.update(encode_wag(engine.wag()));
    hex(&h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedTheme {
    pub theme: String,
    pub config_hash: String,
    /// Seconds since the Unix epoch.
    pub built_at: u64,
    pub layer: EesdSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CacheIndex {
    config_hash: String,
    built_at: u64,
    /// theme title → file name inside the cache directory.
    files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrecomputeReport {
    pub cached: Vec<String>,
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ThemeCache {
    config_hash: String,
    entries: BTreeMap<String, CachedTheme>,
}

impl ThemeCache {
    pub fn empty(engine: &Engine) -> Self {
        ThemeCache {
            config_hash: config_hash(engine),
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, theme: &str) -> Option<&CachedTheme> {
        self.entries.get(theme)
    }

    pub fn themes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Theme layer for `extent`, from the cache when the theme is cached.
    pub fn theme_layer(&self, engine: &Engine, theme: &str, extent: &Extent) -> Result<EesdSet, LayerError> {
        match self.entries.get(theme) {
            Some(hit) => Ok(hit.layer.restrict(engine.corpus(), extent, &engine.config().symbols)),
            None => theme_layer(engine, theme, extent),
        }
    }

    /// Writes the cache under `index_dir/themes`. Layer files are written
    /// first and the index last, each atomically.
    pub fn save(&self, index_dir: &Path) -> Result<(), CacheError> {
        let dir = index_dir.join(CACHE_DIR);
        std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        let mut files = BTreeMap::new();
        let mut built_at = 0;
        for (theme, entry) in &self.entries {
            let name = format!("{}.json", &hex(&Sha256::digest(theme.as_bytes()))[..16]);
            let path = dir.join(&name);
            let bytes = serde_json::to_vec(entry).expect("cache entries serialize");
            write_atomic(&path, &bytes).map_err(io(&path))?;
            files.insert(theme.clone(), name);
            built_at = built_at.max(entry.built_at);
        }
        let index = CacheIndex {
            config_hash: self.config_hash.clone(),
            built_at,
            files,
        };
        let path = dir.join(CACHE_INDEX);
        let bytes = serde_json::to_vec_pretty(&index).expect("cache index serializes");
        write_atomic(&path, &bytes).map_err(io(&path))
    }

    /// Loads the cache saved under `index_dir`. A missing cache, or one
    /// built under another configuration, loads as empty with a warning.
    pub fn load(index_dir: &Path, engine: &Engine) -> Result<Self, CacheError> {
        let mut cache = ThemeCache::empty(engine);
        let dir = index_dir.join(CACHE_DIR);
        let index_path = dir.join(CACHE_INDEX);
        if !index_path.exists() {
            return Ok(cache);
        }
        let bytes = std::fs::read(&index_path).map_err(io(&index_path))?;
        let index: CacheIndex = serde_json::from_slice(&bytes).map_err(|e| CacheError::Format {
            path: index_path.clone(),
            message: e.to_string(),
        })?;
        if index.config_hash != cache.config_hash {
            warn!("ignoring theme cache built under a different configuration");
            return Ok(cache);
        }
        for (theme, name) in index.files {
            let path = dir.join(&name);
            let bytes = std::fs::read(&path).map_err(io(&path))?;
            let entry: CachedTheme = serde_json::from_slice(&bytes).map_err(|e| CacheError::Format {
                path: path.clone(),
                message: e.to_string(),
            })?;
            if entry.theme != theme || entry.config_hash != cache.config_hash || entry.layer.extent != Extent::GLOBAL {
                return Err(CacheError::Format {
                    path,
                    message: format!("entry does not match index entry for {theme:?}"),
                });
            }
            cache.entries.insert(theme, entry);
        }
        Ok(cache)
    }
}

/// Computes the global layer of every catalog theme. Titles that are not
/// graph vertices are skipped and reported.
pub fn precompute_themes(engine: &Engine, catalog: &ThemeCatalog) -> (ThemeCache, PrecomputeReport) {
    let mut cache = ThemeCache::empty(engine);
    let mut report = PrecomputeReport::default();
    let built_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    for title in catalog.titles() {
        match theme_layer(engine, title, &Extent::GLOBAL) {
            Ok(layer) => {
                cache.entries.insert(
                    title.to_string(),
                    CachedTheme {
                        theme: title.to_string(),
                        config_hash: cache.config_hash.clone(),
                        built_at,
                        layer,
                    },
                );
                report.cached.push(title.to_string());
            }
            Err(e) => {
                warn!("skipping theme {title:?}: {e}");
                report.skipped.push(title.to_string());
            }
        }
    }
    (cache, report)
}
