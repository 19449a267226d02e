//! The loaded, immutable corpus and graph that all queries run against,
//! plus the ingestion pipeline that produces them.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::store::{read_corpus, write_corpus, StoreError};
use crate::corpus::{build_corpus_with, parse_export, BuildOptions, CorpusIndex, IngestWarning, ParseError};
use crate::explosr::ExploSrConfig;
use crate::layers::SymbolScale;
use crate::minotour::NarrativeConfig;
use crate::wag::store::{read_wag, write_wag, WAG_FILE};
use crate::wag::{build_wag, Wag};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed export: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("index directory is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub explosr: ExploSrConfig,
    pub narrative: NarrativeConfig,
    pub symbols: SymbolScale,
}

#[derive(Debug)]
pub struct Engine {
    corpus: CorpusIndex,
    wag: Wag,
    config: EngineConfig,
}

impl Engine {
    pub fn new(corpus: CorpusIndex, wag: Wag, config: EngineConfig) -> Self {
        Engine { corpus, wag, config }
    }

    /// Builds the graph from an in-memory corpus.
    pub fn from_corpus(corpus: CorpusIndex, config: EngineConfig) -> Self {
        let wag = build_wag(&corpus);
        Engine::new(corpus, wag, config)
    }

    /// Loads an index directory written by [`ingest`].
    pub fn open(dir: &Path, config: EngineConfig) -> Result<Self, EngineError> {
        let corpus = read_corpus(dir)?;
        let wag = read_wag(dir)?;
        let expected = corpus
            .articles
            .values()
            .filter(|a| a.kind != crate::corpus::ArticleKind::Temporal)
            .count();
        if expected != wag.vertex_count() {
            return Err(EngineError::Inconsistent(format!(
                "{} graph vertices for {expected} non-temporal articles",
                wag.vertex_count()
            )));
        }
        for v in wag.vertices() {
            let ok = corpus.get(wag.title(v)).is_some_and(|a| {
                a.kind == wag.kind(v)
                    && wag
                        .out(v)
                        .iter()
                        .all(|e| (e.snippet_ordinal as usize) < a.snippets.len())
            });
            if !ok {
                return Err(EngineError::Inconsistent(format!(
                    "graph vertex {:?} does not match its article",
                    wag.title(v)
                )));
            }
        }
        Ok(Engine::new(corpus, wag, config))
    }

    pub fn corpus(&self) -> &CorpusIndex {
        &self.corpus
    }

    pub fn wag(&self) -> &Wag {
        &self.wag
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn with_config(mut self, config: EngineConfig) -> Self {
        self.config = config;
        self
    }
}

#[derive(Debug)]
pub struct IngestReport {
    pub corpus: CorpusIndex,
    pub wag: Wag,
    pub warnings: Vec<IngestWarning>,
}

/// Parses an export, builds corpus and graph, and writes both into `out`.
pub fn ingest(dump: &Path, out: &Path, options: &BuildOptions) -> Result<IngestReport, EngineError> {
    let file = File::open(dump).map_err(|source| EngineError::Io {
        path: dump.display().to_string(),
        source,
    })?;
    let pages = parse_export(BufReader::new(file))?;
    let (corpus, warnings) = build_corpus_with(pages, options);
    let wag = build_wag(&corpus);
    write_corpus(out, &corpus, &[WAG_FILE])?;
    write_wag(out, &wag)?;
    Ok(IngestReport { corpus, wag, warnings })
}
