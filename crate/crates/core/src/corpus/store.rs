//! On-disk corpus index: `manifest.json` plus the binary `articles.idx`.
//! The byte layout is documented in `docs/index-format.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Article, ArticleKind, Coordinate, CorpusIndex, KindCounts, LinkOccurrence, Snippet};
use crate::codec::{write_atomic, DecodeError, Decoder, Encoder};

pub const FORMAT_VERSION: u32 = 1;
pub const ARTICLES_MAGIC: &[u8; 8] = b"EESDART\0";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ARTICLES_FILE: &str = "articles.idx";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("bad {file}: {source}")]
    Decode {
        file: &'static str,
        #[source]
        source: DecodeError,
    },
}

impl StoreError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub language: String,
    pub counts: ManifestCounts,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCounts {
    pub spatial: u64,
    pub nonspatial: u64,
    pub temporal: u64,
    pub redirects: u64,
    pub articles: u64,
}

impl From<KindCounts> for ManifestCounts {
    fn from(c: KindCounts) -> Self {
        ManifestCounts {
            spatial: c.spatial,
            nonspatial: c.nonspatial,
            temporal: c.temporal,
            redirects: c.redirects,
            articles: c.articles(),
        }
    }
}

impl Manifest {
    pub fn for_corpus(corpus: &CorpusIndex, files: &[&str]) -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            language: corpus.language.clone(),
            counts: corpus.counts.into(),
            files: files.iter().map(|f| f.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }

    pub fn read(dir: &Path) -> Result<Self, StoreError> {
        let path = dir.join(MANIFEST_FILE);
        let bytes = std::fs::read(&path).map_err(|e| StoreError::io(&path, e))?;
        let manifest: Manifest = serde_json::from_slice(&bytes).map_err(|e| StoreError::Manifest(e.to_string()))?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(StoreError::Manifest(format!(
                "format_version {} unsupported (expected {FORMAT_VERSION})",
                manifest.format_version
            )));
        }
        Ok(manifest)
    }
}

/// Writes `manifest.json` and `articles.idx` into `dir`, creating it.
pub fn write_corpus(dir: &Path, corpus: &CorpusIndex, extra_files: &[&str]) -> Result<(), StoreError> {
    std::fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
    let articles = dir.join(ARTICLES_FILE);
    write_atomic(&articles, &encode_articles(corpus)).map_err(|e| StoreError::io(&articles, e))?;
    let mut files = vec![ARTICLES_FILE];
    files.extend_from_slice(extra_files);
    let manifest_path = dir.join(MANIFEST_FILE);
    write_atomic(&manifest_path, &Manifest::for_corpus(corpus, &files).to_json())
        .map_err(|e| StoreError::io(&manifest_path, e))
}

pub fn read_corpus(dir: &Path) -> Result<CorpusIndex, StoreError> {
    let manifest = Manifest::read(dir)?;
    let path = dir.join(ARTICLES_FILE);
    let bytes = std::fs::read(&path).map_err(|e| StoreError::io(&path, e))?;
    let mut corpus = decode_articles(&bytes).map_err(|source| StoreError::Decode {
        file: ARTICLES_FILE,
        source,
    })?;
    corpus.language = manifest.language;
    if ManifestCounts::from(corpus.counts) != manifest.counts {
        return Err(StoreError::Manifest("counts disagree with articles.idx".to_string()));
    }
    Ok(corpus)
}

pub fn encode_articles(corpus: &CorpusIndex) -> Vec<u8> {
    let mut e = Encoder::default();
    e.bytes(ARTICLES_MAGIC);
    e.u32(FORMAT_VERSION);
    e.u32(corpus.articles.len() as u32);
    for article in corpus.articles.values() {
        e.str(&article.title);
        e.u8(article.kind.as_byte());
        if let Some(c) = article.coordinate {
            e.u8(1);
            e.f64(c.lat);
            e.f64(c.lon);
        } else {
            e.u8(0);
        }
        e.u32(article.text_len);
        e.u32(article.snippets.len() as u32);
        for s in &article.snippets {
            e.u8(s.heading_path.len() as u8);
            for h in &s.heading_path {
                e.str(h);
            }
            e.u32(s.span.0);
            e.u32(s.span.1);
            e.str(&s.text);
        }
        e.u32(article.links.len() as u32);
        for l in &article.links {
            e.str(&l.target_title);
            e.str(&l.anchor_text);
            e.u32(l.char_offset);
            e.f64(l.position_fraction);
            e.u8(u8::from(l.dangling));
        }
    }
    e.u32(corpus.redirects.len() as u32);
    for (alias, target) in &corpus.redirects {
        e.str(alias);
        e.str(target);
    }
    e.buf
}

/// Decodes `articles.idx`, validating every invariant the rest of the
/// engine relies on. `language` is left empty; it lives in the manifest.
pub fn decode_articles(bytes: &[u8]) -> Result<CorpusIndex, DecodeError> {
    let mut d = Decoder::new(bytes);
    d.magic(ARTICLES_MAGIC, "articles.idx")?;
    d.version(FORMAT_VERSION)?;
    let n = d.count(4 + 1 + 1 + 4 + 4 + 4)?;
    let mut articles = BTreeMap::new();
    let mut counts = KindCounts::default();
    let mut previous: Option<String> = None;
    for _ in 0..n {
        let title = d.str()?.to_string();
        if title.is_empty() || previous.as_deref().is_some_and(|p| p >= title.as_str()) {
            return Err(d.invalid("article titles must be non-empty and strictly ascending"));
        }
        let kind = ArticleKind::from_byte(d.u8()?).ok_or_else(|| d.invalid("unknown kind byte"))?;
        let coordinate = match d.u8()? {
            0 => None,
            1 => {
                let (lat, lon) = (d.f64()?, d.f64()?);
                Some(Coordinate::new(lat, lon).ok_or_else(|| d.invalid("coordinate out of range"))?)
            }
            _ => return Err(d.invalid("bad coordinate flag")),
        };
        if (kind == ArticleKind::Spatial) != coordinate.is_some() {
            return Err(d.invalid("coordinate present iff spatial"));
        }
        let text_len = d.u32()?;

        let snippet_count = d.count(1 + 4 + 4 + 4)?;
        let mut snippets = Vec::with_capacity(snippet_count);
        let mut last_end = 0;
        for ordinal in 0..snippet_count {
            let depth = d.u8()? as usize;
            if depth > super::MAX_HEADING_DEPTH {
                return Err(d.invalid("heading path too deep"));
            }
            let heading_path = (0..depth)
                .map(|_| d.str().map(str::to_string))
                .collect::<Result<Vec<_>, _>>()?;
            let span = (d.u32()?, d.u32()?);
            let text = d.str()?.to_string();
            if span.0 < last_end || span.0 >= span.1 || span.1 > text_len || text.trim().is_empty() {
                return Err(d.invalid("snippet spans must be non-empty, ordered and in bounds"));
            }
            last_end = span.1;
            snippets.push(Snippet {
                article_title: title.clone(),
                ordinal: ordinal as u32,
                heading_path,
                text,
                span,
            });
        }

        let link_count = d.count(4 + 4 + 4 + 8 + 1)?;
        let mut links = Vec::with_capacity(link_count);
        for _ in 0..link_count {
            let target_title = d.str()?.to_string();
            let anchor_text = d.str()?.to_string();
            let char_offset = d.u32()?;
            let position_fraction = d.f64()?;
            let dangling = match d.u8()? {
                0 => false,
                1 => true,
                _ => return Err(d.invalid("bad link flag")),
            };
            if target_title.is_empty()
                || anchor_text.is_empty()
                || char_offset >= text_len
                || !(0.0..1.0).contains(&position_fraction)
            {
                return Err(d.invalid("link occurrence out of bounds"));
            }
            links.push(LinkOccurrence {
                target_title,
                anchor_text,
                char_offset,
                position_fraction,
                dangling,
            });
        }
        counts.bump(kind);
        previous = Some(title.clone());
        articles.insert(
            title.clone(),
            Article {
                title,
                kind,
                coordinate,
                text_len,
                snippets,
                links,
            },
        );
    }

    let redirect_count = d.count(8)?;
    let mut redirects = BTreeMap::new();
    for _ in 0..redirect_count {
        let alias = d.str()?.to_string();
        let target = d.str()?.to_string();
        if alias.is_empty() || target.is_empty() || articles.contains_key(&alias) {
            return Err(d.invalid("redirect alias must be non-empty and not an article"));
        }
        if redirects.insert(alias, target).is_some() {
            return Err(d.invalid("duplicate redirect alias"));
        }
    }
    d.finish()?;
    counts.redirects = redirects.len() as u64;
    Ok(CorpusIndex {
        articles,
        redirects,
        counts,
        language: String::new(),
    })
}
