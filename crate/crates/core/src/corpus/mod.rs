//! Corpus ingestion: MediaWiki export in, normalized article index out.
//!
//! The pipeline runs in this order:
//!
//! 1. [`parse_export`] streams `<page>` elements out of the XML export,
//!    keeping namespace-0 pages only.
//! 2. [`strip_markup`] turns each page's wikitext into clean prose while
//!    recording where every prose wikilink landed.
//! 3. [`segment_snippets`] cuts the clean text into paragraphs tagged with
//!    their heading path.
//! 4. [`extract_geotag`] and [`classify_temporal`] decide the article kind.
//! 5. [`resolve_redirects`] and [`build_corpus`] tie everything into a
//!    [`CorpusIndex`].

mod build;
mod geotag;
mod markup;
mod redirects;
mod snippets;
pub mod store;
mod temporal;
mod xml;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use build::{build_corpus, build_corpus_with, BuildOptions};
pub use geotag::{extract_geotag, GeotagError};
pub use markup::{strip_markup, HeadingMarker, Stripped};
pub use redirects::{resolve_redirects, RedirectResolution, MAX_REDIRECT_DEPTH};
pub use snippets::{segment_snippets, MAX_HEADING_DEPTH};
pub use temporal::{classify_temporal, LocaleProfile, TemporalMatcher};
pub use xml::{parse_export, ExportReader, ParseError};

/// Normalizes a page title or link target the way MediaWiki does for
/// first-letter-case namespaces: underscores become spaces, runs of
/// whitespace collapse, and the first character is upper-cased.
pub fn canonical_title(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars() {
        if c == '_' || c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        if out.is_empty() {
            out.extend(c.to_uppercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// One namespace-0 page as it appears in the export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub title: String,
    pub page_id: u64,
    pub wikitext: String,
    pub redirect_target: Option<String>,
}

impl RawPage {
    pub fn is_redirect(&self) -> bool {
        self.redirect_target.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkOccurrence {
    pub target_title: String,
    pub anchor_text: String,
    /// Offset in characters (Unicode scalar values) into the clean text.
    pub char_offset: u32,
    pub position_fraction: f64,
    /// Set once the target has been looked up after redirect resolution
    /// and names no article in the corpus.
    pub dangling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    pub article_title: String,
    pub ordinal: u32,
    pub heading_path: Vec<String>,
    pub text: String,
    /// `[start, end)` in characters of the clean text.
    pub span: (u32, u32),
}

impl Snippet {
    pub fn contains_offset(&self, char_offset: u32) -> bool {
        self.span.0 <= char_offset && char_offset < self.span.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub lat: f64,
    pub lon: f64,
}

impl Coordinate {
    /// Returns `None` unless both components are finite and in range.
    pub fn new(lat: f64, lon: f64) -> Option<Self> {
        let ok = lat.is_finite() && lon.is_finite() && (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon);
        ok.then_some(Coordinate { lat, lon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArticleKind {
    Spatial,
    NonSpatial,
    Temporal,
}

impl ArticleKind {
    pub fn as_byte(self) -> u8 {
        match self {
            ArticleKind::Spatial => 0,
            ArticleKind::NonSpatial => 1,
            ArticleKind::Temporal => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(ArticleKind::Spatial),
            1 => Some(ArticleKind::NonSpatial),
            2 => Some(ArticleKind::Temporal),
            _ => None,
        }
    }
}

impl fmt::Display for ArticleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArticleKind::Spatial => "spatial",
            ArticleKind::NonSpatial => "nonspatial",
            ArticleKind::Temporal => "temporal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub kind: ArticleKind,
    pub coordinate: Option<Coordinate>,
    /// Length of the clean text in characters.
    pub text_len: u32,
    pub snippets: Vec<Snippet>,
    pub links: Vec<LinkOccurrence>,
}

impl Article {
    /// The snippet whose span contains `char_offset`, if any.
    pub fn snippet_at(&self, char_offset: u32) -> Option<&Snippet> {
        let idx = self.snippets.partition_point(|s| s.span.1 <= char_offset);
        self.snippets.get(idx).filter(|s| s.contains_offset(char_offset))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub spatial: u64,
    pub nonspatial: u64,
    pub temporal: u64,
    pub redirects: u64,
}

impl KindCounts {
    pub fn articles(&self) -> u64 {
        self.spatial + self.nonspatial + self.temporal
    }

    fn bump(&mut self, kind: ArticleKind) {
        match kind {
            ArticleKind::Spatial => self.spatial += 1,
            ArticleKind::NonSpatial => self.nonspatial += 1,
            ArticleKind::Temporal => self.temporal += 1,
        }
    }
}

/// Something odd but recoverable seen during ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    UnbalancedMarkup { title: String, count: u32 },
    BadGeotag { title: String, reason: String },
    RedirectCycle { alias: String },
    RedirectTooDeep { alias: String },
    DuplicateTitle { title: String },
    RedirectShadowsArticle { alias: String },
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestWarning::UnbalancedMarkup { title, count } => {
                write!(f, "{title}: {count} unbalanced markup construct(s) dropped")
            }
            IngestWarning::BadGeotag { title, reason } => {
                write!(f, "{title}: ignoring geotag ({reason})")
            }
            IngestWarning::RedirectCycle { alias } => {
                write!(f, "redirect cycle through {alias:?}, alias dropped")
            }
            IngestWarning::RedirectTooDeep { alias } => {
                write!(f, "redirect chain from {alias:?} too deep, alias dropped")
            }
            IngestWarning::DuplicateTitle { title } => {
                write!(f, "duplicate title {title:?}, last page wins")
            }
            IngestWarning::RedirectShadowsArticle { alias } => {
                write!(f, "redirect {alias:?} has the same title as an article, dropped")
            }
        }
    }
}

/// The normalized corpus. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusIndex {
    pub articles: BTreeMap<String, Article>,
    pub redirects: BTreeMap<String, String>,
    pub counts: KindCounts,
    pub language: String,
}

impl CorpusIndex {
    pub fn get(&self, title: &str) -> Option<&Article> {
        self.articles.get(title)
    }

    /// Looks a title up directly or through a redirect alias.
    pub fn resolve(&self, title: &str) -> Option<&Article> {
        let canonical = canonical_title(title);
        self.articles.get(&canonical).or_else(|| {
            self.redirects
                .get(&canonical)
                .and_then(|target| self.articles.get(target))
        })
    }

    pub fn spatial_articles(&self) -> impl Iterator<Item = &Article> {
        self.articles.values().filter(|a| a.kind == ArticleKind::Spatial)
    }
}
