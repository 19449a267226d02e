//! Theme catalogs: the list of theme articles precomputed for the globe.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub const DEFAULT_CATALOG: &str = include_str!("../themes/default.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThemeSource {
    Prototype,
    Editorial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThemeEntry {
    pub title: String,
    pub source: ThemeSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThemeCatalog {
    pub themes: Vec<ThemeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for CatalogError {}

impl ThemeCatalog {
    pub fn default_catalog() -> Self {
        DEFAULT_CATALOG.parse().expect("bundled catalog parses")
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.themes.iter().map(|t| t.title.as_str())
    }
}

/// One title per line. `#` starts a comment line; an optional `[prototype]`
/// or `[editorial]` tag marks the entry's origin (untagged means
/// editorial). Repeated titles keep their first position.
impl FromStr for ThemeCatalog {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut themes: Vec<ThemeEntry> = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, rest) = if let Some(rest) = line.strip_prefix('[') {
                let Some((tag, rest)) = rest.split_once(']') else {
                    return Err(CatalogError {
                        line: i + 1,
                        message: "unclosed tag".into(),
                    });
                };
                let source = match tag.trim() {
                    "prototype" => ThemeSource::Prototype,
                    "editorial" => ThemeSource::Editorial,
                    other => {
                        return Err(CatalogError {
                            line: i + 1,
                            message: format!("unknown tag [{other}]"),
                        })
                    }
                };
                (source, rest)
            } else {
                (ThemeSource::Editorial, line)
            };
            let title = eesd_core::corpus::canonical_title(rest);
            if title.is_empty() {
                return Err(CatalogError {
                    line: i + 1,
                    message: "missing title".into(),
                });
            }
            if !themes.iter().any(|t| t.title == title) {
                themes.push(ThemeEntry { title, source });
            }
        }
        Ok(ThemeCatalog { themes })
    }
}
