//! Point-to-point narratives between two geotagged articles.
//!
//! The narrative route is the strongest simple path from `start` to `end`
//! whose interior vertices are all non-spatial articles, found by a
//! layered search over at most [`MAX_NARRATIVE_HOPS`] edges. Path strength
//! is the same σ as in relatedness. The narrative itself is a sequence of
//! snippets read off the route: first the bridging snippets that hold the
//! route's links, then further snippets of interior articles taken in
//! turn.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ArticleKind, CorpusIndex};
use crate::explosr::path_strength;
use crate::wag::{VertexId, Wag};

pub const MAX_NARRATIVE_HOPS: usize = 6;
pub const MAX_SNIPPET_COUNT: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NarrativeError {
    #[error("article {0:?} is not a graph vertex")]
    NotFound(String),
    #[error("article {0:?} is not geotagged")]
    NotSpatial(String),
    #[error("narrative endpoints must differ")]
    SameEndpoints,
    #[error("snippet count must be between 1 and {MAX_SNIPPET_COUNT}, got {0}")]
    InvalidSnippetCount(usize),
    #[error("invalid narrative config: {0}")]
    InvalidConfig(String),
    #[error("no narrative route from {start:?} to {end:?}")]
    NoNarrative { start: String, end: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarrativeConfig {
    /// Longest route considered, in edges.
    pub max_hops: usize,
    /// Per-hop decay λ, as in relatedness.
    pub length_decay: f64,
}

impl Default for NarrativeConfig {
    fn default() -> Self {
        NarrativeConfig {
            max_hops: MAX_NARRATIVE_HOPS,
            length_decay: 0.5,
        }
    }
}

impl NarrativeConfig {
    fn validate(&self) -> Result<(), NarrativeError> {
        if !(2..=MAX_NARRATIVE_HOPS).contains(&self.max_hops) {
            return Err(NarrativeError::InvalidConfig(format!(
                "max_hops must be between 2 and {MAX_NARRATIVE_HOPS}"
            )));
        }
        if !(self.length_decay > 0.0 && self.length_decay <= 1.0) {
            return Err(NarrativeError::InvalidConfig("length_decay must be in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrativeRequest {
    pub start: String,
    pub end: String,
    pub snippet_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrativeStep {
    pub article: String,
    pub heading_path: Vec<String>,
    pub snippet: String,
    pub ordinal: u32,
    /// Next route vertex when this snippet holds the route's link to it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Narrative {
    pub start: String,
    pub end: String,
    pub path: Vec<String>,
    pub strength: f64,
    pub steps: Vec<NarrativeStep>,
}

#[derive(Debug, Clone)]
struct Partial {
    strength: f64,
    path: Vec<VertexId>,
}

impl Partial {
    fn beats(&self, other: &Partial) -> bool {
        self.strength > other.strength || (self.strength == other.strength && self.path < other.path)
    }
}

fn endpoint(wag: &Wag, title: &str) -> Result<VertexId, NarrativeError> {
    let v = wag
        .id(title)
        .ok_or_else(|| NarrativeError::NotFound(title.to_string()))?;
    if wag.kind(v) != ArticleKind::Spatial {
        return Err(NarrativeError::NotSpatial(title.to_string()));
    }
    Ok(v)
}

/// Strongest route from `start` to `end` with at least one interior
/// vertex, all of them non-spatial. Returns the titles and σ.
pub fn optimal_path(
    wag: &Wag,
    start: &str,
    end: &str,
    config: &NarrativeConfig,
) -> Result<(Vec<String>, f64), NarrativeError> {
    config.validate()?;
    let a = endpoint(wag, start)?;
    let b = endpoint(wag, end)?;
    if a == b {
        return Err(NarrativeError::SameEndpoints);
    }
    let no_route = || NarrativeError::NoNarrative {
        start: start.to_string(),
        end: end.to_string(),
    };

    // layer[v] = best route of exactly h edges from a to interior vertex v.
    let mut layer: BTreeMap<VertexId, Partial> = BTreeMap::new();
    for e in wag.out(a) {
        if wag.kind(e.target) == ArticleKind::NonSpatial {
            layer.insert(
                e.target,
                Partial {
                    strength: path_strength([e.weight], config.length_decay),
                    path: vec![a, e.target],
                },
            );
        }
    }
    let mut best: Option<Partial> = None;
    for h in 2..=config.max_hops {
        let mut next: BTreeMap<VertexId, Partial> = BTreeMap::new();
        for p in layer.values() {
            let u = *p.path.last().expect("route has vertices");
            for e in wag.out(u) {
                let t = e.target;
                if t != b && (h == config.max_hops || wag.kind(t) != ArticleKind::NonSpatial) {
                    continue;
                }
                if p.path.contains(&t) {
                    continue;
                }
                let mut path = p.path.clone();
                path.push(t);
                let cand = Partial {
                    strength: p.strength * config.length_decay * e.weight,
                    path,
                };
                if t == b {
                    if best.as_ref().is_none_or(|cur| cand.beats(cur)) {
                        best = Some(cand);
                    }
                } else if next.get(&t).is_none_or(|cur| cand.beats(cur)) {
                    next.insert(t, cand);
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    let best = best.ok_or_else(no_route)?;
    // Recompute through the canonical function so σ matches relatedness.
    let weights: Vec<f64> = best
        .path
        .windows(2)
        .map(|hop| wag.edge(hop[0], hop[1]).expect("route hop").weight)
        .collect();
    let strength = path_strength(weights, config.length_decay);
    let titles = best.path.iter().map(|&v| wag.title(v).to_string()).collect();
    Ok((titles, strength))
}

/// Indices of `s` evenly spaced picks out of `m` items, `s <= m`.
fn evenly_spaced(m: usize, s: usize) -> Vec<usize> {
    if s == 1 {
        return vec![0];
    }
    (0..s)
        .map(|i| ((i * (m - 1)) as f64 / (s - 1) as f64).round() as usize)
        .collect()
}

pub fn generate_narrative(
    wag: &Wag,
    corpus: &CorpusIndex,
    request: &NarrativeRequest,
    config: &NarrativeConfig,
) -> Result<Narrative, NarrativeError> {
    if !(1..=MAX_SNIPPET_COUNT).contains(&request.snippet_count) {
        return Err(NarrativeError::InvalidSnippetCount(request.snippet_count));
    }
    let (path, strength) = optimal_path(wag, &request.start, &request.end, config)?;

    // Interior i (path position 1..=m) bridges to path[i + 1].
    let m = path.len() - 2;
    let bridge_of = |i: usize| -> (usize, u32, Option<String>) {
        let edge = wag
            .edge(
                wag.id(&path[i]).expect("route vertex"),
                wag.id(&path[i + 1]).expect("route vertex"),
            )
            .expect("route hop");
        (i, edge.snippet_ordinal, Some(path[i + 1].clone()))
    };

    let mut chosen: Vec<(usize, u32, Option<String>)> = if request.snippet_count <= m {
        evenly_spaced(m, request.snippet_count)
            .into_iter()
            .map(|k| bridge_of(k + 1))
            .collect()
    } else {
        let mut chosen: Vec<_> = (1..=m).map(bridge_of).collect();
        let mut cursors = vec![0usize; m + 1];
        let mut wanted = request.snippet_count - m;
        while wanted > 0 {
            let mut progressed = false;
            for i in 1..=m {
                if wanted == 0 {
                    break;
                }
                let article = corpus.get(&path[i]).expect("route vertices are articles");
                let bridge_ordinal = chosen[i - 1].1;
                while let Some(snippet) = article.snippets.get(cursors[i]) {
                    cursors[i] += 1;
                    if snippet.ordinal != bridge_ordinal {
                        chosen.push((i, snippet.ordinal, None));
                        wanted -= 1;
                        progressed = true;
                        break;
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        chosen
    };
    chosen.sort_by_key(|c| (c.0, c.1));
    let steps = chosen
        .into_iter()
        .map(|(i, ordinal, bridge_to)| {
            let article = corpus.get(&path[i]).expect("route vertices are articles");
            let snippet = &article.snippets[ordinal as usize];
            NarrativeStep {
                article: article.title.clone(),
                heading_path: snippet.heading_path.clone(),
                snippet: snippet.text.clone(),
                ordinal,
                bridge_to,
            }
        })
        .collect();
    Ok(Narrative {
        start: request.start.clone(),
        end: request.end.clone(),
        path,
        strength,
        steps,
    })
}

/// The narrative of the same pair read the other way: a fresh search from
/// `end` to `start`, since links are directed.
pub fn reverse_narrative(
    wag: &Wag,
    corpus: &CorpusIndex,
    request: &NarrativeRequest,
    config: &NarrativeConfig,
) -> Result<Narrative, NarrativeError> {
    let swapped = NarrativeRequest {
        start: request.end.clone(),
        end: request.start.clone(),
        snippet_count: request.snippet_count,
    };
    generate_narrative(wag, corpus, &swapped, config)
}
