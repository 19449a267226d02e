//! The article graph: one vertex per non-temporal article, one weighted
//! edge per distinct prose link.
//!
//! Vertices are numbered in title order and adjacency is stored CSR-style,
//! so neighbor lists come out sorted by the other endpoint's title.

pub mod store;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::corpus::{ArticleKind, CorpusIndex};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WagError {
    #[error("article {0:?} is not a graph vertex")]
    NotFound(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// Weight of a link found at `position_fraction` of its source article,
/// where the source has `source_outdeg` distinct outgoing graph links:
///
/// `w = (1 - position_fraction / 2) / log2(2 + source_outdeg)`
///
/// # Panics
///
/// If `source_outdeg` is zero or `position_fraction` is outside `[0, 1)`;
/// an edge always implies at least one out-link.
pub fn edge_weight(position_fraction: f64, source_outdeg: usize) -> f64 {
    assert!(source_outdeg >= 1, "an edge implies outdeg >= 1");
    assert!(
        (0.0..1.0).contains(&position_fraction),
        "position fraction {position_fraction} outside [0, 1)"
    );
    (1.0 - position_fraction / 2.0) / (2.0 + source_outdeg as f64).log2()
}

/// Upper bound of [`edge_weight`], reached at position 0 with outdeg 1.
pub fn max_edge_weight() -> f64 {
    1.0 / 3f64.log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    /// The other endpoint: target for out-lists, source for in-lists.
    pub target: VertexId,
    pub weight: f64,
    pub position_fraction: f64,
    pub snippet_ordinal: u32,
}

/// An edge with its endpoints spelled out.
#[derive(Debug, Clone, PartialEq)]
pub struct WagEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub position_fraction: f64,
    pub snippet_ordinal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Wag {
    titles: Vec<String>,
    kinds: Vec<ArticleKind>,
    index: HashMap<String, VertexId>,
    out_offsets: Vec<u32>,
    out_edges: Vec<EdgeRecord>,
    in_offsets: Vec<u32>,
    /// Mirrors `out_edges` with `target` holding the source vertex.
    in_edges: Vec<EdgeRecord>,
}

impl Wag {
    /// Assembles a graph from vertices and `(source, target, record)`
    /// triples, validating every graph invariant.
    pub fn from_parts(
        mut vertices: Vec<(String, ArticleKind)>,
        edges: Vec<(String, String, EdgeRecord)>,
    ) -> Result<Self, WagError> {
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, (title, kind)) in vertices.iter().enumerate() {
            if *kind == ArticleKind::Temporal {
                return Err(WagError::Invalid(format!("temporal vertex {title:?}")));
            }
            if index.insert(title.clone(), i as VertexId).is_some() {
                return Err(WagError::Invalid(format!("duplicate vertex {title:?}")));
            }
        }
        let mut adjacency: Vec<Vec<EdgeRecord>> = vec![Vec::new(); vertices.len()];
        for (source, target, record) in edges {
            let s = *index
                .get(&source)
                .ok_or_else(|| WagError::Invalid(format!("unknown source {source:?}")))?;
            let t = *index
                .get(&target)
                .ok_or_else(|| WagError::Invalid(format!("unknown target {target:?}")))?;
            adjacency[s as usize].push(EdgeRecord { target: t, ..record });
        }
        let (titles, kinds) = vertices.into_iter().unzip();
        Self::from_adjacency(titles, kinds, adjacency)
    }

    /// Test and generator convenience: edges given as plain weights.
    pub fn from_weighted_edges(
        vertices: &[(&str, ArticleKind)],
        edges: &[(&str, &str, f64)],
    ) -> Result<Self, WagError> {
        Self::from_parts(
            vertices.iter().map(|(t, k)| (t.to_string(), *k)).collect(),
            edges
                .iter()
                .map(|(s, t, w)| {
                    (
                        s.to_string(),
                        t.to_string(),
                        EdgeRecord {
                            target: 0,
                            weight: *w,
                            position_fraction: 0.0,
                            snippet_ordinal: 0,
                        },
                    )
                })
                .collect(),
        )
    }

    pub(crate) fn from_adjacency(
        titles: Vec<String>,
        kinds: Vec<ArticleKind>,
        mut adjacency: Vec<Vec<EdgeRecord>>,
    ) -> Result<Self, WagError> {
        let n = titles.len();
        let index: HashMap<String, VertexId> = titles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as VertexId))
            .collect();
        if index.len() != n || titles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WagError::Invalid("vertex titles must be unique and sorted".into()));
        }
        if kinds.contains(&ArticleKind::Temporal) {
            return Err(WagError::Invalid("temporal vertex".into()));
        }
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut out_edges = Vec::new();
        let mut in_degree = vec![0u32; n];
        out_offsets.push(0);
        for (source, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|e| e.target);
            for pair in list.windows(2) {
                if pair[0].target == pair[1].target {
                    return Err(WagError::Invalid(format!(
                        "parallel edges {} -> {}",
                        titles[source], titles[pair[0].target as usize]
                    )));
                }
            }
            for e in list.iter() {
                if e.target as usize == source {
                    return Err(WagError::Invalid(format!("self-loop on {}", titles[source])));
                }
                if !(e.weight > 0.0 && e.weight <= 1.0) {
                    return Err(WagError::Invalid(format!(
                        "weight {} of {} -> {} outside (0, 1]",
                        e.weight, titles[source], titles[e.target as usize]
                    )));
                }
                if !(0.0..1.0).contains(&e.position_fraction) {
                    return Err(WagError::Invalid("position fraction outside [0, 1)".into()));
                }
                in_degree[e.target as usize] += 1;
            }
            out_edges.extend_from_slice(list);
            out_offsets.push(out_edges.len() as u32);
        }

        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0u32);
        for d in &in_degree {
            in_offsets.push(in_offsets.last().unwrap() + d);
        }
        let mut fill = in_offsets.clone();
        let mut in_edges = vec![
            EdgeRecord {
                target: 0,
                weight: 0.0,
                position_fraction: 0.0,
                snippet_ordinal: 0,
            };
            out_edges.len()
        ];
        // Sources are visited in increasing order, so each in-list ends up
        // sorted by source.
        for source in 0..n {
            for e in &out_edges[out_offsets[source] as usize..out_offsets[source + 1] as usize] {
                let slot = &mut fill[e.target as usize];
                in_edges[*slot as usize] = EdgeRecord {
                    target: source as VertexId,
                    ..*e
                };
                *slot += 1;
            }
        }

        Ok(Wag {
            titles,
            kinds,
            index,
            out_offsets,
            out_edges,
            in_offsets,
            in_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.titles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn id(&self, title: &str) -> Option<VertexId> {
        self.index.get(title).copied()
    }

    pub fn require(&self, title: &str) -> Result<VertexId, WagError> {
        self.id(title).ok_or_else(|| WagError::NotFound(title.to_string()))
    }

    pub fn title(&self, v: VertexId) -> &str {
        &self.titles[v as usize]
    }

    pub fn kind(&self, v: VertexId) -> ArticleKind {
        self.kinds[v as usize]
    }

    pub fn titles(&self) -> &[String] {
        &self.titles
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.titles.len() as VertexId
    }

    pub fn outdeg(&self, v: VertexId) -> usize {
        self.out(v).len()
    }

    /// Out-edges of `v`, sorted by target.
    pub fn out(&self, v: VertexId) -> &[EdgeRecord] {
        let v = v as usize;
        &self.out_edges[self.out_offsets[v] as usize..self.out_offsets[v + 1] as usize]
    }

    /// In-edges of `v`, sorted by source; `target` holds the source.
    pub fn incoming(&self, v: VertexId) -> &[EdgeRecord] {
        let v = v as usize;
        &self.in_edges[self.in_offsets[v] as usize..self.in_offsets[v + 1] as usize]
    }

    pub fn edge(&self, source: VertexId, target: VertexId) -> Option<&EdgeRecord> {
        let list = self.out(source);
        list.binary_search_by_key(&target, |e| e.target).ok().map(|i| &list[i])
    }

    /// Edges touching `title` in the given direction, in title order of the
    /// other endpoint.
    pub fn neighbors(&self, title: &str, direction: Direction) -> Result<Vec<WagEdge>, WagError> {
        let v = self.require(title)?;
        let edges = match direction {
            Direction::Out => self.out(v).iter().map(|e| self.spell(v, e.target, e)).collect(),
            Direction::In => self.incoming(v).iter().map(|e| self.spell(e.target, v, e)).collect(),
        };
        Ok(edges)
    }

    fn spell(&self, source: VertexId, target: VertexId, e: &EdgeRecord) -> WagEdge {
        WagEdge {
            source: self.title(source).to_string(),
            target: self.title(target).to_string(),
            weight: e.weight,
            position_fraction: e.position_fraction,
            snippet_ordinal: e.snippet_ordinal,
        }
    }

    pub(crate) fn out_offsets(&self) -> &[u32] {
        &self.out_offsets
    }

    pub(crate) fn out_edges(&self) -> &[EdgeRecord] {
        &self.out_edges
    }

    pub(crate) fn kinds(&self) -> &[ArticleKind] {
        &self.kinds
    }
}

/// Builds the graph over every non-temporal article of `corpus`.
///
/// Each source keeps the earliest occurrence of each distinct target;
/// dangling links, links to temporal articles and self-links are dropped
/// before the outdegree used in the weights is counted.
pub fn build_wag(corpus: &CorpusIndex) -> Wag {
    let vertices: Vec<&str> = corpus
        .articles
        .values()
        .filter(|a| a.kind != ArticleKind::Temporal)
        .map(|a| a.title.as_str())
        .collect();
    let index: HashMap<&str, VertexId> = vertices.iter().enumerate().map(|(i, t)| (*t, i as VertexId)).collect();

    let adjacency: Vec<Vec<EdgeRecord>> = vertices
        .iter()
        .enumerate()
        .map(|(source, title)| {
            let article = &corpus.articles[*title];
            let mut seen = HashSet::new();
            let mut firsts = Vec::new();
            for link in &article.links {
                if link.dangling {
                    continue;
                }
                let Some(&target) = index.get(link.target_title.as_str()) else {
                    continue;
                };
                if target as usize == source || !seen.insert(target) {
                    continue;
                }
                let Some(snippet) = article.snippet_at(link.char_offset) else {
                    debug_assert!(false, "prose link outside every snippet in {title}");
                    continue;
                };
                firsts.push((target, link.position_fraction, snippet.ordinal));
            }
            let outdeg = firsts.len();
            firsts
                .into_iter()
                .map(|(target, position_fraction, snippet_ordinal)| EdgeRecord {
                    target,
                    weight: edge_weight(position_fraction, outdeg),
                    position_fraction,
                    snippet_ordinal,
                })
                .collect()
        })
        .collect();

    let titles = vertices.iter().map(|t| t.to_string()).collect();
    let kinds = vertices.iter().map(|t| corpus.articles[*t].kind).collect();
    Wag::from_adjacency(titles, kinds, adjacency).expect("corpus graph satisfies its invariants")
}
