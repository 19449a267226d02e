//! Path-based semantic relatedness over the article graph.
//!
//! The relatedness of `a` and `b` is the sum, over every simple directed
//! path of at most `K` edges from `a` to `b` and from `b` to `a`, of the
//! path strength
//!
//! ```text
//! σ = λ^(m-1) · w1 · w2 · … · wm          (m = number of edges)
//! ```
//!
//! Every value keeps its strongest paths as witnesses; the snippets that
//! hold each path's links are the explanation of the value.
//!
//! Sums are taken over the path strengths sorted ascending, so any
//! algorithm that finds the same set of paths produces a bit-identical
//! value. That is what lets the one-to-many traversal in
//! [`relate_to_set`] agree exactly with per-pair [`relate`], and makes the
//! measure exactly symmetric.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ArticleKind, CorpusIndex};
use crate::wag::{VertexId, Wag};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExploSrError {
    #[error("article {0:?} is not a graph vertex")]
    NotFound(String),
    #[error("relatedness of {0:?} with itself is undefined")]
    SelfRelatedness(String),
    #[error("invalid relatedness config: {0}")]
    InvalidConfig(String),
    #[error("no explanation: {a:?} and {b:?} are unrelated")]
    NoExplanation { a: String, b: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploSrConfig {
    /// Longest path considered, in edges.
    pub max_path_len: usize,
    /// Per-hop decay λ applied from the second edge on.
    pub length_decay: f64,
    /// Witness paths kept per score.
    pub explain_top_k: usize,
}

impl Default for ExploSrConfig {
    fn default() -> Self {
        ExploSrConfig {
            max_path_len: 3,
            length_decay: 0.5,
            explain_top_k: 3,
        }
    }
}

impl ExploSrConfig {
    pub fn validate(&self) -> Result<(), ExploSrError> {
        if self.max_path_len < 1 {
            return Err(ExploSrError::InvalidConfig("max_path_len must be >= 1".into()));
        }
        if !(self.length_decay > 0.0 && self.length_decay <= 1.0) {
            return Err(ExploSrError::InvalidConfig("length_decay must be in (0, 1]".into()));
        }
        if self.explain_top_k < 1 {
            return Err(ExploSrError::InvalidConfig("explain_top_k must be >= 1".into()));
        }
        Ok(())
    }
}

/// Strength of a path with the given edge weights, in path order.
///
/// All code paths compute σ through this function so that the same path
/// always yields the same bits.
pub fn path_strength(weights: impl IntoIterator<Item = f64>, length_decay: f64) -> f64 {
    let mut weights = weights.into_iter();
    let Some(first) = weights.next() else {
        return 0.0;
    };
    weights.fold(first, |s, w| s * length_decay * w)
}

/// Sums strengths in ascending order.
pub fn canonical_sum(mut strengths: Vec<f64>) -> f64 {
    strengths.sort_by(f64::total_cmp);
    // `Iterator::sum` starts from -0.0; unrelated pairs must report 0.0.
    strengths.into_iter().fold(0.0, |acc, s| acc + s)
}

/// One hop's bridging snippet: the snippet of `article` holding the link
/// to the next vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridge {
    pub article: String,
    pub snippet_ordinal: u32,
    pub link_target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathWitness {
    pub vertices: Vec<String>,
    pub strength: f64,
    pub bridges: Vec<Bridge>,
}

impl PathWitness {
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatednessScore {
    pub a: String,
    pub b: String,
    pub value: f64,
    /// Strongest paths of both directions, σ descending, ties broken by
    /// the vertex sequence.
    pub witnesses: Vec<PathWitness>,
}

/// A path found during traversal, kept as vertex ids.
#[derive(Debug, Clone)]
struct RawPath {
    vertices: Vec<VertexId>,
    strength: f64,
}

fn witness_order(a: &RawPath, b: &RawPath) -> Ordering {
    b.strength
        .total_cmp(&a.strength)
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Collects strengths and keeps the best few witnesses of one pair.
#[derive(Debug, Default)]
struct Accumulator {
    strengths: Vec<f64>,
    best: Vec<RawPath>,
}

impl Accumulator {
    fn add(&mut self, path: RawPath, keep: usize) {
        self.strengths.push(path.strength);
        self.best.push(path);
        if self.best.len() >= keep * 4 + 16 {
            self.trim(keep);
        }
    }

    fn trim(&mut self, keep: usize) {
        self.best.sort_by(witness_order);
        self.best.truncate(keep);
    }

    fn into_score(mut self, wag: &Wag, a: VertexId, b: VertexId, keep: usize) -> RelatednessScore {
        self.trim(keep);
        RelatednessScore {
            a: wag.title(a).to_string(),
            b: wag.title(b).to_string(),
            value: canonical_sum(self.strengths),
            witnesses: self.best.iter().map(|p| spell_witness(wag, p)).collect(),
        }
    }
}

fn spell_witness(wag: &Wag, path: &RawPath) -> PathWitness {
    let bridges = path
        .vertices
        .windows(2)
        .map(|hop| {
            let edge = wag.edge(hop[0], hop[1]).expect("witness hops are graph edges");
            Bridge {
                article: wag.title(hop[0]).to_string(),
                snippet_ordinal: edge.snippet_ordinal,
                link_target: wag.title(hop[1]).to_string(),
            }
        })
        .collect();
    PathWitness {
        vertices: path.vertices.iter().map(|&v| wag.title(v).to_string()).collect(),
        strength: path.strength,
        bridges,
    }
}

fn ids(wag: &Wag, a: &str, b: &str) -> Result<(VertexId, VertexId), ExploSrError> {
    let va = wag.id(a).ok_or_else(|| ExploSrError::NotFound(a.to_string()))?;
    let vb = wag.id(b).ok_or_else(|| ExploSrError::NotFound(b.to_string()))?;
    Ok((va, vb))
}

/// Visits every simple path of at most `max_len` edges starting at
/// `start`, following out-edges (`forward`) or in-edges. The callback gets
/// the path in traversal order and the edge weights in traversal order.
fn walk(wag: &Wag, start: VertexId, max_len: usize, forward: bool, visit: &mut dyn FnMut(&[VertexId], &[f64]) -> bool) {
    let mut path = vec![start];
    let mut weights = Vec::with_capacity(max_len);
    // Frames hold (vertex, next neighbor index).
    let mut frames: Vec<(VertexId, usize)> = vec![(start, 0)];
    while let Some(&mut (v, ref mut next)) = frames.last_mut() {
        let edges = if forward { wag.out(v) } else { wag.incoming(v) };
        if *next >= edges.len() || path.len() > max_len {
            frames.pop();
            path.pop();
            weights.pop();
            continue;
        }
        let e = edges[*next];
        *next += 1;
        if path.contains(&e.target) {
            continue;
        }
        path.push(e.target);
        weights.push(e.weight);
        let descend = visit(&path, &weights);
        if descend && path.len() <= max_len {
            frames.push((e.target, 0));
        } else {
            path.pop();
            weights.pop();
        }
    }
}

fn paths_between(wag: &Wag, a: VertexId, b: VertexId, config: &ExploSrConfig) -> Vec<RawPath> {
    let mut found = Vec::new();
    walk(wag, a, config.max_path_len, true, &mut |path, weights| {
        let last = *path.last().expect("non-empty path");
        debug_assert!(path.iter().all(|&v| wag.kind(v) != ArticleKind::Temporal));
        if last == b {
            found.push(RawPath {
                vertices: path.to_vec(),
                strength: path_strength(weights.iter().copied(), config.length_decay),
            });
            // A simple path cannot come back to b.
            return false;
        }
        true
    });
    found
}

/// Every simple path `a → … → b` of at most `max_path_len` edges, sorted by
/// strength descending then vertex sequence.
pub fn enumerate_paths(wag: &Wag, a: &str, b: &str, config: &ExploSrConfig) -> Result<Vec<PathWitness>, ExploSrError> {
    config.validate()?;
    let (va, vb) = ids(wag, a, b)?;
    if va == vb {
        return Err(ExploSrError::SelfRelatedness(a.to_string()));
    }
    let mut paths = paths_between(wag, va, vb, config);
    paths.sort_by(witness_order);
    Ok(paths.iter().map(|p| spell_witness(wag, p)).collect())
}

/// Relatedness of one pair: paths in both directions, summed.
pub fn relate(wag: &Wag, a: &str, b: &str, config: &ExploSrConfig) -> Result<RelatednessScore, ExploSrError> {
    config.validate()?;
    let (va, vb) = ids(wag, a, b)?;
    if va == vb {
        return Err(ExploSrError::SelfRelatedness(a.to_string()));
    }
    let mut acc = Accumulator::default();
    for p in paths_between(wag, va, vb, config)
        .into_iter()
        .chain(paths_between(wag, vb, va, config))
    {
        acc.add(p, config.explain_top_k);
    }
    Ok(acc.into_score(wag, va, vb, config.explain_top_k))
}

/// Relatedness of `a` to every member of `targets` (except `a` itself).
///
/// One bounded traversal forward from `a` and one backward into `a` cover
/// all pairs at once; the result equals calling [`relate`] per pair.
/// Unknown target titles are an error.
pub fn relate_to_set<'t>(
    wag: &Wag,
    a: &str,
    targets: impl IntoIterator<Item = &'t str>,
    config: &ExploSrConfig,
) -> Result<BTreeMap<String, RelatednessScore>, ExploSrError> {
    config.validate()?;
    let va = wag.id(a).ok_or_else(|| ExploSrError::NotFound(a.to_string()))?;
    let mut slots: HashMap<VertexId, Accumulator> = HashMap::new();
    for t in targets {
        let vt = wag.id(t).ok_or_else(|| ExploSrError::NotFound(t.to_string()))?;
        if vt != va {
            slots.entry(vt).or_default();
        }
    }
    if slots.is_empty() {
        return Ok(BTreeMap::new());
    }
    let keep = config.explain_top_k;

    walk(wag, va, config.max_path_len, true, &mut |path, weights| {
        let last = *path.last().expect("non-empty path");
        if let Some(acc) = slots.get_mut(&last) {
            acc.add(
                RawPath {
                    vertices: path.to_vec(),
                    strength: path_strength(weights.iter().copied(), config.length_decay),
                },
                keep,
            );
        }
        true
    });
    walk(wag, va, config.max_path_len, false, &mut |path, weights| {
        let first = *path.last().expect("non-empty path");
        if let Some(acc) = slots.get_mut(&first) {
            // Traversal ran against edge direction; restore path order.
            acc.add(
                RawPath {
                    vertices: path.iter().rev().copied().collect(),
                    strength: path_strength(weights.iter().rev().copied(), config.length_decay),
                },
                keep,
            );
        }
        true
    });

    Ok(slots
        .into_iter()
        .map(|(vt, acc)| {
            let score = acc.into_score(wag, va, vt, keep);
            (score.b.clone(), score)
        })
        .collect())
}

/// One rendered hop of an explanation path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationHop {
    pub article: String,
    pub heading_path: Vec<String>,
    pub snippet: String,
    /// Anchor text of the link this snippet contributes to the path.
    pub anchor: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainedPath {
    pub strength: f64,
    pub hops: Vec<ExplanationHop>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub a: String,
    pub b: String,
    pub value: f64,
    pub paths: Vec<ExplainedPath>,
}

/// Renders a score's witnesses as snippet chains, strongest path first.
pub fn explain(corpus: &CorpusIndex, score: &RelatednessScore) -> Result<Explanation, ExploSrError> {
    if score.value <= 0.0 || score.witnesses.is_empty() {
        return Err(ExploSrError::NoExplanation {
            a: score.a.clone(),
            b: score.b.clone(),
        });
    }
    let paths = score
        .witnesses
        .iter()
        .map(|w| ExplainedPath {
            strength: w.strength,
            hops: w.bridges.iter().map(|b| render_hop(corpus, b)).collect(),
        })
        .collect();
    Ok(Explanation {
        a: score.a.clone(),
        b: score.b.clone(),
        value: score.value,
        paths,
    })
}

fn render_hop(corpus: &CorpusIndex, bridge: &Bridge) -> ExplanationHop {
    let article = corpus.get(&bridge.article).expect("graph vertices are corpus articles");
    let snippet = &article.snippets[bridge.snippet_ordinal as usize];
    let anchor = article
        .links
        .iter()
        .find(|l| !l.dangling && l.target_title == bridge.link_target)
        .map(|l| l.anchor_text.clone())
        .unwrap_or_default();
    ExplanationHop {
        article: article.title.clone(),
        heading_path: snippet.heading_path.clone(),
        snippet: snippet.text.clone(),
        anchor,
        target: bridge.link_target.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ArticleKind::NonSpatial;

    fn triangle() -> Wag {
        Wag::from_weighted_edges(
            &[("A", NonSpatial), ("B", NonSpatial), ("C", NonSpatial)],
            &[("A", "B", 0.5), ("B", "C", 0.5), ("A", "C", 0.25)],
        )
        .unwrap()
    }

    #[test]
    fn enumerate_triangle() {
        let cfg = ExploSrConfig::default();
        let paths = enumerate_paths(&triangle(), "A", "C", &cfg).unwrap();
        let got: Vec<_> = paths.iter().map(|p| (p.vertices.join(""), p.strength)).collect();
        assert_eq!(got, [("AC".to_string(), 0.25), ("ABC".to_string(), 0.125)]);
        assert!(enumerate_paths(&triangle(), "C", "A", &cfg).unwrap().is_empty());
    }

    #[test]
    fn k_one_keeps_direct_edge_only() {
        let cfg = ExploSrConfig {
            max_path_len: 1,
            ..Default::default()
        };
        let paths = enumerate_paths(&triangle(), "A", "C", &cfg).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices, ["A", "C"]);
    }

    #[test]
    fn relate_triangle() {
        let cfg = ExploSrConfig::default();
        let wag = triangle();
        let ac = relate(&wag, "A", "C", &cfg).unwrap();
        assert_eq!(ac.value, 0.375);
        assert_eq!(ac.witnesses.len(), 2);
        assert_eq!(ac.witnesses[0].bridges.len(), 1);
        let ca = relate(&wag, "C", "A", &cfg).unwrap();
        assert_eq!(ca.value, ac.value);
    }

    #[test]
    fn disconnected_pair_is_zero() {
        let wag = Wag::from_weighted_edges(&[("A", NonSpatial), ("B", NonSpatial)], &[]).unwrap();
        let s = relate(&wag, "A", "B", &ExploSrConfig::default()).unwrap();
        assert_eq!(s.value.to_bits(), 0.0f64.to_bits());
        assert!(s.witnesses.is_empty());
    }

    #[test]
    fn errors() {
        let wag = triangle();
        let cfg = ExploSrConfig::default();
        assert_eq!(
            relate(&wag, "A", "A", &cfg),
            Err(ExploSrError::SelfRelatedness("A".into()))
        );
        assert_eq!(relate(&wag, "A", "Q", &cfg), Err(ExploSrError::NotFound("Q".into())));
        let bad = ExploSrConfig {
            length_decay: 0.0,
            ..cfg
        };
        assert!(matches!(
            relate(&wag, "A", "B", &bad),
            Err(ExploSrError::InvalidConfig(_))
        ));
    }

    #[test]
    fn set_query_edges() {
        let wag = triangle();
        let cfg = ExploSrConfig::default();
        let all = relate_to_set(&wag, "A", ["A", "B", "C"], &cfg).unwrap();
        assert_eq!(all.keys().collect::<Vec<_>>(), ["B", "C"]);
        assert_eq!(all["C"], relate(&wag, "A", "C", &cfg).unwrap());
        assert!(relate_to_set(&wag, "A", [], &cfg).unwrap().is_empty());
        let single = relate_to_set(&wag, "C", ["B"], &cfg).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single["B"], relate(&wag, "C", "B", &cfg).unwrap());
    }

    #[test]
    fn witnesses_are_capped_and_ordered() {
        // Four parallel two-hop routes from S to T with distinct strengths.
        let mut vertices = vec![("S", NonSpatial), ("T", NonSpatial)];
        let mids = ["M1", "M2", "M3", "M4"];
        let mut edges = Vec::new();
        for (i, m) in mids.iter().enumerate() {
            vertices.push((m, NonSpatial));
            edges.push(("S", *m, 0.1 * (i + 1) as f64));
            edges.push((*m, "T", 0.5));
        }
        let wag = Wag::from_weighted_edges(&vertices, &edges).unwrap();
        let s = relate(&wag, "S", "T", &ExploSrConfig::default()).unwrap();
        let order: Vec<_> = s.witnesses.iter().map(|w| w.vertices[1].as_str()).collect();
        assert_eq!(order, ["M4", "M3", "M2"]);
    }

    #[test]
    fn path_strength_matches_closed_form() {
        let w = [0.3, 0.7, 0.2];
        let direct = 0.5f64.powi(2) * w.iter().product::<f64>();
        assert!((path_strength(w, 0.5) - direct).abs() < 1e-15);
        assert_eq!(path_strength([], 0.5), 0.0);
    }
}
