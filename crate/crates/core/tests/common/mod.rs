#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::OnceLock;

use eesd_core::corpus::{build_corpus, parse_export, ArticleKind, CorpusIndex};
use eesd_core::wag::Wag;
use eesd_core::{Engine, EngineConfig};
use proptest::prelude::*;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/miniwiki.xml")
}

pub fn expected() -> serde_json::Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/miniwiki.expected.json");
    serde_json::from_reader(File::open(path).unwrap()).unwrap()
}

pub fn fixture_corpus() -> CorpusIndex {
    let pages = parse_export(BufReader::new(File::open(fixture_path()).unwrap())).unwrap();
    let (corpus, warnings) = build_corpus(pages);
    assert!(warnings.is_empty(), "{warnings:?}");
    corpus
}

pub fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| Engine::from_corpus(fixture_corpus(), EngineConfig::default()))
}

/// A plain edge-list view of a graph, built without the CSR accessors the
/// engine uses internally.
pub struct Plain {
    pub kinds: BTreeMap<String, ArticleKind>,
    pub out: HashMap<String, Vec<(String, f64)>>,
}

impl Plain {
    pub fn of(wag: &Wag) -> Plain {
        let mut kinds = BTreeMap::new();
        let mut out: HashMap<String, Vec<(String, f64)>> = HashMap::new();
        for v in wag.vertices() {
            kinds.insert(wag.title(v).to_string(), wag.kind(v));
            out.entry(wag.title(v).to_string()).or_default();
            for e in wag.out(v) {
                out.get_mut(wag.title(v))
                    .unwrap()
                    .push((wag.title(e.target).to_string(), e.weight));
            }
        }
        Plain { kinds, out }
    }

    /// Every simple path from `a` to `b` with at most `k` edges, recursively.
    pub fn all_paths(&self, a: &str, b: &str, k: usize) -> Vec<(Vec<String>, Vec<f64>)> {
        fn go(
            g: &Plain,
            b: &str,
            k: usize,
            path: &mut Vec<String>,
            ws: &mut Vec<f64>,
            found: &mut Vec<(Vec<String>, Vec<f64>)>,
        ) {
            if ws.len() == k {
                return;
            }
            let here = path.last().unwrap().clone();
            for (t, w) in &g.out[&here] {
                if path.contains(t) {
                    continue;
                }
                path.push(t.clone());
                ws.push(*w);
                if t == b {
                    found.push((path.clone(), ws.clone()));
                } else {
                    go(g, b, k, path, ws, found);
                }
                path.pop();
                ws.pop();
            }
        }
        let mut found = Vec::new();
        go(self, b, k, &mut vec![a.to_string()], &mut Vec::new(), &mut found);
        found
    }

    /// σ by closed form: λ^(m-1) · Π w.
    pub fn sigma(ws: &[f64], lambda: f64) -> f64 {
        lambda.powi(ws.len() as i32 - 1) * ws.iter().product::<f64>()
    }

    pub fn relate(&self, a: &str, b: &str, k: usize, lambda: f64) -> (f64, usize) {
        let mut total = 0.0;
        let mut n = 0;
        for (_, ws) in self.all_paths(a, b, k).into_iter().chain(self.all_paths(b, a, k)) {
            total += Self::sigma(&ws, lambda);
            n += 1;
        }
        (total, n)
    }

    /// Strongest route a→b of 2..=max_hops edges with non-spatial
    /// interiors, ties by vertex sequence.
    pub fn best_route(&self, a: &str, b: &str, max_hops: usize, lambda: f64) -> Option<(Vec<String>, f64)> {
        let mut best: Option<(Vec<String>, f64)> = None;
        for (path, ws) in self.all_paths(a, b, max_hops) {
            if path.len() < 3 {
                continue;
            }
            if path[1..path.len() - 1]
                .iter()
                .any(|v| self.kinds[v] != ArticleKind::NonSpatial)
            {
                continue;
            }
            let s = Self::sigma(&ws, lambda);
            let better = match &best {
                None => true,
                Some((bp, bs)) => s > *bs + 1e-15 || ((s - bs).abs() <= 1e-15 && path < *bp),
            };
            if better {
                best = Some((path, s));
            }
        }
        best
    }
}

/// Random small graphs: up to `max_n` vertices named V00.., random kinds,
/// random edges with weights in (0, 1].
pub fn small_graph(max_n: usize) -> impl Strategy<Value = Wag> {
    (2..=max_n).prop_flat_map(|n| {
        let kinds = proptest::collection::vec(
            prop_oneof![Just(ArticleKind::Spatial), Just(ArticleKind::NonSpatial)],
            n,
        );
        let edges = proptest::collection::vec(((0..n), (0..n), 0.01f64..=1.0), 0..(n * n));
        (kinds, edges).prop_map(move |(kinds, edges)| {
            let names: Vec<String> = (0..n).map(|i| format!("V{i:02}")).collect();
            let vertices: Vec<(&str, ArticleKind)> =
                names.iter().map(String::as_str).zip(kinds.iter().copied()).collect();
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<(&str, &str, f64)> = edges
                .into_iter()
                .filter(|(s, t, _)| s != t && seen.insert((*s, *t)))
                .map(|(s, t, w)| (names[s].as_str(), names[t].as_str(), w))
                .collect();
            Wag::from_weighted_edges(&vertices, &edges).unwrap()
        })
    })
}
