mod common;

use std::time::Instant;

use eesd_core::corpus::store::{read_corpus, ARTICLES_FILE, MANIFEST_FILE};
use eesd_core::corpus::{ArticleKind, BuildOptions};
use eesd_core::wag::store::{read_wag, WAG_FILE};
use eesd_core::wag::{build_wag, Direction};
use eesd_core::{ingest, Engine, EngineConfig};

use common::{engine, expected, fixture_corpus, fixture_path};

#[test]
fn fixture_counts_match_manifest() {
    let corpus = fixture_corpus();
    let want = &expected()["counts"];
    assert_eq!(corpus.counts.spatial, want["spatial"].as_u64().unwrap());
    assert_eq!(corpus.counts.nonspatial, want["nonspatial"].as_u64().unwrap());
    assert_eq!(corpus.counts.temporal, want["temporal"].as_u64().unwrap());
    assert_eq!(corpus.counts.redirects, want["redirects"].as_u64().unwrap());
    assert_eq!(corpus.articles.len() as u64, want["articles"].as_u64().unwrap());
    assert_eq!(
        corpus.counts.articles() + corpus.counts.redirects,
        expected()["pages_ns0"].as_u64().unwrap()
    );
}

#[test]
fn fixture_kinds_and_coordinates() {
    let corpus = fixture_corpus();
    let exp = expected();
    for t in exp["temporal"].as_array().unwrap() {
        assert_eq!(corpus.articles[t.as_str().unwrap()].kind, ArticleKind::Temporal);
    }
    // "1983" carries a coord template; the temporal rule wins.
    assert!(corpus.articles["1983"].coordinate.is_none());
    let spatial = exp["spatial"].as_object().unwrap();
    assert_eq!(corpus.spatial_articles().count(), spatial.len());
    for (title, c) in spatial {
        let got = corpus.articles[title].coordinate.unwrap();
        assert!((got.lat - c[0].as_f64().unwrap()).abs() < 1e-9, "{title} lat");
        assert!((got.lon - c[1].as_f64().unwrap()).abs() < 1e-9, "{title} lon");
    }
    for (alias, target) in exp["redirects"].as_object().unwrap() {
        assert_eq!(corpus.redirects[alias], target.as_str().unwrap());
        assert_eq!(corpus.resolve(alias).unwrap().title, target.as_str().unwrap());
    }
}

#[test]
fn graph_matches_hand_authored_link_lists() {
    let wag = &engine().wag();
    let exp = expected();
    assert_eq!(wag.vertex_count() as u64, exp["vertex_count"].as_u64().unwrap());
    assert_eq!(wag.edge_count() as u64, exp["edge_count"].as_u64().unwrap());
    for (title, links) in exp["out_links"].as_object().unwrap() {
        let want: Vec<&str> = links.as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
        let mut got: Vec<(f64, String)> = wag
            .neighbors(title, Direction::Out)
            .unwrap()
            .into_iter()
            .map(|e| (e.position_fraction, e.target))
            .collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        let got: Vec<&str> = got.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(got, want, "out-links of {title}");
    }
    assert!(wag
        .titles()
        .iter()
        .all(|t| !["1983", "October 1"].contains(&t.as_str())));
}

#[test]
fn edge_weights_follow_position_and_outdegree() {
    let corpus = fixture_corpus();
    let wag = &engine().wag();
    for v in wag.vertices() {
        let outdeg = wag.outdeg(v) as f64;
        let article = &corpus.articles[wag.title(v)];
        for e in wag.out(v) {
            let target = wag.title(e.target);
            let first = article
                .links
                .iter()
                .find(|l| l.target_title == target && !l.dangling)
                .unwrap();
            let pos = first.char_offset as f64 / article.text_len as f64;
            assert!((e.position_fraction - pos).abs() < 1e-12);
            let w = (1.0 - pos / 2.0) / (2.0 + outdeg).log2();
            assert!((e.weight - w).abs() < 1e-12, "{} -> {target}", wag.title(v));
            let snippet = &article.snippets[e.snippet_ordinal as usize];
            assert!(snippet.contains_offset(first.char_offset));
            assert!(snippet.text.contains(&first.anchor_text));
        }
    }
}

#[test]
fn every_link_occurrence_lies_in_a_snippet() {
    for article in fixture_corpus().articles.values() {
        for link in &article.links {
            let s = article.snippet_at(link.char_offset).expect("link inside a snippet");
            assert!(
                s.text.contains(&link.anchor_text),
                "{}: {}",
                article.title,
                link.anchor_text
            );
        }
    }
}

#[test]
fn ingest_is_deterministic_and_round_trips() {
    let started = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = ingest(&fixture_path(), a.path(), &BuildOptions::default()).unwrap();
    ingest(&fixture_path(), b.path(), &BuildOptions::default()).unwrap();
    assert!(started.elapsed().as_secs_f64() < 5.0);
    for file in [ARTICLES_FILE, WAG_FILE, MANIFEST_FILE] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between runs");
    }
    let corpus = read_corpus(a.path()).unwrap();
    assert_eq!(corpus, ra.corpus);
    assert_eq!(read_wag(a.path()).unwrap(), ra.wag);
    assert_eq!(build_wag(&corpus), ra.wag);
    let opened = Engine::open(a.path(), EngineConfig::default()).unwrap();
    assert_eq!(opened.wag(), engine().wag());
}

#[test]
fn opening_a_mismatched_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    ingest(&fixture_path(), dir.path(), &BuildOptions::default()).unwrap();
    std::fs::write(dir.path().join(WAG_FILE), b"EESDWAG\0junk").unwrap();
    assert!(Engine::open(dir.path(), EngineConfig::default()).is_err());
    assert!(Engine::open(&dir.path().join("missing"), EngineConfig::default()).is_err());
}
