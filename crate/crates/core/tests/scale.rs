mod common;
#[path = "common/synthetic.rs"]
mod synthetic;

use std::time::Instant;

use eesd_core::corpus::BuildOptions;
use eesd_core::layers::{theme_layer, Extent};
use eesd_core::{ingest, Engine, EngineConfig};

#[test]
fn fixture_theme_layer_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    ingest(&common::fixture_path(), dir.path(), &BuildOptions::default()).unwrap();
    let engine = Engine::open(dir.path(), EngineConfig::default()).unwrap();
    let layer = theme_layer(&engine, "Surfing", &Extent::GLOBAL).unwrap();
    assert_eq!(layer.features.len(), 8);
    assert!(started.elapsed().as_secs_f64() < 1.0, "{:?}", started.elapsed());
}

#[test]
fn synthetic_corpus_ingests_within_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("synthetic.xml");
    std::fs::write(&dump, synthetic::synthetic_export(50_000, 500_000, 7)).unwrap();
    let started = Instant::now();
    let report = ingest(&dump, &dir.path().join("index"), &BuildOptions::default()).unwrap();
    let elapsed = started.elapsed();
    assert_eq!(report.corpus.articles.len(), 50_000);
    assert_eq!(report.corpus.counts.spatial, 5_000);
    let links: usize = report.corpus.articles.values().map(|a| a.links.len()).sum();
    assert_eq!(links, 500_000);
    assert!(report.wag.edge_count() > 450_000);
    eprintln!("synthetic ingest: {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 60.0, "{elapsed:?}");
}
