mod common;

use std::collections::BTreeMap;

use eesd_core::canonical::to_canonical_bytes;
use eesd_core::explosr::{relate, ExploSrError};
use eesd_core::layers::{
    entity_layer, export_geojson, narrative_layer, spatial_articles_in, symbol_sizes, theme_layer, why, Extent,
    LayerError, LayerKind, SymbolScale, WhyAnswer, WhyQuery,
};
use proptest::prelude::*;

use common::{engine, expected};

fn coords() -> BTreeMap<String, (f64, f64)> {
    expected()["spatial"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(t, c)| (t.clone(), (c[0].as_f64().unwrap(), c[1].as_f64().unwrap())))
        .collect()
}

/// Extent membership computed from the authored coordinates.
fn inside(e: &Extent, lat: f64, lon: f64) -> bool {
    let lon_ok = if e.west <= e.east {
        e.west <= lon && lon <= e.east
    } else {
        lon >= e.west || lon <= e.east
    };
    e.south <= lat && lat <= e.north && lon_ok
}

fn boxes() -> Vec<Extent> {
    let mut v = vec![
        Extent::GLOBAL,
        Extent::new(0.0, 0.0, 0.0, 0.0).unwrap(),
        Extent::new(-20.0, 30.0, 30.0, 60.0).unwrap(),
        // Straddles the dateline: Suva (178.4) and Apia (-171.75).
        Extent::new(170.0, -30.0, -170.0, 0.0).unwrap(),
        Extent::new(150.0, -40.0, -150.0, 30.0).unwrap(),
        Extent::new(-180.0, -90.0, 0.0, 90.0).unwrap(),
    ];
    for w in (-180..180).step_by(45) {
        for s in (-90..90).step_by(45) {
            v.push(
                Extent::new(
                    w as f64,
                    s as f64,
                    ((w + 100) as f64).min(180.0),
                    (s + 60).min(90) as f64,
                )
                .unwrap(),
            );
        }
    }
    v
}

#[test]
fn extent_filter_is_sound_and_complete() {
    let corpus = engine().corpus();
    let all = coords();
    assert_eq!(spatial_articles_in(corpus, &Extent::GLOBAL).len(), 8);
    assert!(spatial_articles_in(corpus, &Extent::new(0.0, 0.0, 0.0, 0.0).unwrap()).is_empty());
    let dateline = spatial_articles_in(corpus, &Extent::new(170.0, -30.0, -170.0, 0.0).unwrap());
    assert_eq!(dateline, ["Apia", "Suva"]);
    for e in boxes() {
        let got = spatial_articles_in(corpus, &e);
        let want: Vec<String> = all
            .iter()
            .filter(|(_, (lat, lon))| inside(&e, *lat, *lon))
            .map(|(t, _)| t.clone())
            .collect();
        assert_eq!(got, want, "{e}");
    }
}

#[test]
fn theme_layer_values_equal_pair_queries() {
    let e = engine();
    for theme in ["Surfing", "Rugby union", "Germany", "Pacific Ocean"] {
        let layer = theme_layer(e, theme, &Extent::GLOBAL).unwrap();
        assert_eq!(layer.kind, LayerKind::Theme);
        assert_eq!(layer.features.len(), 8);
        for f in &layer.features {
            let want = relate(e.wag(), theme, &f.title, &e.config().explosr).unwrap().value;
            assert_eq!(f.value.unwrap().to_bits(), want.to_bits());
        }
    }
}

#[test]
fn isolated_theme_is_all_zero() {
    let e = engine();
    let layer = theme_layer(e, "Multi-touch", &Extent::GLOBAL).unwrap();
    assert!(layer.features.iter().all(|f| f.value == Some(0.0)));
    assert!(layer.features.iter().all(|f| f.symbol_radius == 8.0));
    let answer = why(e, &layer, WhyQuery::Feature("Sydney"));
    assert!(matches!(
        answer,
        Err(LayerError::Relatedness(ExploSrError::NoExplanation { .. }))
    ));
}

#[test]
fn entity_layer_excludes_subject_and_is_symmetric() {
    let e = engine();
    let titles = spatial_articles_in(e.corpus(), &Extent::GLOBAL);
    let layers: BTreeMap<&str, _> = titles
        .iter()
        .map(|t| (t.as_str(), entity_layer(e, t, &Extent::GLOBAL).unwrap()))
        .collect();
    for (a, layer) in &layers {
        assert!(layer.feature(a).is_none());
        assert_eq!(layer.features.len(), 7);
        for f in &layer.features {
            let back = layers[f.title.as_str()].feature(a).unwrap();
            assert_eq!(f.value.unwrap().to_bits(), back.value.unwrap().to_bits());
        }
    }
    assert!(matches!(
        entity_layer(e, "Surfing", &Extent::GLOBAL),
        Err(LayerError::NotSpatial(_))
    ));
    assert!(matches!(
        theme_layer(e, "Atlantis", &Extent::GLOBAL),
        Err(LayerError::NotFound(_))
    ));
    assert!(matches!(
        theme_layer(e, "1983", &Extent::GLOBAL),
        Err(LayerError::NotFound(_))
    ));
}

#[test]
fn shrinking_the_extent_keeps_values() {
    let e = engine();
    let global = theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap();
    for b in boxes() {
        let small = theme_layer(e, "Surfing", &b).unwrap();
        let restricted = global.restrict(e.corpus(), &b, &e.config().symbols);
        assert_eq!(small, restricted, "{b}");
        for f in &small.features {
            let g = global.feature(&f.title).unwrap();
            assert_eq!(f.value.unwrap().to_bits(), g.value.unwrap().to_bits());
            assert!(inside(&b, f.coordinate.lat, f.coordinate.lon));
        }
    }
}

#[test]
fn radii_track_values() {
    let e = engine();
    let scale = SymbolScale::default();
    let layer = theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap();
    let mut by_value: Vec<(f64, f64)> = layer
        .features
        .iter()
        .map(|f| (f.value.unwrap(), f.symbol_radius))
        .collect();
    by_value.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(by_value.first().unwrap().1, scale.r_min);
    assert_eq!(by_value.last().unwrap().1, scale.r_max);
    assert!(by_value.windows(2).all(|w| w[0].1 <= w[1].1));

    let r = symbol_sizes(&[1.0, 2.5, 4.0], 4.0, 12.0);
    assert_eq!((r[0], r[2]), (4.0, 12.0));
    assert!((r[1] - 9.657).abs() < 1e-3);
    assert!((r[1] - (4.0 + 8.0 * (1.5f64 / 3.0).sqrt())).abs() < 1e-6);
}

#[test]
fn geojson_round_trips() {
    let e = engine();
    let layer = theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap();
    let bytes = to_canonical_bytes(&export_geojson(&layer));
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(doc["type"], "FeatureCollection");
    let features = doc["features"].as_array().unwrap();
    assert_eq!(features.len(), layer.features.len());
    for (json, f) in features.iter().zip(&layer.features) {
        let p = &json["properties"];
        assert_eq!(p["title"], f.title.as_str());
        assert_eq!(p["value"].as_f64().unwrap().to_bits(), f.value.unwrap().to_bits());
        assert_eq!(p["kind"], "theme");
        assert_eq!(p["subject"], "Surfing");
        let c = json["geometry"]["coordinates"].as_array().unwrap();
        assert!((c[0].as_f64().unwrap() - f.coordinate.lon).abs() < 1e-9);
        assert!((c[1].as_f64().unwrap() - f.coordinate.lat).abs() < 1e-9);
    }
    // Münster's longitude (7.6) precedes its latitude (51.9).
    let m = features.iter().find(|f| f["properties"]["title"] == "Münster").unwrap();
    assert_eq!(m["geometry"]["coordinates"][0].as_f64().unwrap(), 7.6256);

    let empty = theme_layer(e, "Surfing", &Extent::new(0.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(export_geojson(&empty)["features"], serde_json::json!([]));
}

#[test]
fn layers_are_deterministic() {
    let e = engine();
    let a = to_canonical_bytes(&export_geojson(&theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap()));
    let b = to_canonical_bytes(&export_geojson(&theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap()));
    assert_eq!(a, b);
}

#[test]
fn why_answers() {
    let e = engine();
    let theme = theme_layer(e, "Surfing", &Extent::GLOBAL).unwrap();
    let WhyAnswer::Explanation(x) = why(e, &theme, WhyQuery::Feature("Biarritz")).unwrap() else {
        panic!("theme layers answer with explanations");
    };
    assert!(!x.paths.is_empty());
    assert!(x
        .paths
        .iter()
        .flat_map(|p| &p.hops)
        .all(|h| h.snippet.contains(&h.anchor)));
    assert!(matches!(
        why(e, &theme, WhyQuery::Feature("Atlantis")),
        Err(LayerError::FeatureNotFound(_))
    ));
    assert!(matches!(
        why(
            e,
            &theme,
            WhyQuery::Pair {
                from: "Suva",
                to: "Apia",
                snippets: 2
            }
        ),
        Err(LayerError::BadQuery(_))
    ));

    let nar = narrative_layer(e.corpus(), &Extent::GLOBAL, &SymbolScale::default());
    assert!(nar.features.iter().all(|f| f.value.is_none() && f.symbol_radius == 8.0));
    let WhyAnswer::Narrative(n) = why(
        e,
        &nar,
        WhyQuery::Pair {
            from: "Suva",
            to: "Apia",
            snippets: 3,
        },
    )
    .unwrap() else {
        panic!("narrative layers answer with narratives");
    };
    assert_eq!(n.steps.len(), 3);
    assert!(matches!(
        why(e, &nar, WhyQuery::Feature("Suva")),
        Err(LayerError::BadQuery(_))
    ));

    let single = narrative_layer(
        e.corpus(),
        &Extent::new(170.0, -20.0, 180.0, 0.0).unwrap(),
        &SymbolScale::default(),
    );
    assert_eq!(single.features.len(), 1);
    assert!(matches!(
        why(
            e,
            &single,
            WhyQuery::Pair {
                from: "Suva",
                to: "Apia",
                snippets: 3
            }
        ),
        Err(LayerError::FeatureNotFound(_))
    ));
}

proptest! {
    #[test]
    fn radii_are_bounded_and_monotone(values in proptest::collection::vec(0.0f64..10.0, 1..40)) {
        let r = symbol_sizes(&values, 4.0, 12.0);
        prop_assert!(r.iter().all(|x| (4.0..=12.0).contains(x)));
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] <= values[j] {
                    prop_assert!(r[i] <= r[j]);
                }
            }
        }
    }

    #[test]
    fn bbox_strings_parse_or_reject(w in -200.0f64..200.0, s in -100.0f64..100.0, e in -200.0f64..200.0, n in -100.0f64..100.0) {
        let parsed = format!("{w},{s},{e},{n}").parse::<Extent>();
        let valid = (-180.0..=180.0).contains(&w) && (-180.0..=180.0).contains(&e)
            && (-90.0..=90.0).contains(&s) && (-90.0..=90.0).contains(&n) && s <= n;
        prop_assert_eq!(parsed.is_ok(), valid);
    }
}
