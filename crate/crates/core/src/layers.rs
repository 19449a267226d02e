//! Explicitly explanatory spatial data sets: a layer of valued geotagged
//! points plus the explanations behind every value or point pair.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus::{ArticleKind, Coordinate, CorpusIndex};
use crate::engine::Engine;
use crate::explosr::{explain, Explanation, ExploSrError, RelatednessScore};
use crate::minotour::{generate_narrative, Narrative, NarrativeError, NarrativeRequest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtentError {
    #[error("bbox must be four comma-separated numbers west,south,east,north")]
    Syntax,
    #[error("latitude bounds must satisfy -90 <= south <= north <= 90")]
    Latitude,
    #[error("longitude bounds must lie in [-180, 180]")]
    Longitude,
}

/// A lon/lat box. When `west > east` the box wraps across the dateline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub west: f64,
    pub south: f64,
    pub east: f64,
    pub north: f64,
}

impl Extent {
    pub const GLOBAL: Extent = Extent {
        west: -180.0,
        south: -90.0,
        east: 180.0,
        north: 90.0,
    };

    pub fn new(west: f64, south: f64, east: f64, north: f64) -> Result<Self, ExtentError> {
        let lat_ok = |x: f64| (-90.0..=90.0).contains(&x);
        let lon_ok = |x: f64| (-180.0..=180.0).contains(&x);
        if !(lat_ok(south) && lat_ok(north) && south <= north) {
            return Err(ExtentError::Latitude);
        }
        if !(lon_ok(west) && lon_ok(east)) {
            return Err(ExtentError::Longitude);
        }
        Ok(Extent {
            west,
            south,
            east,
            north,
        })
    }

    pub fn wraps_dateline(&self) -> bool {
        self.west > self.east
    }

    pub fn contains(&self, c: Coordinate) -> bool {
        let lat_in = self.south <= c.lat && c.lat <= self.north;
        let lon_in = if self.wraps_dateline() {
            c.lon >= self.west || c.lon <= self.east
        } else {
            self.west <= c.lon && c.lon <= self.east
        };
        lat_in && lon_in
    }
}

impl FromStr for Extent {
    type Err = ExtentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ExtentError::Syntax)?;
        match parts[..] {
            [w, s, e, n] if parts.iter().all(|x| x.is_finite()) => Extent::new(w, s, e, n),
            _ => Err(ExtentError::Syntax),
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.west, self.south, self.east, self.north)
    }
}

/// Spatial articles whose coordinate lies in `extent`, title-sorted.
pub fn spatial_articles_in(corpus: &CorpusIndex, extent: &Extent) -> Vec<String> {
    corpus
        .spatial_articles()
        .filter(|a| a.coordinate.is_some_and(|c| extent.contains(c)))
        .map(|a| a.title.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolScale {
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for SymbolScale {
    fn default() -> Self {
        SymbolScale {
            r_min: 4.0,
            r_max: 12.0,
        }
    }
}

impl SymbolScale {
    pub fn midpoint(&self) -> f64 {
        (self.r_min + self.r_max) / 2.0
    }
}

/// Square-root graduated radii over the value range; all-equal values get
/// the midpoint radius.
pub fn symbol_sizes(values: &[f64], r_min: f64, r_max: f64) -> Vec<f64> {
    assert!(r_min < r_max, "symbol_sizes needs r_min < r_max");
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo || hi.is_nan() || lo.is_nan() {
        return vec![(r_min + r_max) / 2.0; values.len()];
    }
    values
        .iter()
        .map(|&v| r_min + (r_max - r_min) * ((v - lo) / (hi - lo)).sqrt())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Theme,
    Entity,
    Narrative,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Theme => "theme",
            LayerKind::Entity => "entity",
            LayerKind::Narrative => "narrative",
        }
    }
}

impl FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theme" => Ok(LayerKind::Theme),
            "entity" => Ok(LayerKind::Entity),
            "narrative" => Ok(LayerKind::Narrative),
            other => Err(format!("unknown layer kind {other:?}")),
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EesdFeature {
    pub title: String,
    pub coordinate: Coordinate,
    /// Unset on narrative layers.
    pub value: Option<f64>,
    pub symbol_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EesdSet {
    pub kind: LayerKind,
    pub subject: Option<String>,
    pub extent: Extent,
    /// Title-sorted.
    pub features: Vec<EesdFeature>,
    /// Scores behind the values of theme and entity layers, by title.
    pub scores: BTreeMap<String, RelatednessScore>,
}

impl EesdSet {
    pub fn feature(&self, title: &str) -> Option<&EesdFeature> {
        self.features
            .binary_search_by(|f| f.title.as_str().cmp(title))
            .ok()
            .map(|i| &self.features[i])
    }

    /// The same layer cut down to `extent`, radii rescaled over the
    /// surviving values. Values are untouched.
    pub fn restrict(&self, corpus: &CorpusIndex, extent: &Extent, scale: &SymbolScale) -> EesdSet {
        let keep: Vec<String> = spatial_articles_in(corpus, extent);
        let features: Vec<EesdFeature> = self
            .features
            .iter()
            .filter(|f| keep.binary_search(&f.title).is_ok())
            .cloned()
            .collect();
        let scores = self
            .scores
            .iter()
            .filter(|(t, _)| keep.binary_search(t).is_ok())
            .map(|(t, s)| (t.clone(), s.clone()))
            .collect();
        let mut set = EesdSet {
            kind: self.kind,
            subject: self.subject.clone(),
            extent: *extent,
            features,
            scores,
        };
        set.assign_radii(scale);
        set
    }

    fn assign_radii(&mut self, scale: &SymbolScale) {
        let values: Vec<f64> = self.features.iter().map(|f| f.value.unwrap_or(0.0)).collect();
        if self.kind == LayerKind::Narrative || values.is_empty() {
            for f in &mut self.features {
                f.symbol_radius = scale.midpoint();
            }
            return;
        }
        let radii = symbol_sizes(&values, scale.r_min, scale.r_max);
        for (f, r) in self.features.iter_mut().zip(radii) {
            f.symbol_radius = r;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayerError {
    #[error("article {0:?} not found")]
    NotFound(String),
    #[error("article {0:?} is not geotagged")]
    NotSpatial(String),
    #[error("feature {0:?} is not in this layer")]
    FeatureNotFound(String),
    #[error("{0}")]
    BadQuery(String),
    #[error(transparent)]
    Relatedness(#[from] ExploSrError),
    #[error(transparent)]
    Narrative(#[from] NarrativeError),
}

fn valued_layer(engine: &Engine, kind: LayerKind, subject: &str, extent: &Extent) -> Result<EesdSet, LayerError> {
    let corpus = engine.corpus();
    let titles: Vec<String> = spatial_articles_in(corpus, extent)
        .into_iter()
        .filter(|t| t != subject)
        .collect();
    let mut scores = crate::explosr::relate_to_set(
        engine.wag(),
        subject,
        titles.iter().map(String::as_str),
        &engine.config().explosr,
    )?;
    let features = titles
        .iter()
        .map(|t| EesdFeature {
            title: t.clone(),
            coordinate: corpus.articles[t].coordinate.expect("spatial article"),
            value: Some(scores[t].value),
            symbol_radius: 0.0,
        })
        .collect();
    scores.retain(|_, s| s.value > 0.0);
    let mut set = EesdSet {
        kind,
        subject: Some(subject.to_string()),
        extent: *extent,
        features,
        scores,
    };
    set.assign_radii(&engine.config().symbols);
    Ok(set)
}

/// Relatedness of theme article `theme` to every spatial article in the
/// extent.
pub fn theme_layer(engine: &Engine, theme: &str, extent: &Extent) -> Result<EesdSet, LayerError> {
    if engine.wag().id(theme).is_none() {
        return Err(LayerError::NotFound(theme.to_string()));
    }
    valued_layer(engine, LayerKind::Theme, theme, extent)
}

/// Relatedness of spatial article `entity` to every other spatial article
/// in the extent.
pub fn entity_layer(engine: &Engine, entity: &str, extent: &Extent) -> Result<EesdSet, LayerError> {
    let Some(v) = engine.wag().id(entity) else {
        return Err(LayerError::NotFound(entity.to_string()));
    };
    if engine.wag().kind(v) != ArticleKind::Spatial {
        return Err(LayerError::NotSpatial(entity.to_string()));
    }
    valued_layer(engine, LayerKind::Entity, entity, extent)
}

/// Uniform points whose pairs are explained by narratives.
pub fn narrative_layer(corpus: &CorpusIndex, extent: &Extent, scale: &SymbolScale) -> EesdSet {
    let features = spatial_articles_in(corpus, extent)
        .into_iter()
        .map(|t| EesdFeature {
            coordinate: corpus.articles[&t].coordinate.expect("spatial article"),
            title: t,
            value: None,
            symbol_radius: scale.midpoint(),
        })
        .collect();
    EesdSet {
        kind: LayerKind::Narrative,
        subject: None,
        extent: *extent,
        features,
        scores: BTreeMap::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WhyQuery<'q> {
    Feature(&'q str),
    Pair {
        from: &'q str,
        to: &'q str,
        snippets: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum WhyAnswer {
    Explanation(Explanation),
    Narrative(Narrative),
}

pub fn why(engine: &Engine, set: &EesdSet, query: WhyQuery<'_>) -> Result<WhyAnswer, LayerError> {
    match (set.kind, query) {
        (LayerKind::Theme | LayerKind::Entity, WhyQuery::Feature(title)) => {
            let feature = set
                .feature(title)
                .ok_or_else(|| LayerError::FeatureNotFound(title.to_string()))?;
            let score = set
                .scores
                .get(&feature.title)
                .cloned()
                .unwrap_or_else(|| RelatednessScore {
                    a: set.subject.clone().unwrap_or_default(),
                    b: feature.title.clone(),
                    value: 0.0,
                    witnesses: Vec::new(),
                });
            Ok(WhyAnswer::Explanation(explain(engine.corpus(), &score)?))
        }
        (LayerKind::Narrative, WhyQuery::Pair { from, to, snippets }) => {
            for t in [from, to] {
                if set.feature(t).is_none() {
                    return Err(LayerError::FeatureNotFound(t.to_string()));
                }
            }
            let request = NarrativeRequest {
                start: from.to_string(),
                end: to.to_string(),
                snippet_count: snippets,
            };
            Ok(WhyAnswer::Narrative(generate_narrative(
                engine.wag(),
                engine.corpus(),
                &request,
                &engine.config().narrative,
            )?))
        }
        (LayerKind::Narrative, WhyQuery::Feature(_)) => Err(LayerError::BadQuery(
            "narrative layers explain feature pairs, not single features".into(),
        )),
        (_, WhyQuery::Pair { .. }) => Err(LayerError::BadQuery(
            "theme and entity layers explain single features".into(),
        )),
    }
}

/// GeoJSON FeatureCollection of the layer's points, title-sorted, with
/// `[lon, lat]` coordinates.
pub fn export_geojson(set: &EesdSet) -> Value {
    let features: Vec<Value> = set
        .features
        .iter()
        .map(|f| {
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [f.coordinate.lon, f.coordinate.lat],
                },
                "properties": {
                    "title": f.title,
                    "value": f.value,
                    "symbol_radius": f.symbol_radius,
                    "kind": set.kind.as_str(),
                    "subject": set.subject,
                },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "features": features,
    })
}

/// JSON shape of an explanation: `{paths: [{strength, hops: [...]}]}`.
pub fn explanation_json(e: &Explanation) -> Value {
    json!({
        "a": e.a,
        "b": e.b,
        "value": e.value,
        "paths": e.paths.iter().map(|p| json!({
            "strength": p.strength,
            "hops": p.hops.iter().map(|h| json!({
                "article": h.article,
                "heading_path": h.heading_path,
                "snippet": h.snippet,
                "anchor": h.anchor,
                "target": h.target,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// JSON shape of a narrative: `{path, steps: [...]}`.
pub fn narrative_json(n: &Narrative) -> Value {
    json!({
        "from": n.start,
        "to": n.end,
        "path": n.path,
        "strength": n.strength,
        "steps": n.steps.iter().map(|s| {
            let mut step = json!({
                "article": s.article,
                "heading_path": s.heading_path,
                "snippet": s.snippet,
                "ordinal": s.ordinal,
            });
            if let Some(to) = &s.bridge_to {
                step["bridge_to"] = json!(to);
            }
            step
        }).collect::<Vec<_>>(),
    })
}

pub fn why_json(answer: &WhyAnswer) -> Value {
    match answer {
        WhyAnswer::Explanation(e) => explanation_json(e),
        WhyAnswer::Narrative(n) => narrative_json(n),
    }
}
