//! Request dispatch for the HTTP API, independent of any server runtime.
//!
//! Routes (all `GET`):
//!
//! ```text
//! /themes
//! /layer/theme/{title}?bbox=w,s,e,n
//! /layer/entity/{title}?bbox=w,s,e,n
//! /articles?bbox=w,s,e,n
//! /why?layer=theme|entity&subject=&feature=
//! /why?layer=narrative&feature=&feature2=&s=
//! /narrative?from=&to=&s=
//! ```
//!
//! `bbox` defaults to the whole globe and `s` to 4. Bodies are canonical
//! JSON; errors carry `{"error": {"code", "message"}}` with one of the
//! codes in [`ErrorCode`].

use std::collections::BTreeMap;

use eesd_core::canonical::to_canonical_bytes;
use eesd_core::corpus::ArticleKind;
use eesd_core::explosr::{explain, relate, ExploSrError};
use eesd_core::layers::{
    entity_layer, explanation_json, export_geojson, narrative_json, narrative_layer, Extent, LayerError, LayerKind,
};
use eesd_core::minotour::{generate_narrative, NarrativeError, NarrativeRequest};
use eesd_core::Engine;
use percent_encoding::percent_decode_str;
use serde_json::{json, Value};

use crate::cache::ThemeCache;
use crate::catalog::ThemeCatalog;

pub const DEFAULT_SNIPPETS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    NoExplanation,
    NoNarrative,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::NotFound => "not_found",
            ErrorCode::NoExplanation => "no_explanation",
            ErrorCode::NoNarrative => "no_narrative",
        }
    }

    pub fn status(self) -> u16 {
        match self {
            ErrorCode::BadRequest => 400,
            _ => 404,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
        }
    }

    fn bad(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::BadRequest, message)
    }
}

impl From<ExploSrError> for ApiError {
    fn from(e: ExploSrError) -> Self {
        let code = match e {
            ExploSrError::NotFound(_) => ErrorCode::NotFound,
            ExploSrError::NoExplanation { .. } => ErrorCode::NoExplanation,
            ExploSrError::SelfRelatedness(_) | ExploSrError::InvalidConfig(_) => ErrorCode::BadRequest,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<NarrativeError> for ApiError {
    fn from(e: NarrativeError) -> Self {
        let code = match e {
            NarrativeError::NotFound(_) => ErrorCode::NotFound,
            NarrativeError::NoNarrative { .. } => ErrorCode::NoNarrative,
            _ => ErrorCode::BadRequest,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<LayerError> for ApiError {
    fn from(e: LayerError) -> Self {
        match e {
            LayerError::Relatedness(e) => e.into(),
            LayerError::Narrative(e) => e.into(),
            LayerError::NotFound(_) | LayerError::FeatureNotFound(_) => {
                ApiError::new(ErrorCode::NotFound, e.to_string())
            }
            LayerError::NotSpatial(_) | LayerError::BadQuery(_) => ApiError::bad(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Response {
    fn json(value: &Value) -> Self {
        Response {
            status: 200,
            content_type: "application/json",
            body: to_canonical_bytes(value),
        }
    }

    fn geojson(value: &Value) -> Self {
        Response {
            status: 200,
            content_type: "application/geo+json",
            body: to_canonical_bytes(value),
        }
    }

    fn error(e: &ApiError) -> Self {
        Response {
            status: e.code.status(),
            content_type: "application/json",
            body: to_canonical_bytes(&json!({
                "error": { "code": e.code.as_str(), "message": e.message }
            })),
        }
    }
}

/// The API over one loaded index. Holds only immutable data, so one
/// instance serves concurrent requests.
#[derive(Debug)]
pub struct Service {
    engine: Engine,
    catalog: ThemeCatalog,
    cache: ThemeCache,
}

type Params = BTreeMap<String, String>;

impl Service {
    pub fn new(engine: Engine, catalog: ThemeCatalog, cache: ThemeCache) -> Self {
        Service { engine, catalog, cache }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn cache(&self) -> &ThemeCache {
        &self.cache
    }

    /// Answers one request. `query` is the raw query string without `?`.
    pub fn handle_request(&self, method: &str, path: &str, query: &str) -> Response {
        if method != "GET" {
            return Response::error(&ApiError::bad(format!("method {method} not allowed")));
        }
        let params: Params = form_urlencoded::parse(query.as_bytes()).into_owned().collect();
        match self.route(path, &params) {
            Ok(r) => r,
            Err(e) => Response::error(&e),
        }
    }

    fn route(&self, path: &str, params: &Params) -> Result<Response, ApiError> {
        let segments: Vec<String> = path
            .trim_matches('/')
            .split('/')
            .map(|s| percent_decode_str(s).decode_utf8_lossy().into_owned())
            .collect();
        let segments: Vec<&str> = segments.iter().map(String::as_str).collect();
        match segments[..] {
            ["themes"] => Ok(self.themes()),
            ["layer", kind, title] => self.layer(kind, title, params),
            ["articles"] => {
                let extent = bbox(params)?;
                let layer = narrative_layer(self.engine.corpus(), &extent, &self.engine.config().symbols);
                Ok(Response::geojson(&export_geojson(&layer)))
            }
            ["why"] => self.why(params),
            ["narrative"] => {
                let from = self.title(required(params, "from")?)?;
                let to = self.title(required(params, "to")?)?;
                self.narrative(&from, &to, snippets(params)?)
            }
            _ => Err(ApiError::new(ErrorCode::NotFound, format!("no route for {path}"))),
        }
    }

    /// Resolves a user-supplied title through redirects.
    fn title(&self, raw: &str) -> Result<String, ApiError> {
        let title = eesd_core::corpus::canonical_title(raw);
        self.engine
            .corpus()
            .resolve(&title)
            .map(|a| a.title.clone())
            .ok_or_else(|| ApiError::new(ErrorCode::NotFound, format!("no article {title:?}")))
    }

    fn themes(&self) -> Response {
        let themes: Vec<Value> = self
            .catalog
            .themes
            .iter()
            .map(|t| {
                json!({
                    "title": t.title,
                    "source": t.source,
                    "available": self.engine.wag().id(&t.title).is_some(),
                    "cached": self.cache.get(&t.title).is_some(),
                })
            })
            .collect();
        Response::json(&json!({ "themes": themes }))
    }

    fn layer(&self, kind: &str, raw_title: &str, params: &Params) -> Result<Response, ApiError> {
        let kind: LayerKind = kind.parse().map_err(ApiError::bad)?;
        let extent = bbox(params)?;
        let title = self.title(raw_title)?;
        let layer = match kind {
            LayerKind::Theme => self.cache.theme_layer(&self.engine, &title, &extent)?,
            LayerKind::Entity => entity_layer(&self.engine, &title, &extent)?,
            LayerKind::Narrative => return Err(ApiError::bad("narrative layers are served by /articles")),
        };
        Ok(Response::geojson(&export_geojson(&layer)))
    }

    fn why(&self, params: &Params) -> Result<Response, ApiError> {
        let kind: LayerKind = required(params, "layer")?.parse().map_err(ApiError::bad)?;
        let feature = self.title(required(params, "feature")?)?;
        if kind == LayerKind::Narrative {
            let other = self.title(required(params, "feature2")?)?;
            return self.narrative(&feature, &other, snippets(params)?);
        }
        let subject = self.title(required(params, "subject")?)?;
        if self.engine.corpus().articles[&feature].kind != ArticleKind::Spatial {
            return Err(ApiError::new(
                ErrorCode::NotFound,
                format!("{feature:?} is not a map feature"),
            ));
        }
        let subject_kind = self.engine.corpus().articles[&subject].kind;
        if kind == LayerKind::Entity && subject_kind != ArticleKind::Spatial {
            return Err(ApiError::bad(format!(
                "entity layer subject {subject:?} is not geotagged"
            )));
        }
        if subject == feature {
            return Err(ApiError::new(
                ErrorCode::NotFound,
                "the subject is not a feature of its own layer",
            ));
        }
        let score = relate(self.engine.wag(), &subject, &feature, &self.engine.config().explosr)?;
        let explanation = explain(self.engine.corpus(), &score)?;
        Ok(Response::json(&explanation_json(&explanation)))
    }

    fn narrative(&self, from: &str, to: &str, s: usize) -> Result<Response, ApiError> {
        let request = NarrativeRequest {
            start: from.to_string(),
            end: to.to_string(),
            snippet_count: s,
        };
        let n = generate_narrative(
            self.engine.wag(),
            self.engine.corpus(),
            &request,
            &self.engine.config().narrative,
        )?;
        Ok(Response::json(&narrative_json(&n)))
    }
}

fn required<'p>(params: &'p Params, name: &str) -> Result<&'p str, ApiError> {
    params
        .get(name)
        .map(String::as_str)
        .filter(|v| !v.trim().is_empty())
        .ok_or_else(|| ApiError::bad(format!("missing parameter {name:?}")))
}

fn bbox(params: &Params) -> Result<Extent, ApiError> {
    match params.get("bbox") {
        None => Ok(Extent::GLOBAL),
        Some(raw) => raw.parse().map_err(|e| ApiError::bad(format!("bad bbox {raw:?}: {e}"))),
    }
}

fn snippets(params: &Params) -> Result<usize, ApiError> {
    match params.get("s") {
        None => Ok(DEFAULT_SNIPPETS),
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| ApiError::bad(format!("bad snippet count {raw:?}"))),
    }
}
