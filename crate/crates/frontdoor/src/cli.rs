//! The `eesd` command line.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use eesd_core::canonical::to_canonical_bytes;
use eesd_core::corpus::store::{Manifest, MANIFEST_FILE};
use eesd_core::corpus::{BuildOptions, LocaleProfile};
use eesd_core::explosr::{explain, relate, ExploSrConfig, ExploSrError};
use eesd_core::layers::{entity_layer, explanation_json, export_geojson, narrative_json, Extent, LayerError};
use eesd_core::minotour::{generate_narrative, reverse_narrative, NarrativeError, NarrativeRequest};
use eesd_core::{ingest, Engine, EngineConfig, EngineError};
use serde_json::json;
use thiserror::Error;

use crate::cache::{precompute_themes, CacheError, ThemeCache};
use crate::catalog::ThemeCatalog;
use crate::service::Service;

#[derive(Debug, Parser)]
#[command(
    name = "eesd",
    version,
    about = "Explanatory spatial data layers from a MediaWiki export"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayerArg {
    Theme,
    Entity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an export and write the article and graph indices.
    Ingest {
        dump: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Locale for recognizing date and year articles: en, de or es.
        #[arg(long, default_value = "en")]
        locale: String,
    },
    /// Print the counts of an index directory.
    Stats { dir: PathBuf },
    /// Relatedness of two articles with its explanation.
    Relate {
        dir: PathBuf,
        a: String,
        b: String,
        /// Longest path considered, in links.
        #[arg(long)]
        k: Option<usize>,
        /// Per-hop decay.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Write a theme or entity layer as GeoJSON.
    Layer {
        kind: LayerArg,
        dir: PathBuf,
        title: String,
        /// west,south,east,north in degrees.
        #[arg(long, default_value = "-180,-90,180,90", allow_hyphen_values = true)]
        bbox: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the narrative between two geotagged articles.
    Narrate {
        dir: PathBuf,
        a: String,
        b: String,
        #[arg(long, default_value_t = 4)]
        snippets: usize,
        /// Narrate from b to a instead.
        #[arg(long)]
        reverse: bool,
    },
    /// Precompute global theme layers into the index directory.
    Precompute {
        dir: PathBuf,
        /// Catalog file, one title per line. Defaults to the bundled list.
        #[arg(long)]
        themes: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        dir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        themes: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotFound(_) => 3,
            CliError::Data(_) => 4,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ExploSrError> for CliError {
    fn from(e: ExploSrError) -> Self {
        match e {
            ExploSrError::NotFound(_) => CliError::NotFound(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<NarrativeError> for CliError {
    fn from(e: NarrativeError) -> Self {
        match e {
            NarrativeError::NotFound(_) | NarrativeError::NoNarrative { .. } => CliError::NotFound(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LayerError> for CliError {
    fn from(e: LayerError) -> Self {
        match e {
            LayerError::Relatedness(e) => e.into(),
            LayerError::Narrative(e) => e.into(),
            LayerError::NotFound(_) | LayerError::FeatureNotFound(_) => CliError::NotFound(e.to_string()),
            LayerError::NotSpatial(_) | LayerError::BadQuery(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn open(dir: &Path, config: EngineConfig) -> Result<Engine, CliError> {
    if !dir.join(MANIFEST_FILE).exists() {
        return Err(CliError::NotFound(format!("{}: not an index directory", dir.display())));
    }
    Engine::open(dir, config).map_err(Into::into)
}

/// Resolves a user-supplied title through redirects, leaving unknown
/// titles for the callee to reject.
fn resolve(engine: &Engine, raw: &str) -> String {
    let title = eesd_core::corpus::canonical_title(raw);
    engine
        .corpus()
        .resolve(&title)
        .map(|a| a.title.clone())
        .unwrap_or(title)
}

fn catalog(path: Option<&Path>) -> Result<ThemeCatalog, CliError> {
    match path {
        None => Ok(ThemeCatalog::default_catalog()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_error(p, e))?;
            text.parse()
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
        }
    }
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    writeln!(out, "{text}").map_err(|e| CliError::Data(e.to_string()))
}

/// Runs one command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { dump, out: dir, locale } => {
            let locale = LocaleProfile::for_code(&locale)
                .ok_or_else(|| CliError::Usage(format!("unsupported locale {locale:?}")))?;
            if !dump.exists() {
                return Err(CliError::NotFound(format!("{}: no such file", dump.display())));
            }
            let report = ingest(&dump, &dir, &BuildOptions { locale })?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            let c = report.corpus.counts;
            print_json(
                out,
                &json!({
                    "spatial": c.spatial,
                    "nonspatial": c.nonspatial,
                    "temporal": c.temporal,
                    "redirects": c.redirects,
                    "vertices": report.wag.vertex_count(),
                    "edges": report.wag.edge_count(),
                    "warnings": report.warnings.len(),
                }),
            )
        }
        Command::Stats { dir } => {
            let engine = open(&dir, EngineConfig::default())?;
            let manifest = Manifest::read(&dir).map_err(EngineError::from)?;
            print_json(
                out,
                &json!({
                    "language": manifest.language,
                    "counts": manifest.counts,
                    "vertices": engine.wag().vertex_count(),
                    "edges": engine.wag().edge_count(),
                }),
            )
        }
        Command::Relate { dir, a, b, k, lambda } => {
            let defaults = ExploSrConfig::default();
            let explosr = ExploSrConfig {
                max_path_len: k.unwrap_or(defaults.max_path_len),
                length_decay: lambda.unwrap_or(defaults.length_decay),
                ..defaults
            };
            explosr.validate()?;
            let engine = open(&dir, EngineConfig::default())?;
            let (a, b) = (resolve(&engine, &a), resolve(&engine, &b));
            let score = relate(engine.wag(), &a, &b, &explosr)?;
            let body = match explain(engine.corpus(), &score) {
                Ok(e) => explanation_json(&e),
                Err(_) => json!({ "a": score.a, "b": score.b, "value": score.value, "paths": [] }),
            };
            print_json(out, &body)
        }
        Command::Layer {
            kind,
            dir,
            title,
            bbox,
            out: file,
        } => {
            let extent: Extent = bbox
                .parse()
                .map_err(|e| CliError::Usage(format!("bad --bbox {bbox:?}: {e}")))?;
            let engine = open(&dir, EngineConfig::default())?;
            let title = resolve(&engine, &title);
            let layer = match kind {
                LayerArg::Theme => ThemeCache::load(&dir, &engine)?.theme_layer(&engine, &title, &extent)?,
                LayerArg::Entity => entity_layer(&engine, &title, &extent)?,
            };
            std::fs::write(&file, to_canonical_bytes(&export_geojson(&layer))).map_err(|e| io_error(&file, e))?;
            writeln!(out, "wrote {} features to {}", layer.features.len(), file.display())
                .map_err(|e| CliError::Data(e.to_string()))
        }
        Command::Narrate {
            dir,
            a,
            b,
            snippets,
            reverse,
        } => {
            let engine = open(&dir, EngineConfig::default())?;
            let request = NarrativeRequest {
                start: resolve(&engine, &a),
                end: resolve(&engine, &b),
                snippet_count: snippets,
            };
            let config = engine.config().narrative;
            let n = if reverse {
                reverse_narrative(engine.wag(), engine.corpus(), &request, &config)?
            } else {
                generate_narrative(engine.wag(), engine.corpus(), &request, &config)?
            };
            print_json(out, &narrative_json(&n))
        }
        Command::Precompute { dir, themes } => {
            let catalog = catalog(themes.as_deref())?;
            let engine = open(&dir, EngineConfig::default())?;
            let (cache, report) = precompute_themes(&engine, &catalog);
            cache.save(&dir)?;
            print_json(out, &json!({ "cached": report.cached, "skipped": report.skipped }))
        }
        Command::Serve {
            dir,
            port,
            host,
            themes,
        } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|_| CliError::Usage(format!("bad listen address {host}:{port}")))?;
            let catalog = catalog(themes.as_deref())?;
            let engine = open(&dir, EngineConfig::default())?;
            let cache = ThemeCache::load(&dir, &engine)?;
            log::info!("{} cached themes", cache.len());
            let service = Arc::new(Service::new(engine, catalog, cache));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Data(e.to_string()))?;
            runtime
                .block_on(crate::server::serve(service, addr))
                .map_err(|e| CliError::Data(format!("server: {e}")))
        }
    }
}
