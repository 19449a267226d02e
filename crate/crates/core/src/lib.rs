//! Corpus-to-map engine: turns a MediaWiki export into graduated-symbol
//! relatedness layers and point-to-point narratives over geotagged
//! articles, where every value comes with the text that explains it.

pub mod canonical;
pub mod codec;
pub mod corpus;
pub mod engine;
pub mod explosr;
#[doc(hidden)]
pub mod fuzzing;
pub mod layers;
pub mod minotour;
pub mod wag;

pub use engine::{ingest, Engine, EngineConfig, EngineError};
