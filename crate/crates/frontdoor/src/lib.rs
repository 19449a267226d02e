//! Command line and HTTP front end for the corpus-to-map engine.

pub mod cache;
pub mod catalog;
pub mod cli;
pub mod server;
pub mod service;

pub use cache::{precompute_themes, ThemeCache};
pub use catalog::ThemeCatalog;
pub use service::{Response, Service};
