//! Mesh generation, file formats and run configuration.

pub mod config;
pub mod export;
pub mod format;
pub mod generate;
pub mod tess;
