//! Scoring of external representations, controlled synthetic experiments and
//! metric rank comparison on top of `disentangle-core`.

pub mod cli;
pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod registry;
pub mod score;
pub mod summary;
pub mod svg;
