//! Aggregation of collection-level sound recording metadata.
pub mod api;
pub mod cli;
pub mod ingest;
pub mod model;
pub mod search;
pub mod store;
pub mod synth;
