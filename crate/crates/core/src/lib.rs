//! Person-targeting bias analysis for a set of news articles on one event.

pub mod annotate;
pub mod cdcr;
pub mod embedding;
pub mod grouping;
pub mod ingest;
pub mod profiles;
pub mod service;
pub mod tsc;
