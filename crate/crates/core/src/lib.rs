//! Structural fingerprinting of text corpora.
//!
//! The crate follows a single pipeline: documents are loaded and normalized
//! ([`ingest`]), counted into a sparse term-document matrix, profiled for
//! rank-frequency behaviour ([`stats`]) and frequency-range mass
//! ([`ranges`]), reduced to a nearest-neighbour co-occurrence graph
//! ([`neighbors`]) and drawn with a force-directed layout ([`layout`]).
//! [`compare`] runs the whole chain on two corpora with identical
//! parameters. [`antonyms`] and [`syngen`] are side tools: the first mines
//! lexico-syntactic antonym templates, the second produces uniform random
//! corpora that serve as degenerate baselines.

pub mod antonyms;
pub mod compare;
pub mod datasets;
pub mod error;
pub mod ingest;
pub mod layout;
pub mod neighbors;
pub mod ranges;
pub mod stats;
pub mod svg;
pub mod syngen;
mod tsv;

pub use error::{Error, Result};
pub use ingest::{
    build_matrix, load_corpus, normalize, stem, Corpus, CorpusFormat, Document, Language,
    NormalizationRules, TermDocumentMatrix,
};
pub use neighbors::{knn_graph, CooccurrenceGraph, DataMatrix, ReductionParams, Variant};
