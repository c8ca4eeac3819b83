//! Graph analytics for book-rating corpora.
//!
//! Starting from a bipartite user→book rating graph, this crate builds two
//! weighted book–book similarity networks — the *reader* network (who reads
//! what) and the *enjoyment* network (who rates what 4+ stars) — via Jaccard
//! projection, partitions them into communities with resolution-aware
//! Louvain, ranks each community's representative books by weighted degree
//! and eigenvector centrality, measures how subject labels concentrate in
//! communities, and runs a PCA over the community×subject prevalence matrix
//! whose first two dimensions span a maturity/realism-style plane.
//!
//! The `genregraph` binary drives the whole pipeline from TSV files; see the
//! `pipeline` module for the library entry point and `ingest` for the
//! synthetic fixture generator used throughout the test suite.

pub mod centrality;
pub mod community;
pub mod error;
pub mod export;
pub mod ingest;
pub mod model;
pub mod pca;
pub mod pipeline;
pub mod project;
pub mod subjects;

pub use error::{Error, Result};
pub use model::{
    CommunitySubjectMatrix, DuplicatePolicy, IdIndex, Partition, PcaResult, RatingGraph,
    SimilarityGraph, SubjectCatalog,
};
