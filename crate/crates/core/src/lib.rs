//! Bibliometric-enhanced scholarly retrieval.
//!
//! A JSON-Lines corpus of bibliographic records is indexed for tf-idf
//! search. On top of a query's result set the crate provides
//!
//! - controlled search term suggestions from co-word association
//!   ([`terms`]),
//! - core journal suggestions and Bradford-zone re-ranking ([`journals`]),
//! - central author suggestions and betweenness re-ranking ([`authors`]),
//!
//! and an evaluation harness computing precision and P@k over binary
//! relevance assessments of such suggestions ([`eval`]).
//!
//! [`api::Engine`] ties these together behind the request/response types
//! used by the HTTP service and the command line.

pub mod api;
pub mod authors;
pub mod config;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod journals;
pub mod recommend;
pub mod rerank;
pub mod synth;
pub mod terms;

pub use api::{Engine, EngineSettings, SearchRequest};
pub use authors::{betweenness, build_coauthor_graph, recommend_authors, rerank_centrality, CentralityScores, CoauthorGraph};
pub use config::ServiceConfig;
pub use corpus::{load_corpus, normalize_author, tokenize, AuthorKey, BibRecord, Corpus, CorpusError};
pub use eval::{load_assessments, p_at_k, report, topic_precision, Assessment, AssessmentSet, MetricsReport, ResearcherType, Service};
pub use index::{expand_query, score, search, Index, Query, ResultSet, ScoredDoc, SearchError, Strategy};
pub use journals::{bradford_partition, journal_productivity, recommend_journals, rerank_bradford, BradfordPartition, JournalCount, Zone};
pub use recommend::{Recommendation, RecommendationKind};
pub use rerank::{rerank, RerankError};
pub use terms::{contingency, llr, recommend_terms, AssociationMeasure, ContingencyTable, Scope, TermOptions};
