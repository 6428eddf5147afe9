//! Request handling shared by the HTTP service and the command line.
//!
//! Both front ends parse their inputs into the request types here and
//! serialize the responses with [`to_json_line`], so equal inputs give
//! byte-identical output.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::authors::recommend_authors;
use crate::config::ServiceConfig;
use crate::corpus::{load_corpus, CorpusError};
use crate::eval::{parse_assessments, report, EvalError, MetricsReport};
use crate::index::{expand_query, search, Index, Query, SearchError, Strategy};
use crate::journals::recommend_journals;
use crate::recommend::{Recommendation, RecommendationKind};
use crate::rerank::{rerank, RerankError, SortKey};
use crate::terms::{recommend_terms, AssociationMeasure, CooccurrenceScope, TermError, TermOptions};

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<RerankError> for ApiError {
    fn from(e: RerankError) -> Self {
        ApiError::Internal(e.to_string())
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::EmptyQuery | SearchError::InvalidLimit => ApiError::BadRequest(e.to_string()),
            SearchError::UnknownRecord(_) => ApiError::Internal(e.to_string()),
        }
    }
}

impl From<TermError> for ApiError {
    fn from(e: TermError) -> Self {
        match e {
            TermError::Search(e) => e.into(),
            TermError::EmptyScope => ApiError::Internal(e.to_string()),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("cannot read stopwords {path}: {source}")]
    Stopwords {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineSettings {
    pub scope_limit: usize,
    pub recommendation_k: usize,
    pub search_limit: usize,
    pub expansion_boost: f64,
    pub association_measure: AssociationMeasure,
    pub cooccurrence: CooccurrenceScope,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings::from(&ServiceConfig::default())
    }
}

impl From<&ServiceConfig> for EngineSettings {
    fn from(c: &ServiceConfig) -> Self {
        EngineSettings {
            scope_limit: c.scope_limit,
            recommendation_k: c.recommendation_k,
            search_limit: c.search_limit,
            expansion_boost: c.expansion_boost,
            association_measure: c.association_measure,
            cooccurrence: c.cooccurrence,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRequest {
    pub q: String,
    pub rerank: Strategy,
    pub expand: Vec<String>,
    pub limit: Option<usize>,
}

impl SearchRequest {
    pub fn new(q: impl Into<String>) -> Self {
        SearchRequest {
            q: q.into(),
            rerank: Strategy::Tfidf,
            expand: Vec::new(),
            limit: None,
        }
    }

    /// Builds a request from raw query-string values.
    pub fn from_params(
        q: Option<&str>,
        rerank: Option<&str>,
        expand: Option<&str>,
        limit: Option<&str>,
    ) -> Result<Self, ApiError> {
        let q = q.unwrap_or("").trim();
        if q.is_empty() {
            return Err(ApiError::BadRequest("parameter q must not be empty".into()));
        }
        let rerank = match rerank.map(str::trim).filter(|s| !s.is_empty()) {
            None => Strategy::Tfidf,
            Some(s) => s.parse().map_err(|e: crate::index::UnknownStrategy| ApiError::BadRequest(e.to_string()))?,
        };
        let limit = match limit.map(str::trim).filter(|s| !s.is_empty()) {
            None => None,
            Some(s) => Some(parse_positive("limit", s)?),
        };
        Ok(SearchRequest {
            q: q.to_owned(),
            rerank,
            expand: expand.map(split_expand).unwrap_or_default(),
            limit,
        })
    }
}

/// Splits a comma-separated descriptor list, dropping empty items.
pub fn split_expand(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn parse_positive(name: &str, value: &str) -> Result<usize, ApiError> {
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(ApiError::BadRequest(format!(
            "parameter {name} must be a positive integer, got {value:?}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub id: String,
    pub title: String,
    pub journal: String,
    pub authors: Vec<String>,
    pub year: u32,
    pub score: f64,
    /// Present for bradford only; `null` for records without a journal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<Option<u8>>,
    /// Present for centrality only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centrality_key: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub strategy: Strategy,
    /// Size of the re-ranked result set before the page limit is applied.
    pub total: usize,
    pub results: Vec<SearchHit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedItem {
    pub value: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    /// `terms`, `journals` or `authors`.
    pub kind: String,
    pub recommendations: Vec<RecommendedItem>,
}

impl RecommendResponse {
    fn new(kind: RecommendationKind, recs: Vec<Recommendation>) -> Self {
        RecommendResponse {
            kind: kind.plural().to_owned(),
            recommendations: recs
                .into_iter()
                .map(|r| RecommendedItem {
                    value: r.value,
                    score: r.score,
                    rank: r.rank,
                })
                .collect(),
        }
    }
}

/// Compact JSON followed by a newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("response types always serialize");
    s.push('\n');
    s
}

/// A loaded corpus and index plus the knobs every request uses.
#[derive(Debug)]
pub struct Engine {
    index: Index,
    settings: EngineSettings,
}

impl Engine {
    pub fn new(index: Index, settings: EngineSettings) -> Self {
        Engine { index, settings }
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Self, EngineError> {
        let corpus = load_corpus(&config.corpus_path)?;
        let stopwords = match &config.stopword_path {
            Some(path) => load_stopwords(path)?,
            None => HashSet::new(),
        };
        Ok(Engine::new(
            Index::build_with_stopwords(corpus, stopwords),
            EngineSettings::from(config),
        ))
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    fn parse_query(&self, q: &str) -> Result<Query, ApiError> {
        let query = self.index.query(q).with_boost(self.settings.expansion_boost);
        if query.is_searchable() {
            Ok(query)
        } else {
            Err(ApiError::BadRequest(format!("query {q:?} has no searchable terms")))
        }
    }

    pub fn search(&self, req: &SearchRequest) -> Result<SearchResponse, ApiError> {
        let query = expand_query(&self.parse_query(&req.q)?, &req.expand);
        let limit = req.limit.unwrap_or(self.settings.search_limit);
        if limit == 0 {
            return Err(SearchError::InvalidLimit.into());
        }
        let result = search(&self.index, &query, self.settings.scope_limit)?;
        let reranked = rerank(self.index.corpus(), &result, req.rerank)?;
        let total = reranked.result.len();
        let results = reranked
            .result
            .entries
            .iter()
            .zip(&reranked.keys)
            .take(limit)
            .map(|(entry, key)| {
                let record = self
                    .index
                    .corpus()
                    .get(&entry.id)
                    .ok_or_else(|| ApiError::Internal(format!("missing record {}", entry.id)))?;
                let (zone, centrality_key) = match *key {
                    SortKey::Score => (None, None),
                    SortKey::Zone(z) => (Some(z.map(|z| z.number())), None),
                    SortKey::Centrality(c) => (None, Some(c)),
                };
                Ok(SearchHit {
                    id: record.id.clone(),
                    title: record.title.clone(),
                    journal: record.journal.clone(),
                    authors: record.authors.clone(),
                    year: record.year,
                    score: entry.score,
                    zone,
                    centrality_key,
                })
            })
            .collect::<Result<Vec<_>, ApiError>>()?;
        Ok(SearchResponse {
            strategy: reranked.result.strategy,
            total,
            results,
        })
    }

    /// `k` defaults to the configured recommendation length.
    pub fn recommend(
        &self,
        kind: RecommendationKind,
        q: &str,
        k: Option<usize>,
    ) -> Result<RecommendResponse, ApiError> {
        let k = k.unwrap_or(self.settings.recommendation_k);
        if k == 0 {
            return Err(ApiError::BadRequest("parameter k must be a positive integer".into()));
        }
        let query = self.parse_query(q)?;
        let recs = match kind {
            RecommendationKind::Term => recommend_terms(
                &self.index,
                &query,
                &TermOptions {
                    k,
                    scope_limit: self.settings.scope_limit,
                    min_df_scope: TermOptions::default().min_df_scope,
                    measure: self.settings.association_measure,
                    cooccurrence: self.settings.cooccurrence,
                },
            )?,
            RecommendationKind::Journal => {
                let result = search(&self.index, &query, self.settings.scope_limit)?;
                recommend_journals(self.index.corpus(), &result, k)?
            }
            RecommendationKind::Author => {
                let result = search(&self.index, &query, self.settings.scope_limit)?;
                recommend_authors(self.index.corpus(), &result, k)?
            }
        };
        Ok(RecommendResponse::new(kind, recs))
    }
}

/// Parses and reports an assessment CSV upload.
pub fn evaluate_csv(bytes: &[u8]) -> Result<MetricsReport, EvalError> {
    report(&parse_assessments(bytes)?)
}

/// One stopword per line; blank lines and `#` comments ignored.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>, EngineError> {
    let text = std::fs::read_to_string(path).map_err(|source| EngineError::Stopwords {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}
