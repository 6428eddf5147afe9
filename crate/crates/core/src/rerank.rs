//! Strategy dispatch for re-ranking a tf-idf result set.

use thiserror::Error;

use crate::authors::{betweenness, build_coauthor_graph, entry_centrality_keys, rerank_centrality};
use crate::corpus::Corpus;
use crate::index::{ResultSet, Strategy};
use crate::journals::{bradford_partition, entry_zones, journal_productivity, rerank_bradford, Zone};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RerankError {
    #[error("result contains unknown record id {0:?}")]
    UnknownRecord(String),
    #[error("journal {journal:?} of record {id:?} is not in the partition")]
    JournalNotPartitioned { id: String, journal: String },
    #[error("author {author:?} of record {id:?} has no centrality score")]
    AuthorNotScored { id: String, author: String },
}

/// What the re-ranker keyed an entry on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SortKey {
    Score,
    /// `None` for records without a journal.
    Zone(Option<Zone>),
    Centrality(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reranked {
    pub result: ResultSet,
    /// Aligned with `result.entries`.
    pub keys: Vec<SortKey>,
}

/// Re-ranks a result set with the statistics of that same result set.
pub fn rerank(corpus: &Corpus, result: &ResultSet, strategy: Strategy) -> Result<Reranked, RerankError> {
    match strategy {
        Strategy::Tfidf => {
            let mut result = result.clone();
            result.strategy = Strategy::Tfidf;
            let keys = vec![SortKey::Score; result.len()];
            Ok(Reranked { result, keys })
        }
        Strategy::Bradford => {
            let partition = bradford_partition(&journal_productivity(corpus, result)?);
            let result = rerank_bradford(corpus, result, &partition)?;
            let keys = entry_zones(corpus, &result, &partition)?
                .into_iter()
                .map(SortKey::Zone)
                .collect();
            Ok(Reranked { result, keys })
        }
        Strategy::Centrality => {
            let scores = betweenness(&build_coauthor_graph(corpus, result)?);
            let result = rerank_centrality(corpus, result, &scores)?;
            let keys = entry_centrality_keys(corpus, &result, &scores)?
                .into_iter()
                .map(SortKey::Centrality)
                .collect();
            Ok(Reranked { result, keys })
        }
    }
}
