//! Inverted index and tf-idf ranked retrieval.
//!
//! A record's weight for query token `t` is `tf(t, d) * ln(N / df(t))`
//! with raw term frequency and no length normalization. Controlled
//! descriptors in a query's expansion list add a flat `expansion_boost`
//! per descriptor the record carries.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_descriptor, tokenize, BibRecord, Corpus};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("query has no searchable terms")]
    EmptyQuery,
    #[error("limit must be a positive integer")]
    InvalidLimit,
    #[error("unknown record id {0:?}")]
    UnknownRecord(String),
}

/// Occurrence of a token in one record. `doc` is the record's load position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug)]
pub struct Index {
    corpus: Corpus,
    postings: HashMap<String, Vec<Posting>>,
    descriptor_postings: HashMap<String, Vec<u32>>,
    descriptor_display: HashMap<String, String>,
    doc_descriptors: Vec<Vec<String>>,
    stopwords: HashSet<String>,
}

impl Index {
    pub fn build(corpus: Corpus) -> Self {
        Self::build_with_stopwords(corpus, HashSet::new())
    }

    /// Stopwords are matched against lowercased tokens and excluded from
    /// both the postings and parsed queries.
    pub fn build_with_stopwords(corpus: Corpus, stopwords: HashSet<String>) -> Self {
        let stopwords: HashSet<String> = stopwords.iter().map(|w| w.to_lowercase()).collect();
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut descriptor_postings: HashMap<String, Vec<u32>> = HashMap::new();
        let mut descriptor_display = HashMap::new();
        let mut doc_descriptors = Vec::with_capacity(corpus.len());

        for (doc, record) in corpus.records().iter().enumerate() {
            let doc = doc as u32;
            let mut tf: HashMap<String, u32> = HashMap::new();
            for token in tokenize(&record.free_text()) {
                if !stopwords.contains(&token) {
                    *tf.entry(token).or_default() += 1;
                }
            }
            for (token, tf) in tf {
                postings.entry(token).or_default().push(Posting { doc, tf });
            }

            let mut keys: Vec<String> = Vec::with_capacity(record.descriptors.len());
            for descriptor in &record.descriptors {
                let key = normalize_descriptor(descriptor);
                descriptor_display
                    .entry(key.clone())
                    .or_insert_with(|| descriptor.clone());
                keys.push(key);
            }
            keys.sort();
            keys.dedup();
            for key in &keys {
                descriptor_postings.entry(key.clone()).or_default().push(doc);
            }
            doc_descriptors.push(keys);
        }
        // documents are visited in order, so every list is already sorted by doc

        Index {
            corpus,
            postings,
            descriptor_postings,
            descriptor_display,
            doc_descriptors,
            stopwords,
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn doc_count(&self) -> usize {
        self.corpus.len()
    }

    pub fn record(&self, doc: u32) -> &BibRecord {
        &self.corpus.records()[doc as usize]
    }

    pub fn postings(&self, token: &str) -> &[Posting] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn df(&self, token: &str) -> usize {
        self.postings(token).len()
    }

    pub fn idf(&self, token: &str) -> f64 {
        match self.df(token) {
            0 => 0.0,
            df => (self.doc_count() as f64 / df as f64).ln(),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// Records carrying the normalized descriptor `key`, ascending by doc.
    pub fn descriptor_postings(&self, key: &str) -> &[u32] {
        self.descriptor_postings.get(key).map_or(&[], Vec::as_slice)
    }

    /// Normalized descriptor keys of a record, sorted.
    pub fn doc_descriptors(&self, doc: u32) -> &[String] {
        &self.doc_descriptors[doc as usize]
    }

    /// First spelling of a descriptor seen in the corpus.
    pub fn descriptor_display(&self, key: &str) -> Option<&str> {
        self.descriptor_display.get(key).map(String::as_str)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Parses free text into a query, dropping configured stopwords.
    pub fn query(&self, text: &str) -> Query {
        Query::new(
            tokenize(text)
                .into_iter()
                .filter(|t| !self.stopwords.contains(t))
                .collect(),
        )
    }

    fn doc_of(&self, id: &str) -> Result<u32, SearchError> {
        self.corpus
            .position(id)
            .map(|p| p as u32)
            .ok_or_else(|| SearchError::UnknownRecord(id.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub free_terms: Vec<String>,
    pub expansion_terms: Vec<String>,
    pub expansion_boost: f64,
}

impl Query {
    pub const DEFAULT_BOOST: f64 = 1.0;

    pub fn new(free_terms: Vec<String>) -> Self {
        Query {
            free_terms,
            expansion_terms: Vec::new(),
            expansion_boost: Self::DEFAULT_BOOST,
        }
    }

    /// Tokenizes `text` without stopword filtering; see [`Index::query`].
    pub fn parse(text: &str) -> Self {
        Self::new(tokenize(text))
    }

    pub fn with_boost(mut self, boost: f64) -> Self {
        self.expansion_boost = boost;
        self
    }

    pub fn is_searchable(&self) -> bool {
        !self.free_terms.is_empty()
    }
}

/// Adds controlled descriptors to a query. Terms already present (after
/// normalization) are skipped; order of first appearance is kept.
pub fn expand_query<S: AsRef<str>>(query: &Query, terms: &[S]) -> Query {
    let mut expanded = query.clone();
    let mut seen: HashSet<String> = expanded
        .expansion_terms
        .iter()
        .map(|t| normalize_descriptor(t))
        .collect();
    for term in terms {
        let term = term.as_ref();
        let key = normalize_descriptor(term);
        if !key.is_empty() && seen.insert(key) {
            expanded.expansion_terms.push(term.trim().to_owned());
        }
    }
    expanded
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Tfidf,
    Bradford,
    Centrality,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Tfidf, Strategy::Bradford, Strategy::Centrality];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Tfidf => "tfidf",
            Strategy::Bradford => "bradford",
            Strategy::Centrality => "centrality",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown rerank method {0:?} (expected one of: tfidf, bradford, centrality)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownStrategy(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub entries: Vec<ScoredDoc>,
    pub strategy: Strategy,
    pub query: Query,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn truncate(&mut self, limit: usize) {
        self.entries.truncate(limit);
    }
}

/// Score descending, then id ascending.
pub fn by_score_then_id(a: &ScoredDoc, b: &ScoredDoc) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id))
}

fn expansion_keys(query: &Query) -> Vec<String> {
    query
        .expansion_terms
        .iter()
        .map(|t| normalize_descriptor(t))
        .collect()
}

pub fn score(index: &Index, query: &Query, record_id: &str) -> Result<f64, SearchError> {
    let doc = index.doc_of(record_id)?;
    let mut free = 0.0;
    for term in &query.free_terms {
        let postings = index.postings(term);
        if let Ok(pos) = postings.binary_search_by_key(&doc, |p| p.doc) {
            free += postings[pos].tf as f64 * index.idf(term);
        }
    }
    let descriptors = index.doc_descriptors(doc);
    let matched = expansion_keys(query)
        .iter()
        .filter(|k| descriptors.binary_search(k).is_ok())
        .count();
    Ok(combine(free, query.expansion_boost, matched))
}

fn combine(free: f64, boost: f64, matched: usize) -> f64 {
    if matched == 0 {
        free
    } else {
        free + boost * matched as f64
    }
}

/// Ranks every record with a positive score and keeps the top `limit`.
pub fn search(index: &Index, query: &Query, limit: usize) -> Result<ResultSet, SearchError> {
    if !query.is_searchable() {
        return Err(SearchError::EmptyQuery);
    }
    if limit == 0 {
        return Err(SearchError::InvalidLimit);
    }

    let mut free: HashMap<u32, f64> = HashMap::new();
    for term in &query.free_terms {
        let idf = index.idf(term);
        for p in index.postings(term) {
            *free.entry(p.doc).or_default() += p.tf as f64 * idf;
        }
    }
    let mut matched: HashMap<u32, usize> = HashMap::new();
    for key in expansion_keys(query) {
        for &doc in index.descriptor_postings(&key) {
            *matched.entry(doc).or_default() += 1;
        }
    }

    let mut docs: Vec<u32> = free.keys().chain(matched.keys()).copied().collect();
    docs.sort_unstable();
    docs.dedup();

    let mut entries: Vec<ScoredDoc> = docs
        .into_iter()
        .filter_map(|doc| {
            let s = combine(
                free.get(&doc).copied().unwrap_or(0.0),
                query.expansion_boost,
                matched.get(&doc).copied().unwrap_or(0),
            );
            (s > 0.0).then(|| ScoredDoc {
                id: index.record(doc).id.clone(),
                score: s,
            })
        })
        .collect();
    entries.sort_by(by_score_then_id);
    entries.truncate(limit);

    Ok(ResultSet {
        entries,
        strategy: Strategy::Tfidf,
        query: query.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BibRecord;

    fn rec(id: &str, title: &str, descriptors: &[&str]) -> BibRecord {
        let mut r = BibRecord::new(id, title);
        r.descriptors = descriptors.iter().map(|s| s.to_string()).collect();
        r
    }

    fn index_of(records: Vec<BibRecord>) -> Index {
        Index::build(Corpus::from_records(records).unwrap())
    }

    #[test]
    fn single_record_postings() {
        let index = index_of(vec![rec("d1", "data quality", &[])]);
        assert_eq!(index.doc_count(), 1);
        assert_eq!(index.postings("data"), [Posting { doc: 0, tf: 1 }]);
        assert_eq!(index.postings("quality"), [Posting { doc: 0, tf: 1 }]);
    }

    #[test]
    fn token_in_every_record_has_df_n() {
        let index = index_of(vec![
            rec("a", "survey data", &[]),
            rec("b", "panel survey", &[]),
            rec("c", "survey design survey", &[]),
        ]);
        assert_eq!(index.df("survey"), 3);
        assert_eq!(index.df("panel"), 1);
        assert_eq!(index.postings("survey")[2], Posting { doc: 2, tf: 2 });
        assert_eq!(index.idf("survey"), 0.0);
        let s = score(&index, &Query::parse("survey"), "c").unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn nonresponse_contribution() {
        let index = index_of(vec![
            rec("a", "nonresponse nonresponse bias", &[]),
            rec("b", "nonresponse", &[]),
            rec("c", "panel", &[]),
            rec("d", "survey", &[]),
        ]);
        let s = score(&index, &Query::parse("nonresponse"), "a").unwrap();
        assert!((s - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((s - 1.3863).abs() < 1e-4);
        assert_eq!(score(&index, &Query::parse("panel"), "a").unwrap(), 0.0);
        assert_eq!(score(&index, &Query::parse("missing"), "a").unwrap(), 0.0);
    }

    #[test]
    fn unknown_record_is_not_found() {
        let index = index_of(vec![rec("a", "x", &[])]);
        assert_eq!(
            score(&index, &Query::parse("x"), "zz"),
            Err(SearchError::UnknownRecord("zz".into()))
        );
    }

    #[test]
    fn search_errors_and_empty_results() {
        let index = index_of(vec![rec("a", "x y", &[]), rec("b", "y", &[])]);
        assert_eq!(
            search(&index, &Query::new(vec![]), 10),
            Err(SearchError::EmptyQuery)
        );
        assert_eq!(
            search(&index, &Query::parse("x"), 0),
            Err(SearchError::InvalidLimit)
        );
        assert!(search(&index, &Query::parse("nothing"), 10).unwrap().is_empty());
    }

    #[test]
    fn limit_one_keeps_top_record() {
        let index = index_of(vec![
            rec("a", "x", &[]),
            rec("b", "x x", &[]),
            rec("c", "y", &[]),
        ]);
        let result = search(&index, &Query::parse("x"), 1).unwrap();
        assert_eq!(result.ids().collect::<Vec<_>>(), ["b"]);
        assert_eq!(result.strategy, Strategy::Tfidf);
    }

    #[test]
    fn ties_break_by_id() {
        let index = index_of(vec![
            rec("c", "x", &[]),
            rec("a", "x", &[]),
            rec("b", "x", &[]),
            rec("z", "y", &[]),
        ]);
        let result = search(&index, &Query::parse("x"), 10).unwrap();
        assert_eq!(result.ids().collect::<Vec<_>>(), ["a", "b", "c"]);
    }

    #[test]
    fn expansion_union_rule() {
        let q = Query::parse("data");
        assert_eq!(expand_query(&q, &[] as &[&str]), q);
        let twice = expand_query(&expand_query(&q, &["Datenqualität"]), &["Datenqualität"]);
        assert_eq!(twice.expansion_terms, ["Datenqualität"]);
        let ab = expand_query(&expand_query(&q, &["a"]), &["b", "a"]);
        assert_eq!(ab.expansion_terms, ["a", "b"]);
        assert_eq!(ab.free_terms, q.free_terms);
    }

    #[test]
    fn expansion_boost_adds_per_matching_descriptor() {
        let index = index_of(vec![
            rec("a", "data", &["Data Quality", "Survey"]),
            rec("b", "data", &[]),
            rec("c", "other", &["survey"]),
        ]);
        let base = Query::parse("data").with_boost(0.5);
        let before = score(&index, &base, "a").unwrap();
        let q = expand_query(&base, &["data  quality", "survey"]);
        assert!((score(&index, &q, "a").unwrap() - (before + 1.0)).abs() < 1e-12);
        assert_eq!(score(&index, &q, "c").unwrap(), 0.5);
        // expansion-only matches are retrieved
        let result = search(&index, &q, 10).unwrap();
        assert_eq!(result.ids().collect::<Vec<_>>(), ["a", "c", "b"]);
    }

    #[test]
    fn stopwords_are_excluded() {
        let corpus = Corpus::from_records(vec![rec("a", "the survey", &[])]).unwrap();
        let index = Index::build_with_stopwords(corpus, ["The".to_string()].into());
        assert_eq!(index.df("the"), 0);
        assert_eq!(index.query("the survey").free_terms, ["survey"]);
        assert!(index.is_stopword("the"));
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("bradford".parse::<Strategy>(), Ok(Strategy::Bradford));
        assert!("pagerank".parse::<Strategy>().is_err());
    }
}
