//! Search term recommendation by co-word analysis.
//!
//! Free-text query tokens are associated with controlled descriptors
//! through 2x2 co-occurrence tables. Candidate descriptors come from the
//! query's result set; the tables are counted over the whole corpus by
//! default (see [`CooccurrenceScope`]). Descriptors are ranked by their
//! strongest association with any query token.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::normalize_descriptor;
use crate::index::{search, Index, Query, ResultSet, SearchError};
use crate::recommend::{top_k, Recommendation, RecommendationKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("co-occurrence scope is empty")]
    EmptyScope,
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Documents over which co-occurrence is counted, as sorted load positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scope {
    docs: Vec<u32>,
}

impl Scope {
    pub fn from_ids<'a>(
        index: &Index,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, SearchError> {
        let mut docs = ids
            .into_iter()
            .map(|id| {
                index
                    .corpus()
                    .position(id)
                    .map(|p| p as u32)
                    .ok_or_else(|| SearchError::UnknownRecord(id.to_owned()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        docs.sort_unstable();
        docs.dedup();
        Ok(Scope { docs })
    }

    pub fn from_result(index: &Index, result: &ResultSet) -> Result<Self, SearchError> {
        Self::from_ids(index, result.ids())
    }

    pub fn docs(&self) -> &[u32] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    fn contains(&self, doc: u32) -> bool {
        self.docs.binary_search(&doc).is_ok()
    }
}

/// Co-occurrence counts of a free term (rows) and a descriptor (columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// both
    pub n11: u64,
    /// free term only
    pub n10: u64,
    /// descriptor only
    pub n01: u64,
    /// neither
    pub n00: u64,
}

impl ContingencyTable {
    pub fn new(n11: u64, n10: u64, n01: u64, n00: u64) -> Self {
        ContingencyTable { n11, n10, n01, n00 }
    }

    pub fn n(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    /// Same table with the two variables swapped.
    pub fn transpose(&self) -> Self {
        ContingencyTable::new(self.n11, self.n01, self.n10, self.n00)
    }
}

pub fn contingency(
    index: &Index,
    scope: &Scope,
    free_term: &str,
    descriptor: &str,
) -> Result<ContingencyTable, TermError> {
    if scope.is_empty() {
        return Err(TermError::EmptyScope);
    }
    let with_term: HashSet<u32> = index
        .postings(free_term)
        .iter()
        .map(|p| p.doc)
        .filter(|&d| scope.contains(d))
        .collect();
    let with_descriptor: HashSet<u32> = index
        .descriptor_postings(&normalize_descriptor(descriptor))
        .iter()
        .copied()
        .filter(|&d| scope.contains(d))
        .collect();
    let n11 = with_term.intersection(&with_descriptor).count() as u64;
    Ok(table_from_counts(
        scope.len() as u64,
        with_term.len() as u64,
        with_descriptor.len() as u64,
        n11,
    ))
}

fn table_from_counts(n: u64, term_docs: u64, descriptor_docs: u64, both: u64) -> ContingencyTable {
    let n10 = term_docs - both;
    let n01 = descriptor_docs - both;
    ContingencyTable::new(both, n10, n01, n - both - n10 - n01)
}

/// `O · ln(O/E)` for one cell with `E = row · col / n`. `O − E` is taken in
/// exact integers so near-independent cells keep full precision.
fn cell_term(observed: u64, row: u64, col: u64, n: u64) -> f64 {
    if observed == 0 {
        return 0.0;
    }
    let rc = row as i128 * col as i128;
    let excess = observed as i128 * n as i128 - rc;
    observed as f64 * (excess as f64 / rc as f64).ln_1p()
}

/// Signed log-likelihood ratio (G²) of a 2x2 table.
///
/// Negative when the pair co-occurs less often than independence predicts.
/// Tables with an empty row or column carry no evidence and score 0.
pub fn llr(table: &ContingencyTable) -> f64 {
    let n = table.n();
    let rows = [table.n11 + table.n10, table.n01 + table.n00];
    let cols = [table.n11 + table.n01, table.n10 + table.n00];
    if n == 0 || rows.contains(&0) || cols.contains(&0) {
        return 0.0;
    }
    let observed = table.n11 as u128 * n as u128;
    let expected = rows[0] as u128 * cols[0] as u128;
    if observed == expected {
        return 0.0;
    }
    let g2 = 2.0
        * (cell_term(table.n11, rows[0], cols[0], n)
            + cell_term(table.n10, rows[0], cols[1], n)
            + cell_term(table.n01, rows[1], cols[0], n)
            + cell_term(table.n00, rows[1], cols[1], n));
    let g2 = g2.max(0.0);
    if observed < expected {
        -g2
    } else {
        g2
    }
}

/// Dice coefficient `2·n11 / (2·n11 + n10 + n01)`, 0 when undefined.
pub fn dice(table: &ContingencyTable) -> f64 {
    let denom = 2 * table.n11 + table.n10 + table.n01;
    if denom == 0 {
        0.0
    } else {
        (2 * table.n11) as f64 / denom as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AssociationMeasure {
    #[default]
    Llr,
    Dice,
}

impl AssociationMeasure {
    pub fn score(self, table: &ContingencyTable) -> f64 {
        match self {
            AssociationMeasure::Llr => llr(table),
            AssociationMeasure::Dice => dice(table),
        }
    }
}

impl fmt::Display for AssociationMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssociationMeasure::Llr => "llr",
            AssociationMeasure::Dice => "dice",
        })
    }
}

impl FromStr for AssociationMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llr" => Ok(AssociationMeasure::Llr),
            "dice" => Ok(AssociationMeasure::Dice),
            other => Err(format!(
                "unknown association measure {other:?} (expected llr or dice)"
            )),
        }
    }
}

/// Which documents the co-occurrence tables are counted over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CooccurrenceScope {
    /// Every indexed record. Candidates still come from the result set.
    #[default]
    Corpus,
    /// Only the query's result set. Every scoped document then matches at
    /// least one query token, so a single-token query yields tables with an
    /// empty row and every candidate scores 0.
    ResultSet,
}

impl FromStr for CooccurrenceScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corpus" => Ok(CooccurrenceScope::Corpus),
            "result_set" => Ok(CooccurrenceScope::ResultSet),
            other => Err(format!(
                "unknown co-occurrence scope {other:?} (expected corpus or result_set)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermOptions {
    pub k: usize,
    /// How many top tf-idf results supply candidate descriptors.
    pub scope_limit: usize,
    /// Minimum number of result-set documents a descriptor must appear in.
    pub min_df_scope: usize,
    pub measure: AssociationMeasure,
    pub cooccurrence: CooccurrenceScope,
}

impl Default for TermOptions {
    fn default() -> Self {
        TermOptions {
            k: 5,
            scope_limit: 500,
            min_df_scope: 2,
            measure: AssociationMeasure::Llr,
            cooccurrence: CooccurrenceScope::Corpus,
        }
    }
}

/// A descriptor scored against the query, before ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct TermCandidate {
    pub key: String,
    pub value: String,
    pub score: f64,
}

/// Scores every descriptor that qualifies as a candidate for `query`.
/// Returned in descriptor-key order.
pub fn score_candidates(
    index: &Index,
    query: &Query,
    opts: &TermOptions,
) -> Result<Vec<TermCandidate>, TermError> {
    if opts.k == 0 {
        return Err(SearchError::InvalidLimit.into());
    }
    let result = search(index, query, opts.scope_limit)?;
    let scope = Scope::from_result(index, &result)?;
    if scope.is_empty() {
        return Ok(Vec::new());
    }
    let in_stats = |doc: u32| match opts.cooccurrence {
        CooccurrenceScope::Corpus => true,
        CooccurrenceScope::ResultSet => scope.contains(doc),
    };
    let n = match opts.cooccurrence {
        CooccurrenceScope::Corpus => index.doc_count(),
        CooccurrenceScope::ResultSet => scope.len(),
    } as u64;

    let mut scoped_df: BTreeMap<&str, usize> = BTreeMap::new();
    for &doc in scope.docs() {
        for key in index.doc_descriptors(doc) {
            *scoped_df.entry(key.as_str()).or_default() += 1;
        }
    }

    let mut free_terms: Vec<&str> = query.free_terms.iter().map(String::as_str).collect();
    free_terms.sort_unstable();
    free_terms.dedup();
    let term_docs: Vec<HashSet<u32>> = free_terms
        .iter()
        .map(|t| {
            index
                .postings(t)
                .iter()
                .map(|p| p.doc)
                .filter(|&d| in_stats(d))
                .collect()
        })
        .collect();

    let mut candidates = Vec::new();
    for (key, df) in scoped_df {
        if df < opts.min_df_scope || free_terms.contains(&key) {
            continue;
        }
        let docs: Vec<u32> = index
            .descriptor_postings(key)
            .iter()
            .copied()
            .filter(|&d| in_stats(d))
            .collect();
        let score = term_docs
            .iter()
            .map(|with_term| {
                let both = docs.iter().filter(|d| with_term.contains(d)).count() as u64;
                let table = table_from_counts(n, with_term.len() as u64, docs.len() as u64, both);
                opts.measure.score(&table)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        candidates.push(TermCandidate {
            key: key.to_owned(),
            value: index.descriptor_display(key).unwrap_or(key).to_owned(),
            score,
        });
    }
    Ok(candidates)
}

/// Top-`k` controlled descriptors for `query`, strongest association first.
/// Shorter than `k` when fewer candidates qualify.
pub fn recommend_terms(
    index: &Index,
    query: &Query,
    opts: &TermOptions,
) -> Result<Vec<Recommendation>, TermError> {
    let candidates = score_candidates(index, query, opts)?;
    Ok(top_k(
        RecommendationKind::Term,
        candidates,
        opts.k,
        |a, b| b.score.total_cmp(&a.score).then_with(|| a.value.cmp(&b.value)),
        |c| (c.value, c.score),
    ))
}
