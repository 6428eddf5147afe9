//! Journal productivity, Bradford zones and the Bradfordizing re-ranker.
//!
//! Journals in a result set are ordered by how many of its documents
//! they published. Walking that list, a journal falls in zone 1 while the
//! documents counted before it are fewer than a third of the total, in
//! zone 2 while fewer than two thirds, and in zone 3 otherwise. A journal
//! is never split across zones.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::index::{ResultSet, ScoredDoc, Strategy};
use crate::recommend::{top_k, Recommendation, RecommendationKind};
use crate::rerank::RerankError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Zone {
    Core = 1,
    Middle = 2,
    Periphery = 3,
}

impl Zone {
    pub fn number(self) -> u8 {
        self as u8
    }
}

impl From<Zone> for u8 {
    fn from(z: Zone) -> u8 {
        z.number()
    }
}

impl TryFrom<u8> for Zone {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            1 => Ok(Zone::Core),
            2 => Ok(Zone::Middle),
            3 => Ok(Zone::Periphery),
            _ => Err(format!("zone must be 1, 2 or 3, got {n}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalCount {
    pub journal: String,
    pub count: u64,
}

impl JournalCount {
    pub fn new(journal: impl Into<String>, count: u64) -> Self {
        JournalCount {
            journal: journal.into(),
            count,
        }
    }
}

fn productivity_order(list: &mut [JournalCount]) {
    list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.journal.cmp(&b.journal)));
}

/// Documents per journal within `result`, most productive first, ties by
/// name. Records without a journal are not counted.
pub fn journal_productivity(
    corpus: &Corpus,
    result: &ResultSet,
) -> Result<Vec<JournalCount>, RerankError> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for id in result.ids() {
        let record = corpus
            .get(id)
            .ok_or_else(|| RerankError::UnknownRecord(id.to_owned()))?;
        if !record.journal.is_empty() {
            *counts.entry(record.journal.as_str()).or_default() += 1;
        }
    }
    let mut list: Vec<JournalCount> = counts
        .into_iter()
        .map(|(j, c)| JournalCount::new(j, c))
        .collect();
    productivity_order(&mut list);
    Ok(list)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BradfordPartition {
    journals: Vec<JournalCount>,
    zones: Vec<Zone>,
    zone_of: HashMap<String, Zone>,
    zone_doc_counts: [u64; 3],
}

impl BradfordPartition {
    /// Journals in productivity order.
    pub fn journals(&self) -> &[JournalCount] {
        &self.journals
    }

    /// Zone of each journal, aligned with [`journals`](Self::journals).
    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn zone_of(&self, journal: &str) -> Option<Zone> {
        self.zone_of.get(journal).copied()
    }

    /// Documents per zone, zone 1 first.
    pub fn zone_doc_counts(&self) -> [u64; 3] {
        self.zone_doc_counts
    }

    pub fn total_docs(&self) -> u64 {
        self.zone_doc_counts.iter().sum()
    }

    pub fn journals_in(&self, zone: Zone) -> impl Iterator<Item = &str> {
        self.journals
            .iter()
            .zip(&self.zones)
            .filter(move |(_, z)| **z == zone)
            .map(|(j, _)| j.journal.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }
}

/// Splits journals into three zones of roughly equal document yield.
///
/// The input is re-sorted into productivity order, so any ordering is
/// accepted. Journals with a zero count are dropped.
pub fn bradford_partition(productivity: &[JournalCount]) -> BradfordPartition {
    let mut journals: Vec<JournalCount> = productivity
        .iter()
        .filter(|j| j.count > 0)
        .cloned()
        .collect();
    productivity_order(&mut journals);
    let total: u64 = journals.iter().map(|j| j.count).sum();

    let mut zones = Vec::with_capacity(journals.len());
    let mut zone_of = HashMap::with_capacity(journals.len());
    let mut zone_doc_counts = [0u64; 3];
    let mut before = 0u64;
    for j in &journals {
        // before < total/3 and before < 2*total/3, kept in integers
        let zone = if 3 * before < total {
            Zone::Core
        } else if 3 * before < 2 * total {
            Zone::Middle
        } else {
            Zone::Periphery
        };
        zones.push(zone);
        zone_of.insert(j.journal.clone(), zone);
        zone_doc_counts[zone as usize - 1] += j.count;
        before += j.count;
    }

    BradfordPartition {
        journals,
        zones,
        zone_of,
        zone_doc_counts,
    }
}

/// Sort key position for a record with no journal: after zone 3.
const NO_JOURNAL: u8 = 4;

/// Zone of each result entry, `None` for records without a journal.
pub fn entry_zones(
    corpus: &Corpus,
    result: &ResultSet,
    partition: &BradfordPartition,
) -> Result<Vec<Option<Zone>>, RerankError> {
    result
        .entries
        .iter()
        .map(|e| {
            let record = corpus
                .get(&e.id)
                .ok_or_else(|| RerankError::UnknownRecord(e.id.clone()))?;
            if record.journal.is_empty() {
                return Ok(None);
            }
            partition
                .zone_of(&record.journal)
                .map(Some)
                .ok_or_else(|| RerankError::JournalNotPartitioned {
                    id: e.id.clone(),
                    journal: record.journal.clone(),
                })
        })
        .collect()
}

/// Reorders `result` by zone, then by its original score, then by id.
/// Scores are carried over untouched.
pub fn rerank_bradford(
    corpus: &Corpus,
    result: &ResultSet,
    partition: &BradfordPartition,
) -> Result<ResultSet, RerankError> {
    let zones = entry_zones(corpus, result, partition)?;
    let mut keyed: Vec<(u8, &ScoredDoc)> = zones
        .into_iter()
        .map(|z| z.map_or(NO_JOURNAL, Zone::number))
        .zip(&result.entries)
        .collect();
    keyed.sort_by(|(za, a), (zb, b)| {
        za.cmp(zb)
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(ResultSet {
        entries: keyed.into_iter().map(|(_, e)| e.clone()).collect(),
        strategy: Strategy::Bradford,
        query: result.query.clone(),
    })
}

/// The `k` most productive journals of `result`; score is the document count.
pub fn recommend_journals(
    corpus: &Corpus,
    result: &ResultSet,
    k: usize,
) -> Result<Vec<Recommendation>, RerankError> {
    let productivity = journal_productivity(corpus, result)?;
    // already in productivity order; a stable sort keeps it
    Ok(top_k(
        RecommendationKind::Journal,
        productivity,
        k,
        |_, _| std::cmp::Ordering::Equal,
        |j| (j.journal, j.count as f64),
    ))
}
