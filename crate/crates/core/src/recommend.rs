use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecommendationKind {
    Term,
    Journal,
    Author,
}

impl RecommendationKind {
    pub const ALL: [RecommendationKind; 3] = [
        RecommendationKind::Term,
        RecommendationKind::Journal,
        RecommendationKind::Author,
    ];

    /// Plural name used in endpoint paths and CLI flags.
    pub fn plural(self) -> &'static str {
        match self {
            RecommendationKind::Term => "terms",
            RecommendationKind::Journal => "journals",
            RecommendationKind::Author => "authors",
        }
    }
}

impl fmt::Display for RecommendationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.plural())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown recommendation kind {0:?} (expected one of: terms, journals, authors)")]
pub struct UnknownKind(pub String);

impl FromStr for RecommendationKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RecommendationKind::ALL
            .into_iter()
            .find(|k| k.plural() == s)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub kind: RecommendationKind,
    pub value: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

/// Sorts candidates with `cmp`, keeps the first `k` and assigns ranks 1..=k.
pub(crate) fn top_k<T>(
    kind: RecommendationKind,
    mut candidates: Vec<T>,
    k: usize,
    cmp: impl Fn(&T, &T) -> Ordering,
    into: impl Fn(T) -> (String, f64),
) -> Vec<Recommendation> {
    candidates.sort_by(cmp);
    candidates
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, c)| {
            let (value, score) = into(c);
            Recommendation {
                kind,
                value,
                score,
                rank: i + 1,
            }
        })
        .collect()
}
