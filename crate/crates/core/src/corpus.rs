//! Bibliographic records and the in-memory corpus.
//!
//! Records are read from JSON-Lines, one object per line. Loading
//! normalizes whitespace in descriptors, authors and journal names and
//! drops duplicate descriptors/authors (compared case-insensitively),
//! keeping the first spelling seen.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: record id must not be empty")]
    EmptyId { line: usize },
    #[error("duplicate record id {id:?} on lines {first_line} and {line}")]
    DuplicateId {
        id: String,
        first_line: usize,
        line: usize,
    },
    #[error("corpus contains no records")]
    Empty,
}

/// One bibliographic document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    /// Controlled-vocabulary terms assigned by indexers.
    #[serde(default)]
    pub descriptors: Vec<String>,
    /// Person names, conventionally "Lastname, Firstname".
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub journal: String,
    /// 0 means unknown.
    #[serde(default)]
    pub year: u32,
}

impl BibRecord {
    pub fn new(id: impl Into<String>, title: impl Into<String>) -> Self {
        BibRecord {
            id: id.into(),
            title: title.into(),
            abstract_text: String::new(),
            descriptors: Vec::new(),
            authors: Vec::new(),
            journal: String::new(),
            year: 0,
        }
    }

    /// Free text the index sees: title and abstract joined by a space.
    pub fn free_text(&self) -> String {
        if self.abstract_text.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.title, self.abstract_text)
        }
    }

    fn normalize(&mut self) {
        self.descriptors = dedup_normalized(&self.descriptors);
        self.authors = dedup_normalized(&self.authors);
        self.journal = collapse_whitespace(&self.journal);
    }
}

fn dedup_normalized(values: &[String]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(values.len());
    for value in values {
        let display = collapse_whitespace(value);
        if display.is_empty() {
            continue;
        }
        if seen.insert(display.to_lowercase()) {
            out.push(display);
        }
    }
    out
}

/// Trims and collapses internal whitespace runs to a single space.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Comparison key for controlled descriptors: whitespace collapsed and case-folded.
pub fn normalize_descriptor(s: &str) -> String {
    collapse_whitespace(s).to_lowercase()
}

/// Canonical identity of an author name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuthorKey(String);

impl AuthorKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for AuthorKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn normalize_author(name: &str) -> AuthorKey {
    AuthorKey(collapse_whitespace(name).to_lowercase())
}

/// Lowercase alphanumeric runs of `text`, in order, duplicates kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone)]
pub struct Corpus {
    records: Vec<BibRecord>,
    by_id: HashMap<String, usize>,
    author_display: HashMap<AuthorKey, String>,
}

impl Corpus {
    /// Builds a corpus from records already in memory, applying the same
    /// normalization and validation as [`load_corpus`]. Line numbers in
    /// errors are 1-based positions in `records`.
    pub fn from_records(records: Vec<BibRecord>) -> Result<Self, CorpusError> {
        let mut builder = CorpusBuilder::default();
        for (i, record) in records.into_iter().enumerate() {
            builder.push(record, i + 1)?;
        }
        builder.finish()
    }

    pub fn records(&self) -> &[BibRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&BibRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    /// Position of `id` in load order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Display spelling of an author: the first spelling seen in load order.
    pub fn author_display(&self, key: &AuthorKey) -> Option<&str> {
        self.author_display.get(key).map(String::as_str)
    }

    /// Writes the corpus back out as JSON-Lines.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct CorpusBuilder {
    records: Vec<BibRecord>,
    by_id: HashMap<String, usize>,
    lines: Vec<usize>,
    author_display: HashMap<AuthorKey, String>,
}

impl CorpusBuilder {
    fn push(&mut self, mut record: BibRecord, line: usize) -> Result<(), CorpusError> {
        if record.id.trim().is_empty() {
            return Err(CorpusError::EmptyId { line });
        }
        if let Some(&prev) = self.by_id.get(&record.id) {
            return Err(CorpusError::DuplicateId {
                id: record.id,
                first_line: self.lines[prev],
                line,
            });
        }
        record.normalize();
        for author in &record.authors {
            self.author_display
                .entry(normalize_author(author))
                .or_insert_with(|| author.clone());
        }
        self.by_id.insert(record.id.clone(), self.records.len());
        self.lines.push(line);
        self.records.push(record);
        Ok(())
    }

    fn finish(self) -> Result<Corpus, CorpusError> {
        if self.records.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Corpus {
            records: self.records,
            by_id: self.by_id,
            author_display: self.author_display,
        })
    }
}

/// Reads JSON-Lines records from `reader`. Blank lines are skipped; line
/// numbers in errors are 1-based physical lines.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut builder = CorpusBuilder::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: BibRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        builder.push(record, line_no)?;
    }
    builder.finish()
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let file = File::open(path)?;
    parse_corpus(BufReader::new(file))
}
