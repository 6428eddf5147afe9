//! Precision of recommendation lists from binary relevance assessments.
//!
//! Each (topic, service) pair is one assessed list. Precision is computed
//! per list and then macro-averaged over topics, overall and per
//! researcher type. Reports keep full-precision values; rounding happens
//! only when rendering text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HEADER: [&str; 7] = [
    "topic_id",
    "researcher_id",
    "researcher_type",
    "service",
    "rank",
    "recommendation",
    "relevant",
];

/// Cut-offs reported for every service.
pub const CUTOFFS: [usize; 3] = [1, 2, 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// 1-based line in the CSV file, when the problem is tied to one row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read assessments: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid assessments: {}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("no assessments")]
    Empty,
    #[error("precision is undefined for an empty list")]
    UndefinedPrecision,
}

fn join_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Service {
    Str,
    Jnr,
    Anr,
}

impl Service {
    pub const ALL: [Service; 3] = [Service::Str, Service::Jnr, Service::Anr];

    pub fn as_str(self) -> &'static str {
        match self {
            Service::Str => "STR",
            Service::Jnr => "JNR",
            Service::Anr => "ANR",
        }
    }
}

impl fmt::Display for Service {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Service {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Service::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown service {s:?} (expected STR, JNR or ANR)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResearcherType {
    Practitioner,
    Phd,
    Postdoc,
}

impl ResearcherType {
    pub const ALL: [ResearcherType; 3] = [
        ResearcherType::Practitioner,
        ResearcherType::Phd,
        ResearcherType::Postdoc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResearcherType::Practitioner => "practitioner",
            ResearcherType::Phd => "phd",
            ResearcherType::Postdoc => "postdoc",
        }
    }

    fn group_label(self) -> &'static str {
        match self {
            ResearcherType::Practitioner => "Practitioners",
            ResearcherType::Phd => "PhD students",
            ResearcherType::Postdoc => "Postdocs",
        }
    }
}

impl FromStr for ResearcherType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResearcherType::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown researcher_type {s:?} (expected practitioner, phd or postdoc)")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assessment {
    pub topic_id: String,
    pub researcher_id: String,
    pub researcher_type: ResearcherType,
    pub service: Service,
    /// 1-based position in the assessed list.
    pub rank: usize,
    pub recommendation: String,
    pub relevant: bool,
}

fn parse_relevant(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(format!("relevant must be true/false or 1/0, got {s:?}")),
    }
}

/// Validated assessments, kept in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentSet {
    assessments: Vec<Assessment>,
}

type ListKey = (String, Service);

impl AssessmentSet {
    /// Validates that every (topic, service) list has ranks 1..=m without
    /// gaps or repeats and a single assessor.
    pub fn new(assessments: Vec<Assessment>) -> Result<Self, EvalError> {
        let set = AssessmentSet { assessments };
        let diagnostics = set.validate();
        if diagnostics.is_empty() {
            Ok(set)
        } else {
            Err(EvalError::Invalid(diagnostics))
        }
    }

    fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        for ((topic, service), list) in self.lists() {
            let mut seen = BTreeSet::new();
            for a in &list {
                if a.rank == 0 {
                    diagnostics.push(Diagnostic {
                        line: None,
                        message: format!("rank 0 in (topic {topic:?}, service {service}); ranks start at 1"),
                    });
                } else if !seen.insert(a.rank) {
                    diagnostics.push(Diagnostic {
                        line: None,
                        message: format!("duplicate rank {} in (topic {topic:?}, service {service})", a.rank),
                    });
                }
            }
            if let Some(missing) = (1..=seen.len()).find(|r| !seen.contains(r)) {
                diagnostics.push(Diagnostic {
                    line: None,
                    message: format!(
                        "rank gap in (topic {topic:?}, service {service}): rank {missing} is missing"
                    ),
                });
            }
            let first = list[0];
            if list
                .iter()
                .any(|a| a.researcher_id != first.researcher_id || a.researcher_type != first.researcher_type)
            {
                diagnostics.push(Diagnostic {
                    line: None,
                    message: format!(
                        "(topic {topic:?}, service {service}) mixes researchers or researcher types"
                    ),
                });
            }
        }
        diagnostics
    }

    pub fn assessments(&self) -> &[Assessment] {
        &self.assessments
    }

    pub fn len(&self) -> usize {
        self.assessments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assessments.is_empty()
    }

    /// Assessed lists keyed by (topic, service), each sorted by rank.
    pub fn lists(&self) -> BTreeMap<ListKey, Vec<&Assessment>> {
        let mut lists: BTreeMap<ListKey, Vec<&Assessment>> = BTreeMap::new();
        for a in &self.assessments {
            lists
                .entry((a.topic_id.clone(), a.service))
                .or_default()
                .push(a);
        }
        for list in lists.values_mut() {
            list.sort_by_key(|a| a.rank);
        }
        lists
    }
}

/// Parses assessment CSV. All row and list problems are collected before
/// failing.
pub fn parse_assessments<R: Read>(reader: R) -> Result<AssessmentSet, EvalError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers().map_err(csv_error)?.clone();
    let mut columns = [0usize; HEADER.len()];
    let mut missing = Vec::new();
    for (slot, name) in columns.iter_mut().zip(HEADER) {
        match headers.iter().position(|h| h == name) {
            Some(i) => *slot = i,
            None => missing.push(name),
        }
    }
    if !missing.is_empty() {
        return Err(EvalError::Invalid(vec![Diagnostic {
            line: Some(1),
            message: format!("header is missing column(s): {}", missing.join(", ")),
        }]));
    }

    let mut assessments = Vec::new();
    let mut diagnostics = Vec::new();
    for row in csv.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    line: e.position().map(|p| p.line()),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line());
        let field = |i: usize| row.get(columns[i]).unwrap_or("");
        let parsed = (|| -> Result<Assessment, String> {
            let topic_id = field(0).to_owned();
            if topic_id.is_empty() {
                return Err("topic_id is empty".into());
            }
            Ok(Assessment {
                topic_id,
                researcher_id: field(1).to_owned(),
                researcher_type: field(2).parse()?,
                service: field(3).parse()?,
                rank: field(4)
                    .parse()
                    .map_err(|_| format!("rank must be a positive integer, got {:?}", field(4)))?,
                recommendation: field(5).to_owned(),
                relevant: parse_relevant(field(6))?,
            })
        })();
        match parsed {
            Ok(a) => assessments.push(a),
            Err(message) => diagnostics.push(Diagnostic { line, message }),
        }
    }
    if !diagnostics.is_empty() {
        return Err(EvalError::Invalid(diagnostics));
    }
    if assessments.is_empty() {
        return Err(EvalError::Empty);
    }
    AssessmentSet::new(assessments)
}

fn csv_error(e: csv::Error) -> EvalError {
    EvalError::Invalid(vec![Diagnostic {
        line: e.position().map(|p| p.line()),
        message: e.to_string(),
    }])
}

pub fn load_assessments(path: impl AsRef<Path>) -> Result<AssessmentSet, EvalError> {
    parse_assessments(File::open(path)?)
}

/// Writes assessments as CSV with the standard header.
pub fn write_assessments<W: std::io::Write>(assessments: &[Assessment], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for a in assessments {
        w.write_record([
            a.topic_id.as_str(),
            a.researcher_id.as_str(),
            a.researcher_type.as_str(),
            a.service.as_str(),
            &a.rank.to_string(),
            a.recommendation.as_str(),
            if a.relevant { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Share of relevant items in one assessed list.
pub fn topic_precision<A: std::borrow::Borrow<Assessment>>(list: &[A]) -> Result<f64, EvalError> {
    if list.is_empty() {
        return Err(EvalError::UndefinedPrecision);
    }
    let relevant = list.iter().filter(|a| a.borrow().relevant).count();
    Ok(relevant as f64 / list.len() as f64)
}

/// Precision over ranks `1..=min(k, highest rank present)`, so short
/// lists are measured over what they have rather than padded.
pub fn p_at_k<A: std::borrow::Borrow<Assessment>>(list: &[A], k: usize) -> Result<f64, EvalError> {
    let max_rank = list
        .iter()
        .map(|a| a.borrow().rank)
        .max()
        .ok_or(EvalError::UndefinedPrecision)?;
    let cutoff = k.min(max_rank);
    let head: Vec<&Assessment> = list
        .iter()
        .map(|a| a.borrow())
        .filter(|a| a.rank <= cutoff)
        .collect();
    topic_precision(&head)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceMetrics {
    /// Number of topics with an assessed list for this service.
    pub topics: usize,
    pub p_av: f64,
    pub p_at_1: f64,
    pub p_at_2: f64,
    pub p_at_4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub researchers: usize,
    pub p_av: BTreeMap<Service, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub researchers: usize,
    pub topics: usize,
    pub assessments: BTreeMap<Service, usize>,
    /// Assessments per topic that has the service, unrounded.
    pub mean_per_topic: BTreeMap<Service, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub services: BTreeMap<Service, ServiceMetrics>,
    pub researcher_types: BTreeMap<ResearcherType, GroupMetrics>,
    pub descriptive: Descriptive,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn report(set: &AssessmentSet) -> Result<MetricsReport, EvalError> {
    if set.is_empty() {
        return Err(EvalError::Empty);
    }
    let lists = set.lists();

    let mut per_service: BTreeMap<Service, Vec<&Vec<&Assessment>>> = BTreeMap::new();
    for ((_, service), list) in &lists {
        per_service.entry(*service).or_default().push(list);
    }

    let mut services = BTreeMap::new();
    for (service, lists) in &per_service {
        let precision = |f: &dyn Fn(&[&Assessment]) -> Result<f64, EvalError>| {
            lists
                .iter()
                .map(|l| f(l))
                .collect::<Result<Vec<_>, _>>()
                .map(|v| mean(&v))
        };
        services.insert(
            *service,
            ServiceMetrics {
                topics: lists.len(),
                p_av: precision(&|l| topic_precision(l))?,
                p_at_1: precision(&|l| p_at_k(l, 1))?,
                p_at_2: precision(&|l| p_at_k(l, 2))?,
                p_at_4: precision(&|l| p_at_k(l, 4))?,
            },
        );
    }

    let mut researcher_types = BTreeMap::new();
    for rtype in ResearcherType::ALL {
        let researchers: BTreeSet<&str> = set
            .assessments()
            .iter()
            .filter(|a| a.researcher_type == rtype)
            .map(|a| a.researcher_id.as_str())
            .collect();
        if researchers.is_empty() {
            continue;
        }
        let mut p_av = BTreeMap::new();
        for (service, lists) in &per_service {
            let precisions = lists
                .iter()
                .filter(|l| l[0].researcher_type == rtype)
                .map(|l| topic_precision(l))
                .collect::<Result<Vec<_>, _>>()?;
            if !precisions.is_empty() {
                p_av.insert(*service, mean(&precisions));
            }
        }
        researcher_types.insert(
            rtype,
            GroupMetrics {
                researchers: researchers.len(),
                p_av,
            },
        );
    }

    let researchers: BTreeSet<&str> = set
        .assessments()
        .iter()
        .map(|a| a.researcher_id.as_str())
        .collect();
    let topics: BTreeSet<&str> = set.assessments().iter().map(|a| a.topic_id.as_str()).collect();
    let mut assessments = BTreeMap::new();
    let mut mean_per_topic = BTreeMap::new();
    for (service, lists) in &per_service {
        let count: usize = lists.iter().map(|l| l.len()).sum();
        assessments.insert(*service, count);
        mean_per_topic.insert(*service, count as f64 / lists.len() as f64);
    }

    Ok(MetricsReport {
        services,
        researcher_types,
        descriptive: Descriptive {
            researchers: researchers.len(),
            topics: topics.len(),
            assessments,
            mean_per_topic,
        },
    })
}

/// Formats `x` with `decimals` places, rounding halves upward.
pub fn round_half_up(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    // absorb representation error such as 0.7425 being stored as 0.74249999...
    let scaled = (x * scale * (1.0 + 1e-12) + 0.5).floor();
    format!("{:.*}", decimals, scaled / scale)
}

fn render_rows(title: &str, rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn header_row(first: &str) -> Vec<String> {
    std::iter::once(first.to_owned())
        .chain(Service::ALL.iter().map(|s| s.to_string()))
        .collect()
}

fn service_cells(value: impl Fn(Service) -> Option<String>) -> impl Iterator<Item = String> {
    Service::ALL
        .into_iter()
        .map(move |s| value(s).unwrap_or_else(|| "-".to_owned()))
}

/// Assessment counts: researchers, topics, and assessments per service.
pub fn render_descriptive(report: &MetricsReport) -> String {
    let d = &report.descriptive;
    let mut head = vec!["".to_owned(), "Researchers".to_owned(), "Topics".to_owned()];
    head.extend(Service::ALL.iter().map(|s| format!("{s} A.")));
    let mut counts = vec![
        "Assessments".to_owned(),
        d.researchers.to_string(),
        d.topics.to_string(),
    ];
    counts.extend(service_cells(|s| d.assessments.get(&s).map(usize::to_string)));
    let mut per_topic = vec!["Per topic".to_owned(), String::new(), String::new()];
    per_topic.extend(service_cells(|s| {
        d.mean_per_topic.get(&s).map(|m| round_half_up(*m, 1))
    }));
    render_rows("Assessment statistics", &[head, counts, per_topic])
}

/// Average precision and P@1/P@2/P@4, one column per service.
pub fn render_precision(report: &MetricsReport) -> String {
    type Metric = fn(&ServiceMetrics) -> f64;
    let rows: [(&str, Metric); 4] = [
        ("P(av)", |m| m.p_av),
        ("P@1", |m| m.p_at_1),
        ("P@2", |m| m.p_at_2),
        ("P@4", |m| m.p_at_4),
    ];
    let mut table = vec![header_row("")];
    for (label, get) in rows {
        let mut row = vec![label.to_owned()];
        row.extend(service_cells(|s| {
            report.services.get(&s).map(|m| round_half_up(get(m), 3))
        }));
        table.push(row);
    }
    render_rows("Precision by service", &table)
}

/// Average precision per researcher type.
pub fn render_researcher_types(report: &MetricsReport) -> String {
    let mut table = vec![header_row("")];
    for (rtype, group) in &report.researcher_types {
        let mut row = vec![format!(
            "P(av) {} (N={})",
            rtype.group_label(),
            group.researchers
        )];
        row.extend(service_cells(|s| {
            group.p_av.get(&s).map(|p| round_half_up(*p, 3))
        }));
        table.push(row);
    }
    render_rows("Average precision by researcher type", &table)
}

/// All three tables separated by blank lines.
pub fn render_text(report: &MetricsReport) -> String {
    [
        render_descriptive(report),
        render_precision(report),
        render_researcher_types(report),
    ]
    .join("\n")
}
