//! `bibrec` command-line front end.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 internal error.

use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bibrec_core::api::{to_json_line, ApiError, Engine, EngineError, SearchRequest, SearchResponse};
use bibrec_core::config::{ConfigError, ServiceConfig};
use bibrec_core::corpus::CorpusError;
use bibrec_core::eval::{render_text, EvalError};
use bibrec_core::synth::{generate, SynthParams};
use bibrec_core::{load_assessments, load_corpus, report, Corpus, RecommendationKind};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bibrec", version, about = "Search term, core journal and central author recommendation over a bibliographic corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a JSONL corpus and report the first problem with its line number.
    Validate { corpus: PathBuf },
    /// Run a ranked search.
    Query {
        corpus: PathBuf,
        #[arg(long)]
        q: String,
        #[arg(long, value_parser = ["tfidf", "bradford", "centrality"])]
        rerank: Option<String>,
        /// Comma-separated descriptors to add to the query.
        #[arg(long)]
        expand: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        json: bool,
        /// Service config supplying scope, boost and stopword settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List term, journal or author recommendations for a query.
    Recommend {
        corpus: PathBuf,
        #[arg(long)]
        q: String,
        #[arg(long, value_parser = ["terms", "journals", "authors"])]
        kind: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compute precision metrics from an assessment CSV.
    Evaluate {
        assessments: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a seeded synthetic corpus as JSONL.
    Synth {
        #[arg(long, default_value_t = 200)]
        docs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn usage(e: impl Display) -> Self {
        Failure::Usage(e.to_string())
    }

    fn internal(e: impl Display) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        match e {
            ApiError::BadRequest(msg) => Failure::Usage(msg),
            ApiError::Internal(msg) => Failure::Internal(msg),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::usage(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::usage(e)
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::usage(e)
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Invalid(diagnostics) => Failure::Usage(
                diagnostics
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            other => Failure::usage(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::internal(e)
    }
}

fn engine_for(corpus: &Path, config: Option<&Path>) -> Result<Engine, Failure> {
    let mut config = match config {
        Some(path) => ServiceConfig::load(path)?,
        None => ServiceConfig::default(),
    };
    config.corpus_path = corpus.to_owned();
    Ok(Engine::from_config(&config)?)
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn truncate(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_owned()
    } else {
        let mut t: String = s.chars().take(width - 3).collect();
        t.push_str("...");
        t
    }
}

fn search_table(resp: &SearchResponse) -> String {
    let mut out = format!("strategy: {}  total: {}\n", resp.strategy.as_str(), resp.total);
    let key_header = match resp.results.first() {
        Some(hit) if hit.zone.is_some() => "zone",
        Some(hit) if hit.centrality_key.is_some() => "centrality",
        _ => "",
    };
    out.push_str(&format!(
        "{:>4}  {:<12}  {:>9}  {:>10}  {:<4}  {:<30}  {}\n",
        "rank", "id", "score", key_header, "year", "journal", "title"
    ));
    for (i, hit) in resp.results.iter().enumerate() {
        let key = match (hit.zone, hit.centrality_key) {
            (Some(Some(z)), _) => z.to_string(),
            (Some(None), _) => "-".to_owned(),
            (None, Some(c)) => format!("{c:.4}"),
            (None, None) => String::new(),
        };
        out.push_str(&format!(
            "{:>4}  {:<12}  {:>9.4}  {:>10}  {:<4}  {:<30}  {}\n",
            i + 1,
            hit.id,
            hit.score,
            key,
            hit.year,
            truncate(&hit.journal, 30),
            hit.title
        ));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { corpus } => {
            let corpus = load_corpus(&corpus)?;
            eprintln!("ok: {} records", corpus.len());
            Ok(())
        }
        Command::Query {
            corpus,
            q,
            rerank,
            expand,
            limit,
            json,
            config,
        } => {
            let req = SearchRequest::from_params(
                Some(&q),
                rerank.as_deref(),
                expand.as_deref(),
                limit.map(|n| n.to_string()).as_deref(),
            )?;
            let engine = engine_for(&corpus, config.as_deref())?;
            let resp = engine.search(&req)?;
            if json {
                emit(&to_json_line(&resp))
            } else {
                emit(&search_table(&resp))
            }
        }
        Command::Recommend {
            corpus,
            q,
            kind,
            k,
            json,
            config,
        } => {
            let kind: RecommendationKind = kind.parse().map_err(Failure::usage)?;
            if q.trim().is_empty() {
                return Err(Failure::usage("--q must not be empty"));
            }
            if k == Some(0) {
                return Err(Failure::usage("--k must be a positive integer"));
            }
            let engine = engine_for(&corpus, config.as_deref())?;
            let resp = engine.recommend(kind, q.trim(), k)?;
            if json {
                emit(&to_json_line(&resp))
            } else {
                let mut out = String::new();
                for item in &resp.recommendations {
                    out.push_str(&format!("{:>2}  {:>10.4}  {}\n", item.rank, item.score, item.value));
                }
                emit(&out)
            }
        }
        Command::Evaluate { assessments, json } => {
            let set = load_assessments(&assessments)?;
            let metrics = report(&set)?;
            if json {
                emit(&to_json_line(&metrics))
            } else {
                emit(&render_text(&metrics))
            }
        }
        Command::Serve { config } => {
            let mut config = ServiceConfig::load(&config)?;
            config.apply_env(|name| std::env::var(name).ok())?;
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .with_writer(io::stderr)
                .init();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime
                .block_on(bibrec_service::serve(config))
                .map_err(|e| match e {
                    bibrec_service::ServeError::Engine(e) => Failure::from(e),
                    other => Failure::internal(other),
                })
        }
        Command::Synth { docs, seed, out } => {
            let corpus = Corpus::from_records(generate(&SynthParams::new(docs, seed)))?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
                    let mut w = BufWriter::new(file);
                    corpus.write_jsonl(&mut w)?;
                    w.flush()?;
                }
                None => {
                    let mut w = BufWriter::new(io::stdout().lock());
                    corpus.write_jsonl(&mut w)?;
                    w.flush()?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
