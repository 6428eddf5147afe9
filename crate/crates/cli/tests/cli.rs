use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bibrec_core::synth::{assessment_study, generate, StudyShape, SynthParams};
use bibrec_core::Corpus;

fn bibrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibrec"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let corpus = Corpus::from_records(generate(&SynthParams::new(120, 9))).unwrap();
    corpus.write_jsonl(std::fs::File::create(&path).unwrap()).unwrap();
    path
}

#[test]
fn validate_accepts_good_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let out = bibrec(&["validate", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn validate_reports_duplicate_id() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.jsonl");
    std::fs::write(
        &path,
        "{\"id\":\"a\",\"title\":\"x\"}\n{\"id\":\"b\",\"title\":\"y\"}\n{\"id\":\"a\",\"title\":\"z\"}\n",
    )
    .unwrap();
    let out = bibrec(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("\"a\"") && err.contains('1') && err.contains('3'), "{err}");
}

#[test]
fn validate_rejects_empty_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(bibrec(&["validate", empty.to_str().unwrap()]).status.code(), Some(1));

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"a\",\"title\":\"x\"}\nnot json\n").unwrap();
    let out = bibrec(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let missing = dir.path().join("missing.jsonl");
    assert_eq!(bibrec(&["validate", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn query_limit_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let c = corpus.to_str().unwrap();

    let out = bibrec(&["query", c, "--q", "survey", "--limit", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
    assert!(stdout(&out).ends_with('\n'));

    let out = bibrec(&["query", c, "--q", "survey", "--limit", "1"]);
    assert_eq!(stdout(&out).lines().count(), 3, "{}", stdout(&out));

    let out = bibrec(&["query", c, "--q", "survey", "--rerank", "pagerank"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("tfidf") && err.contains("bradford") && err.contains("centrality"), "{err}");

    assert_eq!(bibrec(&["query", c, "--q", ""]).status.code(), Some(1));
    assert_eq!(bibrec(&["query", c]).status.code(), Some(1));
    assert_eq!(bibrec(&["query", c, "--q", "x", "--limit", "0"]).status.code(), Some(1));
}

#[test]
fn recommend_default_k_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let c = corpus.to_str().unwrap();

    let out = bibrec(&["recommend", c, "--q", "urban", "--kind", "journals", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "journals");
    assert!(v["recommendations"].as_array().unwrap().len() <= 5);

    let out = bibrec(&["recommend", c, "--q", "zzzunknownzzz", "--kind", "authors"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "");

    assert_eq!(
        bibrec(&["recommend", c, "--q", "urban", "--kind", "people"]).status.code(),
        Some(1)
    );
}

#[test]
fn query_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let config = dir.path().join("bibrec.toml");
    std::fs::write(&config, "search_limit = 2\nstopword_path = \"stop.txt\"\n").unwrap();
    std::fs::write(dir.path().join("stop.txt"), "# ignored\nsurvey\n").unwrap();
    let c = corpus.to_str().unwrap();
    let cfg = config.to_str().unwrap();

    let out = bibrec(&["query", c, "--q", "urban", "--json", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 2);

    let out = bibrec(&["query", c, "--q", "survey", "--json", "--config", cfg]);
    assert_eq!(out.status.code(), Some(1), "only stopwords left");

    std::fs::write(&config, "nonsense = 1\n").unwrap();
    assert_eq!(bibrec(&["query", c, "--q", "urban", "--config", cfg]).status.code(), Some(1));
}

#[test]
fn evaluate_text_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    bibrec_core::eval::write_assessments(
        &assessment_study(&StudyShape::default(), 1),
        std::fs::File::create(&csv).unwrap(),
    )
    .unwrap();
    let out = bibrec(&["evaluate", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("STR  ") && text.contains("JNR") && text.contains("ANR"), "{text}");
    assert!(text.contains("P@4") && text.contains("Postdocs (N=3)"), "{text}");
    assert!(text.contains("4.1     4.8     4.7"), "{text}");

    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "topic_id,researcher_id,researcher_type,service,rank,recommendation,relevant\nt1,r1,phd,STR,1,a,maybe\n",
    )
    .unwrap();
    let out = bibrec(&["evaluate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bibrec(&["--help"]).status.code(), Some(0));
    assert_eq!(bibrec(&["--version"]).status.code(), Some(0));
    assert_eq!(bibrec(&[]).status.code(), Some(1));
    assert_eq!(bibrec(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn synth_is_seeded() {
    let a = bibrec(&["synth", "--docs", "20", "--seed", "4"]);
    let b = bibrec(&["synth", "--docs", "20", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 20);
}
