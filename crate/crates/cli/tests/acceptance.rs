//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p bibrec-cli --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use bibrec_core::api::{Engine, EngineSettings};
use bibrec_core::authors::betweenness_raw;
use bibrec_core::corpus::normalize_descriptor;
use bibrec_core::eval::{parse_assessments, render_precision, Descriptive, ServiceMetrics};
use bibrec_core::rerank::SortKey;
use bibrec_core::synth::{assessment_study, generate, StudyShape, SynthParams};
use bibrec_core::{
    betweenness, bradford_partition, expand_query, llr, p_at_k, report, rerank, score, search,
    tokenize, AssessmentSet, CoauthorGraph, ContingencyTable, Corpus, Index, JournalCount,
    MetricsReport, Query, Service, Strategy, Zone,
};
use bibrec_oracles::{betweenness as bc_oracle, g2 as g2_oracle, tfidf as tfidf_oracle};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

/// Absolute tolerance for every floating-point comparison against an oracle.
const TOL: f64 = 1e-9;
const RANDOM_GRAPHS: usize = 150;
const MAX_NODES: usize = 12;
const BETWEENNESS_BUDGET: Duration = Duration::from_secs(10);
const RANDOM_PRODUCTIVITY_LISTS: usize = 200;
const RANDOM_TABLES: usize = 300;
const TFIDF_DOCS: usize = 50;
const EQUIVALENCE_DOCS: usize = 200;
const EQUIVALENCE_SEED: u64 = 2014;
const QUERIES: [&str; 5] = [
    "data quality",
    "survey nonresponse",
    "urban housing segregation",
    "party democracy",
    "atypical employment",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type ClosedForm = (&'static str, usize, Vec<(usize, usize)>, Vec<f64>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn random_graph(rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    let n = rng.random_range(1..=MAX_NODES);
    let density = [0.1, 0.25, 0.5, 0.8][rng.random_range(0..4)];
    // the last `isolated` nodes get no edges
    let isolated = if n > 2 { rng.random_range(0..=n / 3) } else { 0 };
    let mut edges = Vec::new();
    for a in 0..n - isolated {
        for b in a + 1..n - isolated {
            if rng.random_bool(density) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

fn graph(n: usize, edges: &[(usize, usize)]) -> CoauthorGraph {
    let names: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    CoauthorGraph::from_edges(&names, edges)
}

fn betweenness_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut with_isolated = 0;
    for case in 0..RANDOM_GRAPHS {
        let (n, edges) = random_graph(&mut rng);
        let adj = bc_oracle::adjacency(n, &edges);
        if adj.iter().any(Vec::is_empty) {
            with_isolated += 1;
        }
        let want_raw = bc_oracle::raw(&adj);
        let got_raw = betweenness_raw(&adj);
        let want = bc_oracle::normalized(&adj);
        let got = betweenness(&graph(n, &edges));
        for v in 0..n {
            ensure!(
                close(got_raw[v], want_raw[v]),
                "graph {case} node {v}: raw {} vs oracle {}",
                got_raw[v],
                want_raw[v]
            );
            ensure!(
                close(got.values()[v], want[v]),
                "graph {case} node {v}: normalized {} vs oracle {}",
                got.values()[v],
                want[v]
            );
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < BETWEENNESS_BUDGET, "took {elapsed:?}");
    ensure!(with_isolated > 0, "no graph had isolated nodes");
    Ok(format!(
        "{RANDOM_GRAPHS} graphs, {with_isolated} with isolated nodes, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn betweenness_closed_forms() -> Outcome {
    let cases: [ClosedForm; 3] = [
        ("P3", 3, vec![(0, 1), (1, 2)], vec![0.0, 1.0, 0.0]),
        ("K1,3", 4, vec![(0, 1), (0, 2), (0, 3)], vec![1.0, 0.0, 0.0, 0.0]),
        ("C4", 4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], vec![1.0 / 6.0; 4]),
    ];
    for (name, n, edges, want) in cases {
        let got = betweenness(&graph(n, &edges));
        for (v, (g, w)) in got.values().iter().zip(&want).enumerate() {
            ensure!(close(*g, *w), "{name} node {v}: {g} vs {w}");
        }
    }
    Ok("P3, star, 4-cycle".into())
}

/// Minimal prefix length whose cumulative count reaches `num/den` of `total`.
fn min_prefix(counts: &[u64], total: u64, num: u64, den: u64) -> usize {
    let mut acc = 0;
    for (i, c) in counts.iter().enumerate() {
        if den * acc >= num * total {
            return i;
        }
        acc += c;
    }
    counts.len()
}

fn check_partition(input: &[JournalCount]) -> Result<(), String> {
    let p = bradford_partition(input);
    let mut expected: Vec<JournalCount> = input.iter().filter(|j| j.count > 0).cloned().collect();
    expected.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.journal.cmp(&b.journal)));
    ensure!(p.journals() == expected.as_slice(), "journal order {:?}", p.journals());
    ensure!(p.zones().len() == expected.len(), "zone count mismatch");
    for j in &expected {
        ensure!(p.zone_of(&j.journal).is_some(), "journal {} has no zone", j.journal);
    }
    ensure!(
        p.zones().windows(2).all(|w| w[0] <= w[1]),
        "zones not ordered: {:?}",
        p.zones()
    );
    let counts: Vec<u64> = expected.iter().map(|j| j.count).collect();
    let total: u64 = counts.iter().sum();
    let end1 = min_prefix(&counts, total, 1, 3);
    let end2 = min_prefix(&counts, total, 2, 3);
    for (i, zone) in p.zones().iter().enumerate() {
        let want = if i < end1 {
            Zone::Core
        } else if i < end2 {
            Zone::Middle
        } else {
            Zone::Periphery
        };
        ensure!(*zone == want, "journal {i} in {zone:?}, boundary rule says {want:?}");
    }
    let doc_counts = p.zone_doc_counts();
    ensure!(doc_counts.iter().sum::<u64>() == total, "zone doc counts {doc_counts:?}");
    Ok(())
}

fn bradford() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..RANDOM_PRODUCTIVITY_LISTS {
        let n = rng.random_range(0..25);
        let max = [1, 3, 10, 60][rng.random_range(0..4)];
        let list: Vec<JournalCount> = (0..n)
            .map(|i| JournalCount::new(format!("J{:02}", (i * 7) % 25), rng.random_range(0..=max)))
            .collect();
        check_partition(&list).map_err(|e| format!("list {case}: {e}"))?;
    }
    let fixture: Vec<JournalCount> = [("A", 4), ("B", 2), ("C", 1), ("D", 1), ("E", 1)]
        .into_iter()
        .map(|(j, c)| JournalCount::new(j, c))
        .collect();
    let p = bradford_partition(&fixture);
    let zone = |z| p.journals_in(z).collect::<Vec<_>>();
    ensure!(zone(Zone::Core) == ["A"], "zone 1 {:?}", zone(Zone::Core));
    ensure!(zone(Zone::Middle) == ["B"], "zone 2 {:?}", zone(Zone::Middle));
    ensure!(zone(Zone::Periphery) == ["C", "D", "E"], "zone 3 {:?}", zone(Zone::Periphery));
    ensure!(p.zone_doc_counts() == [4, 2, 3], "doc counts {:?}", p.zone_doc_counts());
    Ok(format!("{RANDOM_PRODUCTIVITY_LISTS} random lists + A:4,B:2,C:1,D:1,E:1"))
}

fn key_order(a: &SortKey, b: &SortKey) -> std::cmp::Ordering {
    match (a, b) {
        (SortKey::Zone(x), SortKey::Zone(y)) => {
            let rank = |z: &Option<Zone>| z.map_or(4, Zone::number);
            rank(x).cmp(&rank(y))
        }
        (SortKey::Centrality(x), SortKey::Centrality(y)) => y.total_cmp(x),
        _ => std::cmp::Ordering::Equal,
    }
}

fn rerank_permutation() -> Outcome {
    let mut checked = 0;
    for seed in 0..6 {
        let corpus = Corpus::from_records(generate(&SynthParams::new(150, seed))).unwrap();
        let index = Index::build(corpus);
        for q in QUERIES {
            let input = search(&index, &Query::parse(q), 500).map_err(|e| e.to_string())?;
            let position: BTreeMap<&str, usize> = input.ids().enumerate().map(|(i, id)| (id, i)).collect();
            for strategy in [Strategy::Bradford, Strategy::Centrality] {
                let out = rerank(index.corpus(), &input, strategy).map_err(|e| e.to_string())?;
                let again = rerank(index.corpus(), &input, strategy).map_err(|e| e.to_string())?;
                ensure!(out == again, "{strategy:?} {q:?}: not deterministic");

                let mut before: Vec<(String, u64)> =
                    input.entries.iter().map(|e| (e.id.clone(), e.score.to_bits())).collect();
                let mut after: Vec<(String, u64)> =
                    out.result.entries.iter().map(|e| (e.id.clone(), e.score.to_bits())).collect();
                before.sort();
                after.sort();
                ensure!(before == after, "{strategy:?} {q:?}: not a permutation");

                for (i, pair) in out.keys.windows(2).enumerate() {
                    let ord = key_order(&pair[0], &pair[1]);
                    ensure!(ord.is_le(), "{strategy:?} {q:?}: keys out of order at {i}");
                    if ord.is_eq() {
                        let a = position[out.result.entries[i].id.as_str()];
                        let b = position[out.result.entries[i + 1].id.as_str()];
                        ensure!(a < b, "{strategy:?} {q:?}: tf-idf order broken within key at {i}");
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} re-rankings"))
}

fn oracle_docs(corpus: &Corpus) -> (Vec<tfidf_oracle::Doc>, Vec<String>) {
    let docs = corpus
        .records()
        .iter()
        .map(|r| tfidf_oracle::Doc {
            tokens: tokenize(&r.free_text()),
            descriptors: r.descriptors.iter().map(|d| normalize_descriptor(d)).collect(),
        })
        .collect();
    (docs, corpus.records().iter().map(|r| r.id.clone()).collect())
}

fn tfidf_brute_force() -> Outcome {
    let corpus = Corpus::from_records(generate(&SynthParams::new(TFIDF_DOCS, 3))).unwrap();
    let (docs, ids) = oracle_docs(&corpus);
    let index = Index::build(corpus);
    let mut queries: Vec<Query> = QUERIES.iter().map(|q| Query::parse(q)).collect();
    queries.push(Query::parse("social analysis"));
    queries.push(expand_query(&Query::parse("survey error"), &["Data Quality", "Interviewer"]).with_boost(2.5));
    let mut compared = 0;
    for query in &queries {
        let got = search(&index, query, usize::MAX).map_err(|e| e.to_string())?;
        let expansion: Vec<String> = query.expansion_terms.iter().map(|e| normalize_descriptor(e)).collect();
        let want = tfidf_oracle::rank(&docs, &ids, &query.free_terms, &expansion, query.expansion_boost);
        ensure!(got.len() == want.len(), "{query:?}: {} hits vs {}", got.len(), want.len());
        for (rank, (g, (d, s))) in got.entries.iter().zip(&want).enumerate() {
            ensure!(g.id == ids[*d], "{query:?} rank {rank}: {} vs {}", g.id, ids[*d]);
            ensure!(close(g.score, *s), "{query:?} {}: {} vs {s}", g.id, g.score);
        }
        compared += got.len();
    }
    Ok(format!("{} queries, {compared} scored hits", queries.len()))
}

fn llr_association() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..RANDOM_TABLES {
        let max = [3, 20, 500, 100_000][case % 4];
        let cells: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..=max));
        let table = ContingencyTable::new(cells[0], cells[1], cells[2], cells[3]);
        let got = llr(&table);
        let want = g2_oracle::signed_g2(cells[0], cells[1], cells[2], cells[3]);
        ensure!(
            close(got, want),
            "table {cells:?}: {got} vs {want}"
        );
    }
    for _ in 0..RANDOM_TABLES {
        // outer product of row and column weights is exactly independent
        let [r0, r1, c0, c1]: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..40));
        let table = ContingencyTable::new(r0 * c0, r0 * c1, r1 * c0, r1 * c1);
        let got = llr(&table);
        ensure!(got == 0.0, "independent table {table:?} scored {got}");
    }

    let corpus = Corpus::from_records(generate(&SynthParams::new(120, 5))).unwrap();
    let index = Index::build(corpus);
    let ids: Vec<String> = index.corpus().records().iter().map(|r| r.id.clone()).collect();
    for q in QUERIES {
        let base = Query::parse(q);
        let noop = expand_query(&base, &["Descriptor Nobody Uses"]);
        let plain = search(&index, &base, usize::MAX).map_err(|e| e.to_string())?;
        let expanded = search(&index, &noop, usize::MAX).map_err(|e| e.to_string())?;
        ensure!(plain.entries == expanded.entries, "{q:?}: unmatched expansion changed results");

        for boost in [0.5, 1.0, 4.0] {
            let base = base.clone().with_boost(boost);
            for id in ids.iter().step_by(7) {
                let record = index.corpus().get(id).unwrap();
                let Some(descriptor) = record.descriptors.first() else { continue };
                if base.expansion_terms.iter().any(|e| normalize_descriptor(e) == normalize_descriptor(descriptor)) {
                    continue;
                }
                let before = score(&index, &base, id).map_err(|e| e.to_string())?;
                let after = score(&index, &expand_query(&base, &[descriptor]), id).map_err(|e| e.to_string())?;
                ensure!(
                    close(after - before, boost),
                    "{q:?} {id}: expanding by {descriptor:?} moved score by {} not {boost}",
                    after - before
                );
            }
        }
    }
    Ok(format!("{RANDOM_TABLES} random + {RANDOM_TABLES} independent tables, expansion invariants"))
}

const CSV_HEAD: &str = "topic_id,researcher_id,researcher_type,service,rank,recommendation,relevant\n";

fn eval_pipeline() -> Outcome {
    let csv = format!(
        "{CSV_HEAD}\
t1,r1,phd,STR,1,a,true\nt1,r1,phd,STR,2,b,true\nt1,r1,phd,STR,3,c,false\nt1,r1,phd,STR,4,d,true\n\
t2,r2,postdoc,JNR,1,x,true\nt2,r2,postdoc,JNR,2,y,true\n"
    );
    let set = parse_assessments(csv.as_bytes()).map_err(|e| e.to_string())?;
    let metrics = report(&set).map_err(|e| e.to_string())?;
    let str_ = &metrics.services[&Service::Str];
    ensure!(str_.p_av == 0.75, "3 of 4 relevant: P = {}", str_.p_av);
    ensure!(str_.p_at_1 == 1.0 && str_.p_at_2 == 1.0, "P@1/P@2 {} {}", str_.p_at_1, str_.p_at_2);
    ensure!(str_.p_at_4 == 0.75, "P@4 = {}", str_.p_at_4);
    let jnr = &metrics.services[&Service::Jnr];
    ensure!(jnr.p_at_4 == 1.0, "truncated 2-item list: P@4 = {}", jnr.p_at_4);
    let lists = set.lists();
    let two = lists.values().find(|l| l.len() == 2).unwrap();
    ensure!(p_at_k(two, 4).map_err(|e| e.to_string())? == 1.0, "p_at_k on 2-item list");

    let study = AssessmentSet::new(assessment_study(&StudyShape::default(), 9)).map_err(|e| e.to_string())?;
    let d = report(&study).map_err(|e| e.to_string())?.descriptive;
    ensure!((d.researchers, d.topics) == (19, 23), "researchers/topics {:?}", (d.researchers, d.topics));
    for (service, count) in [(Service::Str, 95), (Service::Jnr, 111), (Service::Anr, 107)] {
        ensure!(d.assessments[&service] == count, "{service} assessments {}", d.assessments[&service]);
        let mean = d.mean_per_topic[&service];
        ensure!(mean == count as f64 / 23.0, "{service} mean {mean}");
    }
    Ok(format!(
        "means {:.2}/{:.2}/{:.2}",
        d.mean_per_topic[&Service::Str],
        d.mean_per_topic[&Service::Jnr],
        d.mean_per_topic[&Service::Anr]
    ))
}

fn golden_renderer() -> Outcome {
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/precision.txt");
    let golden = std::fs::read_to_string(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    let m = |p_av, p_at_1, p_at_2, p_at_4| ServiceMetrics {
        topics: 23,
        p_av,
        p_at_1,
        p_at_2,
        p_at_4,
    };
    let fixture = MetricsReport {
        services: BTreeMap::from([
            (Service::Str, m(0.743, 0.957, 0.826, 0.750)),
            (Service::Jnr, m(0.728, 0.826, 0.848, 0.726)),
            (Service::Anr, m(0.749, 0.957, 0.864, 0.750)),
        ]),
        researcher_types: BTreeMap::new(),
        descriptive: Descriptive {
            researchers: 19,
            topics: 23,
            assessments: BTreeMap::new(),
            mean_per_topic: BTreeMap::new(),
        },
    };
    let rendered = render_precision(&fixture);
    ensure!(rendered == golden, "rendered:\n{rendered}\ngolden:\n{golden}");
    Ok("precision table".into())
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bibrec"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "bibrec {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

fn cli_endpoint_equivalence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus_path = dir.path().join("corpus.jsonl");
    let corpus = Corpus::from_records(generate(&SynthParams::new(EQUIVALENCE_DOCS, EQUIVALENCE_SEED))).unwrap();
    corpus
        .write_jsonl(std::fs::File::create(&corpus_path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let corpus_arg = corpus_path.to_str().unwrap();

    let engine = Arc::new(Engine::new(Index::build(corpus), EngineSettings::default()));
    let app = bibrec_service::router(engine, None);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let http = |method: &str, uri: String, body: Vec<u8>| -> Result<Vec<u8>, String> {
        let req = Request::builder()
            .method(method)
            .uri(&uri)
            .body(Body::from(body))
            .map_err(|e| e.to_string())?;
        runtime.block_on(async {
            let resp = app.clone().oneshot(req).await.map_err(|e| e.to_string())?;
            ensure!(resp.status() == StatusCode::OK, "{uri}: {}", resp.status());
            let bytes = resp.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
            Ok(bytes.to_vec())
        })
    };

    let mut compared = 0;
    for q in QUERIES {
        let encoded = q.replace(' ', "+");
        for rerank in ["tfidf", "bradford", "centrality"] {
            let from_cli = cli(&["query", corpus_arg, "--q", q, "--rerank", rerank, "--json"])?;
            let from_http = http("GET", format!("/search?q={encoded}&rerank={rerank}"), Vec::new())?;
            ensure!(from_cli == from_http, "query {q:?} rerank {rerank}: bodies differ");
            compared += 1;
        }
        let from_cli = cli(&["query", corpus_arg, "--q", q, "--expand", "Data Quality,Housing", "--limit", "3", "--json"])?;
        let from_http = http("GET", format!("/search?q={encoded}&expand=Data+Quality,Housing&limit=3"), Vec::new())?;
        ensure!(from_cli == from_http, "query {q:?} with expansion: bodies differ");
        compared += 1;
        for kind in ["terms", "journals", "authors"] {
            let from_cli = cli(&["recommend", corpus_arg, "--q", q, "--kind", kind, "--json"])?;
            let from_http = http("GET", format!("/recommend/{kind}?q={encoded}"), Vec::new())?;
            ensure!(from_cli == from_http, "recommend {kind} {q:?}: bodies differ");
            let from_cli = cli(&["recommend", corpus_arg, "--q", q, "--kind", kind, "--k", "2", "--json"])?;
            let from_http = http("GET", format!("/recommend/{kind}?q={encoded}&k=2"), Vec::new())?;
            ensure!(from_cli == from_http, "recommend {kind} {q:?} k=2: bodies differ");
            compared += 2;
        }
    }

    let csv_path = dir.path().join("assessments.csv");
    let study = assessment_study(&StudyShape::default(), 17);
    bibrec_core::eval::write_assessments(&study, std::fs::File::create(&csv_path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let from_cli = cli(&["evaluate", csv_path.to_str().unwrap(), "--json"])?;
    let from_http = http("POST", "/evaluate".into(), std::fs::read(&csv_path).map_err(|e| e.to_string())?)?;
    ensure!(from_cli == from_http, "evaluate: bodies differ");
    compared += 1;

    Ok(format!("{compared} byte-identical CLI/HTTP pairs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("betweenness equals brute-force path enumeration", betweenness_oracle),
        ("betweenness closed forms", betweenness_closed_forms),
        ("bradford partition properties and fixture", bradford),
        ("re-rank is a stable deterministic permutation", rerank_permutation),
        ("tf-idf equals brute-force scorer", tfidf_brute_force),
        ("llr equals g2 oracle, independence and expansion invariants", llr_association),
        ("evaluation pipeline", eval_pipeline),
        ("text renderer matches golden file", golden_renderer),
        ("cli --json byte-matches http bodies", cli_endpoint_equivalence),
    ];
    let quiet_panics = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    panic::set_hook(quiet_panics);
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
