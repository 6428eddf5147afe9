use std::hint::black_box;

use bibrec_core::synth::{generate, SynthParams};
use bibrec_core::{
    betweenness, build_coauthor_graph, recommend_terms, rerank, search, Corpus, Index, Query,
    Strategy, TermOptions,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SIZES: [usize; 3] = [1_000, 5_000, 20_000];

fn corpus(docs: usize) -> Corpus {
    Corpus::from_records(generate(&SynthParams::new(docs, 7))).unwrap()
}

fn build_index(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_index");
    group.sample_size(10);
    for docs in SIZES {
        let corpus = corpus(docs);
        group.bench_with_input(BenchmarkId::from_parameter(docs), &corpus, |b, corpus| {
            b.iter(|| Index::build(black_box(corpus.clone())))
        });
    }
    group.finish();
}

fn search_and_rerank(c: &mut Criterion) {
    let query = Query::parse("survey data quality");
    let mut group = c.benchmark_group("search");
    for docs in SIZES {
        let index = Index::build(corpus(docs));
        group.bench_with_input(BenchmarkId::new("tfidf", docs), &index, |b, index| {
            b.iter(|| search(index, black_box(&query), 500).unwrap())
        });
        let result = search(&index, &query, 500).unwrap();
        for strategy in [Strategy::Bradford, Strategy::Centrality] {
            group.bench_with_input(
                BenchmarkId::new(strategy.as_str(), docs),
                &result,
                |b, result| b.iter(|| rerank(index.corpus(), black_box(result), strategy).unwrap()),
            );
        }
    }
    group.finish();
}

fn centrality(c: &mut Criterion) {
    let mut group = c.benchmark_group("betweenness");
    group.sample_size(20);
    for scope in [100, 500, 2_000] {
        let index = Index::build(corpus(20_000));
        let result = search(&index, &Query::parse("social analysis study"), scope).unwrap();
        let graph = build_coauthor_graph(index.corpus(), &result).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(scope), &graph, |b, graph| {
            b.iter(|| betweenness(black_box(graph)))
        });
    }
    group.finish();
}

fn term_suggestions(c: &mut Criterion) {
    let query = Query::parse("survey nonresponse");
    let mut group = c.benchmark_group("recommend_terms");
    for docs in SIZES {
        let index = Index::build(corpus(docs));
        group.bench_with_input(BenchmarkId::from_parameter(docs), &index, |b, index| {
            b.iter(|| recommend_terms(index, black_box(&query), &TermOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, build_index, search_and_rerank, centrality, term_suggestions);
criterion_main!(benches);
