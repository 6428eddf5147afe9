//! Co-authorship networks, betweenness centrality and the author
//! centrality re-ranker.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_author, AuthorKey, Corpus};
use crate::index::{ResultSet, ScoredDoc, Strategy};
use crate::recommend::{top_k, Recommendation, RecommendationKind};
use crate::rerank::RerankError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorNode {
    pub key: AuthorKey,
    pub display: String,
    /// Result-set documents this author appears on.
    pub papers: u32,
}

/// Undirected, simple graph of authors. Nodes are sorted by key and
/// neighbor lists are sorted, so construction does not depend on the
/// order documents arrive in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoauthorGraph {
    nodes: Vec<AuthorNode>,
    position: HashMap<AuthorKey, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl CoauthorGraph {
    /// Builds a graph from author lists, one list per document.
    pub fn from_author_lists<'a, I, A>(lists: I, display: impl Fn(&AuthorKey, &str) -> String) -> Self
    where
        I: IntoIterator<Item = A>,
        A: IntoIterator<Item = &'a str>,
    {
        let mut papers: BTreeMap<AuthorKey, (String, u32)> = BTreeMap::new();
        let mut edges: BTreeSet<(AuthorKey, AuthorKey)> = BTreeSet::new();
        for list in lists {
            let mut keys: Vec<AuthorKey> = Vec::new();
            for name in list {
                let key = normalize_author(name);
                if key.as_str().is_empty() || keys.contains(&key) {
                    continue;
                }
                let entry = papers
                    .entry(key.clone())
                    .or_insert_with(|| (display(&key, name), 0));
                entry.1 += 1;
                keys.push(key);
            }
            for i in 0..keys.len() {
                for j in (i + 1)..keys.len() {
                    let (a, b) = if keys[i] < keys[j] { (i, j) } else { (j, i) };
                    edges.insert((keys[a].clone(), keys[b].clone()));
                }
            }
        }

        let nodes: Vec<AuthorNode> = papers
            .into_iter()
            .map(|(key, (display, papers))| AuthorNode {
                key,
                display,
                papers,
            })
            .collect();
        let position: HashMap<AuthorKey, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.key.clone(), i))
            .collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b) in &edges {
            let (a, b) = (position[a], position[b]);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        CoauthorGraph {
            nodes,
            position,
            adjacency,
            edge_count: edges.len(),
        }
    }

    /// Graph over plain node names and an edge list (by node position).
    /// Self-loops and repeated edges are ignored.
    pub fn from_edges(names: &[&str], edges: &[(usize, usize)]) -> Self {
        let mut lists: Vec<Vec<&str>> = names.iter().map(|n| vec![*n]).collect();
        lists.extend(
            edges
                .iter()
                .filter(|(a, b)| a != b)
                .map(|&(a, b)| vec![names[a], names[b]]),
        );
        let mut graph = Self::from_author_lists(lists, |_, name| name.to_owned());
        for node in &mut graph.nodes {
            node.papers = 0;
        }
        graph
    }

    pub fn nodes(&self) -> &[AuthorNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn position(&self, key: &AuthorKey) -> Option<usize> {
        self.position.get(key).copied()
    }

    /// Edges as display-name pairs, each pair ordered by key.
    pub fn edges(&self) -> impl Iterator<Item = (&AuthorNode, &AuthorNode)> {
        self.adjacency.iter().enumerate().flat_map(move |(a, ns)| {
            ns.iter()
                .filter(move |&&b| a < b)
                .map(move |&b| (&self.nodes[a], &self.nodes[b]))
        })
    }
}

/// Co-authorship graph of the documents in `result`.
pub fn build_coauthor_graph(
    corpus: &Corpus,
    result: &ResultSet,
) -> Result<CoauthorGraph, RerankError> {
    let records = result
        .ids()
        .map(|id| {
            corpus
                .get(id)
                .ok_or_else(|| RerankError::UnknownRecord(id.to_owned()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoauthorGraph::from_author_lists(
        records
            .iter()
            .map(|r| r.authors.iter().map(String::as_str)),
        |key, name| {
            corpus
                .author_display(key)
                .map_or_else(|| name.to_owned(), str::to_owned)
        },
    ))
}

/// Normalized betweenness per node of a [`CoauthorGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    values: Vec<f64>,
    by_key: HashMap<AuthorKey, f64>,
}

impl CentralityScores {
    /// Scores aligned with [`CoauthorGraph::nodes`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, key: &AuthorKey) -> Option<f64> {
        self.by_key.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

const SOURCES_PER_TASK: usize = 32;

/// Brandes' dependency accumulation from a single source, added into `acc`.
fn accumulate_from(adjacency: &[Vec<usize>], source: usize, acc: &mut [f64], ws: &mut Workspace) {
    ws.reset();
    ws.sigma[source] = 1.0;
    ws.dist[source] = 0;
    ws.queue.push_back(source);
    while let Some(v) = ws.queue.pop_front() {
        ws.order.push(v);
        let next = ws.dist[v] + 1;
        for &w in &adjacency[v] {
            if ws.dist[w] == usize::MAX {
                ws.dist[w] = next;
                ws.queue.push_back(w);
            }
            if ws.dist[w] == next {
                ws.sigma[w] += ws.sigma[v];
                ws.preds[w].push(v);
            }
        }
    }
    while let Some(w) = ws.order.pop() {
        let coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
        for i in 0..ws.preds[w].len() {
            let v = ws.preds[w][i];
            ws.delta[v] += ws.sigma[v] * coeff;
        }
        if w != source {
            acc[w] += ws.delta[w];
        }
    }
}

struct Workspace {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    order: Vec<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            queue: VecDeque::with_capacity(n),
            order: Vec::with_capacity(n),
        }
    }

    fn reset(&mut self) {
        self.sigma.fill(0.0);
        self.dist.fill(usize::MAX);
        self.delta.fill(0.0);
        for p in &mut self.preds {
            p.clear();
        }
        self.queue.clear();
        self.order.clear();
    }
}

/// Raw betweenness of an undirected, unweighted graph, counting each
/// unordered pair of endpoints once.
///
/// Sources are processed in fixed-size batches in parallel; batch sums
/// are combined in source order, so the result does not depend on thread
/// scheduling.
pub fn betweenness_raw(adjacency: &[Vec<usize>]) -> Vec<f64> {
    let n = adjacency.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_TASK)
        .map(|batch| {
            let mut ws = Workspace::new(n);
            let mut acc = vec![0.0; n];
            for &s in batch {
                accumulate_from(adjacency, s, &mut acc, &mut ws);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    // every unordered pair was reached from both of its endpoints
    for t in &mut total {
        *t /= 2.0;
    }
    total
}

/// Betweenness normalized by `(n-1)(n-2)/2` over the whole graph; all
/// zeros when the graph has fewer than three nodes.
pub fn betweenness(graph: &CoauthorGraph) -> CentralityScores {
    let n = graph.node_count();
    let values = if n < 3 {
        vec![0.0; n]
    } else {
        let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
        betweenness_raw(graph.adjacency())
            .into_iter()
            .map(|b| b / pairs)
            .collect()
    };
    let by_key = graph
        .nodes()
        .iter()
        .zip(&values)
        .map(|(node, &v)| (node.key.clone(), v))
        .collect();
    CentralityScores { values, by_key }
}

/// Most central authors of `result`. When every score is zero the
/// authors are ordered by how many result documents they wrote.
pub fn recommend_authors(
    corpus: &Corpus,
    result: &ResultSet,
    k: usize,
) -> Result<Vec<Recommendation>, RerankError> {
    let graph = build_coauthor_graph(corpus, result)?;
    let scores = betweenness(&graph);
    let all_zero = scores.values().iter().all(|&v| v == 0.0);
    let candidates: Vec<(&AuthorNode, f64)> =
        graph.nodes().iter().zip(scores.values().iter().copied()).collect();
    Ok(top_k(
        RecommendationKind::Author,
        candidates,
        k,
        |(a, sa), (b, sb)| {
            let primary = if all_zero {
                b.papers.cmp(&a.papers)
            } else {
                sb.total_cmp(sa)
            };
            primary.then_with(|| a.display.cmp(&b.display))
        },
        |(node, score)| (node.display.clone(), score),
    ))
}

/// Per-entry re-ranking key: the highest centrality among the record's
/// authors, 0 for records without authors.
pub fn entry_centrality_keys(
    corpus: &Corpus,
    result: &ResultSet,
    scores: &CentralityScores,
) -> Result<Vec<f64>, RerankError> {
    result
        .entries
        .iter()
        .map(|e| {
            let record = corpus
                .get(&e.id)
                .ok_or_else(|| RerankError::UnknownRecord(e.id.clone()))?;
            record.authors.iter().try_fold(0.0f64, |best, author| {
                scores
                    .get(&normalize_author(author))
                    .map(|s| best.max(s))
                    .ok_or_else(|| RerankError::AuthorNotScored {
                        id: e.id.clone(),
                        author: author.clone(),
                    })
            })
        })
        .collect()
}

/// Reorders `result` by author centrality key, then original score, then id.
pub fn rerank_centrality(
    corpus: &Corpus,
    result: &ResultSet,
    scores: &CentralityScores,
) -> Result<ResultSet, RerankError> {
    let keys = entry_centrality_keys(corpus, result, scores)?;
    let mut keyed: Vec<(f64, &ScoredDoc)> = keys.into_iter().zip(&result.entries).collect();
    keyed.sort_by(|(ka, a), (kb, b)| {
        kb.total_cmp(ka)
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(ResultSet {
        entries: keyed.into_iter().map(|(_, e)| e.clone()).collect(),
        strategy: Strategy::Centrality,
        query: result.query.clone(),
    })
}
