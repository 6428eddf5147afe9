//! Betweenness by explicit enumeration of every shortest path.

use std::collections::VecDeque;

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Every shortest path from `s` to `t`, each as a full vertex sequence.
pub fn shortest_paths(adj: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let dist_from_t = bfs_dist(adj, t);
    let Some(len) = dist_from_t[s] else {
        return Vec::new();
    };
    let mut paths = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let v = *path.last().unwrap();
        if v == t {
            paths.push(path);
            continue;
        }
        let remaining = len - (path.len() - 1);
        for &w in &adj[v] {
            if dist_from_t[w] == Some(remaining - 1) {
                let mut next = path.clone();
                next.push(w);
                stack.push(next);
            }
        }
    }
    paths
}

/// Raw betweenness over unordered pairs: for every pair `{s, t}`, each
/// interior vertex of a shortest path gets `1 / (number of shortest paths)`.
pub fn raw(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = shortest_paths(adj, s, t);
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    score[v] += share;
                }
            }
        }
    }
    score
}

/// [`raw`] divided by `(n-1)(n-2)/2`; all zeros when `n < 3`.
pub fn normalized(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    raw(adj).into_iter().map(|b| b / pairs).collect()
}

/// Sum over connected pairs of (shortest-path length - 1): the total
/// interior-vertex mass that raw betweenness distributes.
pub fn interior_mass(adj: &[Vec<usize>]) -> f64 {
    let n = adj.len();
    let mut total = 0.0;
    for s in 0..n {
        let dist = bfs_dist(adj, s);
        for d in dist.iter().skip(s + 1).flatten() {
            total += (*d as f64 - 1.0).max(0.0);
        }
    }
    total
}

/// Adjacency lists from an edge list, ignoring self-loops and repeats.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}
