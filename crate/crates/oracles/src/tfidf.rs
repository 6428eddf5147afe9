//! Exhaustive tf-idf scoring straight from the formula.

/// A document as the scorer sees it.
pub struct Doc {
    pub tokens: Vec<String>,
    /// Normalized descriptor keys.
    pub descriptors: Vec<String>,
}

/// `sum_q tf(q,d) * ln(N / df(q)) + boost * |{e in expansion : e in d}|`.
pub fn score(docs: &[Doc], doc: usize, free_terms: &[String], expansion: &[String], boost: f64) -> f64 {
    let n = docs.len() as f64;
    let mut total = 0.0;
    for q in free_terms {
        let tf = docs[doc].tokens.iter().filter(|t| *t == q).count();
        let df = docs.iter().filter(|d| d.tokens.contains(q)).count();
        if tf > 0 && df > 0 {
            total += tf as f64 * (n / df as f64).ln();
        }
    }
    let matched = expansion
        .iter()
        .filter(|e| docs[doc].descriptors.contains(e))
        .count();
    total + boost * matched as f64
}

/// Scores every document and returns `(doc, score)` for positive scores,
/// sorted by score descending then by `ids` ascending.
pub fn rank(
    docs: &[Doc],
    ids: &[String],
    free_terms: &[String],
    expansion: &[String],
    boost: f64,
) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = (0..docs.len())
        .map(|d| (d, score(docs, d, free_terms, expansion, boost)))
        .filter(|&(_, s)| s > 0.0)
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(ids[a.0].cmp(&ids[b.0])));
    ranked
}
