//! Slow, obviously-correct reference computations.
//!
//! Nothing here depends on the engine crates: inputs are plain counts,
//! adjacency lists and token vectors so the checks stay independent of
//! the code under test.

pub mod betweenness;
pub mod g2;
pub mod tfidf;
