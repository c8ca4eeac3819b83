//! Filters on the bipartite rating graph and its Jaccard projection into
//! reader and enjoyment similarity networks.
//!
//! The reader network counts shared readers regardless of rating; the
//! enjoyment network first drops edges rated below the threshold so the
//! projection counts shared fans instead. Pipeline order: user filter, then
//! (enjoyment only) rating filter, then book filter, then projection — the
//! book filter therefore counts enjoyment edges in enjoyment mode, which is
//! what lets the enjoyment network end up with fewer books.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RatingGraph, SimilarityGraph};

/// Which similarity network to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkMode {
    Reader,
    Enjoyment,
}

impl fmt::Display for NetworkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkMode::Reader => "reader",
            NetworkMode::Enjoyment => "enjoyment",
        })
    }
}

/// Thresholds of the projection pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub mode: NetworkMode,
    /// Minimum rating that counts as enjoying a book (enjoyment mode only).
    pub rating_threshold: u8,
    pub min_books_per_user: usize,
    pub min_readers_per_book: usize,
}

impl ProjectionConfig {
    pub fn reader() -> Self {
        Self {
            mode: NetworkMode::Reader,
            rating_threshold: 4,
            min_books_per_user: 2,
            min_readers_per_book: 10,
        }
    }

    pub fn enjoyment() -> Self {
        Self {
            mode: NetworkMode::Enjoyment,
            ..Self::reader()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.rating_threshold) {
            return Err(Error::Config(format!(
                "rating_threshold {} outside [1,5]",
                self.rating_threshold
            )));
        }
        Ok(())
    }
}

/// Keep only users with at least `min_books` rated books, with all their
/// edges. Books left without any edge are dropped from the node set.
pub fn filter_users(graph: &RatingGraph, min_books: usize) -> RatingGraph {
    let mut builder = RatingGraph::builder();
    let mut book_degree = vec![0usize; graph.book_count()];
    for (u, _) in graph.users().iter() {
        if graph.books_of(u).len() >= min_books {
            for &(b, _) in graph.books_of(u) {
                book_degree[b as usize] += 1;
            }
        }
    }
    for (b, name) in graph.books().iter() {
        if book_degree[b as usize] > 0 {
            builder.add_book(name);
        }
    }
    for (u, name) in graph.users().iter() {
        if graph.books_of(u).len() >= min_books {
            builder.add_user(name);
            for &(b, r) in graph.books_of(u) {
                builder
                    .add_edge(name, graph.books().name(b), r)
                    .expect("edges of a valid graph stay valid");
            }
        }
    }
    builder.build()
}

/// Drop edges rated below `threshold`. Users and books are kept as nodes
/// even when they end up with no edges, so readers who enjoyed nothing stay
/// in the data.
pub fn filter_by_rating(graph: &RatingGraph, threshold: u8) -> RatingGraph {
    let mut builder = RatingGraph::builder();
    for (_, name) in graph.users().iter() {
        builder.add_user(name);
    }
    for (_, name) in graph.books().iter() {
        builder.add_book(name);
    }
    for (u, b, r) in graph.edges() {
        if r >= threshold {
            builder
                .add_edge(graph.users().name(u), graph.books().name(b), r)
                .expect("edges of a valid graph stay valid");
        }
    }
    builder.build()
}

/// Drop books with fewer than `min_readers` readers, along with their
/// edges. Users are retained as nodes.
pub fn filter_books(graph: &RatingGraph, min_readers: usize) -> RatingGraph {
    let mut builder = RatingGraph::builder();
    for (_, name) in graph.users().iter() {
        builder.add_user(name);
    }
    let mut keep = vec![false; graph.book_count()];
    for (b, name) in graph.books().iter() {
        if graph.readers_of(b).len() >= min_readers {
            keep[b as usize] = true;
            builder.add_book(name);
        }
    }
    for (u, b, r) in graph.edges() {
        if keep[b as usize] {
            builder
                .add_edge(graph.users().name(u), graph.books().name(b), r)
                .expect("edges of a valid graph stay valid");
        }
    }
    builder.build()
}

/// Project the bipartite graph onto books via the Jaccard index.
///
/// For every unordered pair of books with at least one shared reader the
/// result carries an edge weighted `|R_i ∩ R_j| / |R_i ∪ R_j|`; pairs with
/// empty intersections get no edge. Ratings are ignored here — enjoyment
/// semantics come from filtering beforehand. All books remain as nodes.
///
/// Intersections are counted by enumerating each user's book pairs, which
/// costs the sum of squared user degrees instead of an all-pairs scan. The
/// counts are integers, so splitting users across threads and summing the
/// partial counts is exact and the result is identical for any worker count.
pub fn project_jaccard(graph: &RatingGraph) -> SimilarityGraph {
    project_jaccard_with_threads(graph, 1)
}

pub fn project_jaccard_with_threads(graph: &RatingGraph, threads: usize) -> SimilarityGraph {
    let threads = threads.max(1);
    let n_users = graph.user_count();
    let chunk = n_users.div_ceil(threads.min(n_users.max(1)));

    let accumulate = |users: std::ops::Range<usize>| {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for u in users {
            let books = graph.books_of(u as u32);
            for (i, &(a, _)) in books.iter().enumerate() {
                for &(b, _) in &books[i + 1..] {
                    *counts.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        counts
    };

    let counts = if threads == 1 || n_users == 0 {
        accumulate(0..n_users)
    } else {
        let partials = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            let mut start = 0;
            while start < n_users {
                let end = (start + chunk).min(n_users);
                handles.push(scope.spawn(move || accumulate(start..end)));
                start = end;
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("projection worker panicked"))
                .collect::<Vec<_>>()
        });
        let mut merged: HashMap<(u32, u32), u32> = HashMap::new();
        for partial in partials {
            for (pair, c) in partial {
                *merged.entry(pair).or_insert(0) += c;
            }
        }
        merged
    };

    let mut edges: Vec<(u32, u32, f64)> = counts
        .into_iter()
        .map(|((a, b), inter)| {
            let union =
                graph.readers_of(a).len() + graph.readers_of(b).len() - inter as usize;
            (a, b, inter as f64 / union as f64)
        })
        .collect();
    edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
    SimilarityGraph::from_edges(graph.books().clone(), edges)
        .expect("projection emits canonical edges with weights in (0, 1]")
}

/// Run the full filter-and-project pipeline for one mode.
pub fn build_network(graph: &RatingGraph, cfg: &ProjectionConfig) -> Result<SimilarityGraph> {
    build_network_with_threads(graph, cfg, 1)
}

pub fn build_network_with_threads(
    graph: &RatingGraph,
    cfg: &ProjectionConfig,
    threads: usize,
) -> Result<SimilarityGraph> {
    cfg.validate()?;
    let filtered = filter_users(graph, cfg.min_books_per_user);
    let filtered = match cfg.mode {
        NetworkMode::Reader => filter_books(&filtered, cfg.min_readers_per_book),
        NetworkMode::Enjoyment => filter_books(
            &filter_by_rating(&filtered, cfg.rating_threshold),
            cfg.min_readers_per_book,
        ),
    };
    if filtered.book_count() == 0 {
        return Err(Error::EmptyNetwork(format!(
            "no books survive the {} filters",
            cfg.mode
        )));
    }
    let sg = project_jaccard_with_threads(&filtered, threads);
    if sg.edge_count() == 0 {
        return Err(Error::EmptyNetwork(format!(
            "{} projection produced no similarity edges",
            cfg.mode
        )));
    }
    Ok(sg)
}
