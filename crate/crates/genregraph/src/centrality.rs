//! Within-community representative-book ranking by weighted degree and
//! eigenvector centrality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::community::subgraph;
use crate::error::{Error, Result};
use crate::model::{Partition, SimilarityGraph};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    WeightedDegree,
    Eigenvector,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::WeightedDegree => "weighted_degree",
            Measure::Eigenvector => "eigenvector",
        })
    }
}

/// Per-node centrality scores, indexed like the graph they were computed on.
#[derive(Debug, Clone)]
pub struct CentralityScores {
    pub measure: Measure,
    values: Vec<f64>,
}

impl CentralityScores {
    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sum of incident edge weights per node; isolated nodes score 0.
pub fn weighted_degree(sg: &SimilarityGraph) -> CentralityScores {
    let values = (0..sg.node_count() as u32)
        .map(|v| sg.neighbors(v).iter().map(|&(_, w)| w).sum())
        .collect();
    CentralityScores {
        measure: Measure::WeightedDegree,
        values,
    }
}

fn component_sizes(sg: &SimilarityGraph) -> Vec<usize> {
    let n = sg.node_count();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start as u32);
        let mut size = 0usize;
        while let Some(v) = stack.pop() {
            size += 1;
            for &(nbr, _) in sg.neighbors(v) {
                if !seen[nbr as usize] {
                    seen[nbr as usize] = true;
                    stack.push(nbr);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Dominant eigenvector of the weighted adjacency matrix.
///
/// Power iteration from the uniform positive vector, run on `A + I` so that
/// bipartite-ish spectra cannot oscillate; the shift leaves the eigenvectors
/// of `A` unchanged. Iterates are L2-normalized and considered converged
/// when successive iterates differ by less than `tolerance` in max-norm.
/// Scores are non-negative with unit Euclidean norm.
///
/// On a disconnected graph the iteration concentrates mass on the dominant
/// component and nodes elsewhere drift to ~0; a warning listing component
/// sizes is logged so truncated rankings are not silent.
pub fn eigenvector_centrality(
    sg: &SimilarityGraph,
    tolerance: f64,
    max_iterations: usize,
) -> Result<CentralityScores> {
    let n = sg.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    let components = component_sizes(sg);
    if components.len() > 1 && sg.edge_count() > 0 {
        log::warn!(
            "eigenvector centrality on a disconnected graph; component sizes {:?}",
            components
        );
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        for (v, slot) in next.iter_mut().enumerate() {
            let mut acc = x[v];
            for &(nbr, w) in sg.neighbors(v as u32) {
                acc += w * x[nbr as usize];
            }
            *slot = acc;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in next.iter_mut() {
            *v /= norm;
        }
        residual = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x.copy_from_slice(&next);
        if residual < tolerance {
            return Ok(CentralityScores {
                measure: Measure::Eigenvector,
                values: x,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        residual,
    })
}

/// The `n` most representative books of one community, computed on the
/// community-restricted subgraph. Descending by score, ties broken
/// lexicographically by book id.
pub fn top_books(
    sg: &SimilarityGraph,
    p: &Partition,
    community: u32,
    measure: Measure,
    n: usize,
) -> Result<Vec<(String, f64)>> {
    if n < 1 {
        return Err(Error::Config("top_books needs n >= 1".into()));
    }
    let sub = subgraph(sg, p, community)?;
    let scores = match measure {
        Measure::WeightedDegree => weighted_degree(&sub),
        Measure::Eigenvector => {
            eigenvector_centrality(&sub, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)?
        }
    };
    let mut ranked: Vec<(String, f64)> = sub
        .books()
        .iter()
        .map(|(idx, name)| (name.to_string(), scores.get(idx as usize)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IdIndex, SimilarityGraph};

    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn weighted_degree_star() {
        let sg = SimilarityGraph::from_named_edges(&[
            ("center", "s1", 0.5),
            ("center", "s2", 0.5),
            ("center", "s3", 0.5),
        ])
        .unwrap();
        let scores = weighted_degree(&sg);
        assert_eq!(scores.get(0), 1.5);
        for spoke in 1..4 {
            assert_eq!(scores.get(spoke), 0.5);
        }
    }

    #[test]
    fn weighted_degree_empty_edges() {
        let mut books = IdIndex::new();
        books.intern("a");
        books.intern("b");
        let sg = SimilarityGraph::from_edges(books, vec![]).unwrap();
        assert!(weighted_degree(&sg).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn weighted_degree_matches_edge_scan() {
        let mut rng = StdRng::seed_from_u64(41);
        let mut edges = Vec::new();
        for i in 0..20u32 {
            for j in i + 1..20 {
                if rng.random_bool(0.3) {
                    edges.push((format!("n{i}"), format!("n{j}"), rng.random_range(0.1..1.0)));
                }
            }
        }
        let named: Vec<(&str, &str, f64)> = edges
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        let sg = SimilarityGraph::from_named_edges(&named).unwrap();
        let scores = weighted_degree(&sg);
        let mut expected = vec![0.0f64; sg.node_count()];
        for &(a, b, w) in sg.edge_list() {
            expected[a as usize] += w;
            expected[b as usize] += w;
        }
        assert_eq!(scores.values(), expected.as_slice());
    }

    #[test]
    fn eigenvector_on_triangle_is_uniform() {
        let sg = SimilarityGraph::from_named_edges(&[
            ("a", "b", 0.6),
            ("b", "c", 0.6),
            ("a", "c", 0.6),
        ])
        .unwrap();
        let scores = eigenvector_centrality(&sg, 1e-12, 10_000).unwrap();
        let expected = 1.0 / 3.0f64.sqrt();
        for v in 0..3 {
            assert!((scores.get(v) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvector_path_ratio_is_sqrt_two() {
        let sg =
            SimilarityGraph::from_named_edges(&[("a", "b", 1.0), ("b", "c", 1.0)]).unwrap();
        let scores = eigenvector_centrality(&sg, 1e-13, 10_000).unwrap();
        let ratio = scores.get(1) / scores.get(0);
        assert!((ratio - 2.0f64.sqrt()).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn eigenvector_nonconvergence_reports_residual() {
        let sg =
            SimilarityGraph::from_named_edges(&[("a", "b", 1.0), ("b", "c", 0.3)]).unwrap();
        match eigenvector_centrality(&sg, 1e-15, 2) {
            Err(Error::NonConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn eigenvector_scale_invariant_weighted_degree_scales() {
        let edges = [("a", "b", 0.8), ("b", "c", 0.4), ("a", "c", 0.6)];
        let sg = SimilarityGraph::from_named_edges(&edges).unwrap();
        let scaled: Vec<(&str, &str, f64)> =
            edges.iter().map(|&(a, b, w)| (a, b, w * 0.25)).collect();
        let sg_scaled = SimilarityGraph::from_named_edges(&scaled).unwrap();

        let wd = weighted_degree(&sg);
        let wd_scaled = weighted_degree(&sg_scaled);
        for v in 0..3 {
            assert_eq!(wd_scaled.get(v), wd.get(v) * 0.25);
        }

        let ev = eigenvector_centrality(&sg, 1e-12, 10_000).unwrap();
        let ev_scaled = eigenvector_centrality(&sg_scaled, 1e-12, 10_000).unwrap();
        for v in 0..3 {
            assert!((ev.get(v) - ev_scaled.get(v)).abs() < 1e-8);
        }
    }

    #[test]
    fn top_books_single_node_community() {
        let sg = SimilarityGraph::from_named_edges(&[("a", "b", 0.5)]).unwrap();
        let mut books = IdIndex::new();
        books.intern("a");
        books.intern("b");
        // Third node is isolated in its own community.
        let sg = {
            let mut ix = IdIndex::new();
            ix.intern("a");
            ix.intern("b");
            ix.intern("solo");
            SimilarityGraph::from_edges(ix, sg.edge_list().to_vec()).unwrap()
        };
        let p = Partition::from_assignment(&[0, 0, 1]);
        let top = top_books(&sg, &p, 1, Measure::WeightedDegree, 20).unwrap();
        assert_eq!(top, vec![("solo".to_string(), 0.0)]);
    }

    #[test]
    fn top_books_n_larger_than_community() {
        let sg = SimilarityGraph::from_named_edges(&[
            ("a", "b", 0.5),
            ("b", "c", 0.7),
            ("a", "c", 0.2),
        ])
        .unwrap();
        let p = Partition::from_assignment(&[0, 0, 0]);
        let top = top_books(&sg, &p, 0, Measure::WeightedDegree, 50).unwrap();
        assert_eq!(top.len(), 3);
    }

    #[test]
    fn top_books_breaks_ties_lexicographically() {
        // Two disjoint equal edges: all four nodes score the same.
        let sg = SimilarityGraph::from_named_edges(&[("d", "c", 0.5), ("b", "a", 0.5)]).unwrap();
        let p = Partition::from_assignment(&[0, 0, 0, 0]);
        let top = top_books(&sg, &p, 0, Measure::WeightedDegree, 4).unwrap();
        let names: Vec<&str> = top.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn top_books_prefix_property() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut edges = Vec::new();
        for i in 0..15u32 {
            for j in i + 1..15 {
                if rng.random_bool(0.4) {
                    edges.push((format!("n{i:02}"), format!("n{j:02}"), rng.random_range(0.1..1.0)));
                }
            }
        }
        let named: Vec<(&str, &str, f64)> = edges
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        let sg = SimilarityGraph::from_named_edges(&named).unwrap();
        let p = Partition::from_assignment(&vec![0; sg.node_count()]);
        let five = top_books(&sg, &p, 0, Measure::WeightedDegree, 5).unwrap();
        let ten = top_books(&sg, &p, 0, Measure::WeightedDegree, 10).unwrap();
        assert_eq!(five.as_slice(), &ten[..5]);
    }

    #[test]
    fn unknown_community_is_an_error() {
        let sg = SimilarityGraph::from_named_edges(&[("a", "b", 0.5)]).unwrap();
        let p = Partition::from_assignment(&[0, 0]);
        assert!(matches!(
            top_books(&sg, &p, 3, Measure::WeightedDegree, 5),
            Err(Error::UnknownCommunity(3))
        ));
    }
}
