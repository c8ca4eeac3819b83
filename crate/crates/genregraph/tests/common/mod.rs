//! Oracles shared by the integration suites. Everything here is written
//! independently of the library's computation paths: dense double loops,
//! explicit set algebra, Jacobi rotations and exhaustive enumeration.

#![allow(dead_code)]
// Index loops read naturally in the dense-matrix oracles below.
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;

use genregraph::model::{IdIndex, Partition, RatingGraph, SimilarityGraph};
use rand::rngs::StdRng;
use rand::Rng;

/// Random bipartite rating graph with unique (user, book) pairs.
pub fn random_rating_graph(
    rng: &mut StdRng,
    users: usize,
    books: usize,
    edges: usize,
) -> RatingGraph {
    let mut b = RatingGraph::builder();
    let mut seen = std::collections::HashSet::new();
    for _ in 0..edges {
        let u = rng.random_range(0..users);
        let bk = rng.random_range(0..books);
        if seen.insert((u, bk)) {
            b.add_edge(&format!("u{u}"), &format!("b{bk}"), rng.random_range(1..=5))
                .unwrap();
        }
    }
    b.build()
}

/// Random weighted similarity graph over exactly `n` named nodes.
pub fn random_similarity_graph(rng: &mut StdRng, n: usize, p_edge: f64) -> SimilarityGraph {
    let mut books = IdIndex::new();
    for i in 0..n {
        books.intern(&format!("n{i:03}"));
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random_bool(p_edge) {
                edges.push((i, j, rng.random_range(0.05..=1.0f64)));
            }
        }
    }
    if edges.is_empty() && n >= 2 {
        edges.push((0, 1, 0.5));
    }
    SimilarityGraph::from_edges(books, edges).unwrap()
}

/// Random connected weighted graph: a random spanning tree plus extras.
pub fn random_connected_graph(rng: &mut StdRng, n: usize, extra_p: f64) -> SimilarityGraph {
    let mut books = IdIndex::new();
    for i in 0..n {
        books.intern(&format!("n{i:03}"));
    }
    let mut pairs = BTreeSet::new();
    for v in 1..n as u32 {
        let parent = rng.random_range(0..v);
        pairs.insert((parent, v));
    }
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random_bool(extra_p) {
                pairs.insert((i, j));
            }
        }
    }
    let edges: Vec<(u32, u32, f64)> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, rng.random_range(0.1..=1.0f64)))
        .collect();
    SimilarityGraph::from_edges(books, edges).unwrap()
}

/// Brute-force Jaccard projection: explicit reader sets, all book pairs.
pub fn jaccard_oracle(g: &RatingGraph) -> Vec<(String, String, f64)> {
    let mut out = Vec::new();
    for (a, an) in g.books().iter() {
        for (b, bn) in g.books().iter() {
            if a >= b {
                continue;
            }
            let ra: BTreeSet<u32> = g.readers_of(a).iter().map(|&(u, _)| u).collect();
            let rb: BTreeSet<u32> = g.readers_of(b).iter().map(|&(u, _)| u).collect();
            let inter = ra.intersection(&rb).count();
            if inter > 0 {
                let union = ra.union(&rb).count();
                out.push((an.to_string(), bn.to_string(), inter as f64 / union as f64));
            }
        }
    }
    out
}

/// O(n²) modularity: dense matrix, double sum over ordered pairs.
pub fn modularity_oracle(sg: &SimilarityGraph, p: &Partition, gamma: f64) -> f64 {
    let n = sg.node_count();
    let mut a = vec![vec![0.0f64; n]; n];
    for &(i, j, w) in sg.edge_list() {
        a[i as usize][j as usize] = w;
        a[j as usize][i as usize] = w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if p.community_of(i) == p.community_of(j) {
                q += a[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n`, as restricted-growth label strings.
pub fn all_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(current: &mut Vec<u32>, pos: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[pos] = label;
            rec(current, pos + 1, max_used.max(label), out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut current = vec![0u32; n];
        rec(&mut current, 1, 0, &mut out);
    }
    out
}

/// Jacobi eigendecomposition of a symmetric matrix: `(values, vectors)`
/// with `vectors[i][k]` the i-th entry of the k-th eigenvector.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..20_000 {
        let mut off = 0.0;
        let (mut p, mut q) = (0, 1);
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j].abs() > off {
                    off = a[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
        let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for k in 0..n {
            let (akp, akq) = (a[k][p], a[k][q]);
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for k in 0..n {
            let (apk, aqk) = (a[p][k], a[q][k]);
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
        for row in v.iter_mut() {
            let (vp, vq) = (row[p], row[q]);
            row[p] = c * vp - s * vq;
            row[q] = s * vp + c * vq;
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}

/// Dominant eigenvector of a similarity graph via the Jacobi oracle.
pub fn dominant_eigenvector_oracle(sg: &SimilarityGraph) -> Vec<f64> {
    let n = sg.node_count();
    let mut a = vec![vec![0.0f64; n]; n];
    for &(i, j, w) in sg.edge_list() {
        a[i as usize][j as usize] = w;
        a[j as usize][i as usize] = w;
    }
    let (values, vectors) = jacobi_eigen(a);
    let top = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    (0..n).map(|i| vectors[i][top]).collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).abs()
}
