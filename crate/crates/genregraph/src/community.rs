//! Weighted modularity and Louvain community detection with a resolution
//! parameter, plus community subgraph restriction and sub-community
//! recursion.
//!
//! Modularity follows the weighted form
//! `Q = (1/2m) Σ_ij [A_ij − γ k_i k_j / (2m)] δ(c_i, c_j)`
//! with `k` the weighted degree and `m` the total edge weight. Louvain is
//! the standard two-phase scheme: greedy local moves until no gain exceeds
//! `min_gain`, then aggregation into a meta-graph whose self-loops carry
//! twice the internal weight so `Q` is preserved across levels. Node visit
//! order is shuffled once per pass by a seeded RNG; ties in move gain go to
//! the smallest candidate community id, so runs are reproducible.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IdIndex, Partition, SimilarityGraph};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LouvainConfig {
    /// Resolution γ; larger values favor more, smaller communities.
    pub resolution: f64,
    pub seed: u64,
    /// Maximum local-move/aggregate passes.
    pub max_passes: usize,
    /// A move must improve modularity by more than this to be taken.
    pub min_gain: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        Self {
            resolution: 1.0,
            seed: 0,
            max_passes: 100,
            min_gain: 1e-9,
        }
    }
}

impl LouvainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::Config(format!(
                "resolution must be a positive real, got {}",
                self.resolution
            )));
        }
        if self.max_passes < 1 {
            return Err(Error::Config("max_passes must be >= 1".into()));
        }
        if self.min_gain.is_nan() || self.min_gain < 0.0 {
            return Err(Error::Config("min_gain must be >= 0".into()));
        }
        Ok(())
    }
}

/// Modularity of a partition at resolution γ.
///
/// Both sum terms are accumulated over the same canonical edge traversal,
/// which makes the all-in-one-community case come out as exactly `1 − γ`
/// (so exactly zero at γ = 1) instead of drifting by rounding.
pub fn modularity(sg: &SimilarityGraph, p: &Partition, resolution: f64) -> Result<f64> {
    if sg.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if p.len() != sg.node_count() {
        return Err(Error::Mismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            sg.node_count()
        )));
    }
    if sg.edge_count() == 0 {
        return Err(Error::Degenerate(
            "modularity needs at least one edge (m > 0)".into(),
        ));
    }
    let k = p.num_communities() as usize;
    let mut two_m = 0.0;
    let mut intra = vec![0.0f64; k]; // Σ_c of intra edge weight
    let mut degree = vec![0.0f64; k]; // Σ_c of member weighted degrees
    for &(a, b, w) in sg.edge_list() {
        let ca = p.community_of(a as usize) as usize;
        let cb = p.community_of(b as usize) as usize;
        two_m += 2.0 * w;
        if ca == cb {
            intra[ca] += w;
            degree[ca] += 2.0 * w;
        } else {
            degree[ca] += w;
            degree[cb] += w;
        }
    }
    let mut q = 0.0;
    for c in 0..k {
        let share = degree[c] / two_m;
        q += 2.0 * intra[c] / two_m - resolution * share * share;
    }
    Ok(q)
}

/// Louvain working graph: adjacency without self entries, plus explicit
/// self-loop weights created by aggregation.
struct WorkingGraph {
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    m: f64,
}

impl WorkingGraph {
    fn from_similarity(sg: &SimilarityGraph) -> Self {
        let n = sg.node_count();
        let adj: Vec<Vec<(u32, f64)>> = (0..n as u32).map(|v| sg.neighbors(v).to_vec()).collect();
        let self_loop = vec![0.0; n];
        let degree: Vec<f64> = adj
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        let m = degree.iter().sum::<f64>() / 2.0;
        Self {
            adj,
            self_loop,
            degree,
            m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// One local-moving phase. Returns the node→community labeling and the
    /// number of moves applied.
    fn local_moves(
        &self,
        order: &[u32],
        resolution: f64,
        min_gain: f64,
    ) -> (Vec<u32>, usize) {
        let n = self.len();
        let m = self.m;
        let mut comm: Vec<u32> = (0..n as u32).collect();
        let mut sigma = self.degree.clone();
        let mut weight_to: Vec<f64> = vec![0.0; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut total_moves = 0usize;

        // Each accepted move improves Q by more than min_gain, so the loop
        // terminates; the sweep cap is a guard against pathological
        // floating-point cycling when min_gain is zero.
        for _sweep in 0..10_000 {
            let mut moves = 0usize;
            for &v in order {
                let v = v as usize;
                let old = comm[v];
                let k_v = self.degree[v];
                sigma[old as usize] -= k_v;

                touched.clear();
                for &(nbr, w) in &self.adj[v] {
                    let c = comm[nbr as usize];
                    if weight_to[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c as usize] += w;
                }
                touched.sort_unstable();

                let remove_cost = -weight_to[old as usize] / m
                    + resolution * sigma[old as usize] * k_v / (2.0 * m * m);
                let mut best = old;
                let mut best_gain = min_gain;
                for &c in &touched {
                    if c == old {
                        continue;
                    }
                    let gain = remove_cost + weight_to[c as usize] / m
                        - resolution * sigma[c as usize] * k_v / (2.0 * m * m);
                    if gain > best_gain {
                        best_gain = gain;
                        best = c;
                    }
                }
                for &c in &touched {
                    weight_to[c as usize] = 0.0;
                }

                sigma[best as usize] += k_v;
                if best != old {
                    comm[v] = best;
                    moves += 1;
                }
            }
            total_moves += moves;
            if moves == 0 {
                return (comm, total_moves);
            }
        }
        log::warn!("local moving hit the sweep cap; returning current labeling");
        (comm, total_moves)
    }

    /// Collapse communities into meta-nodes. Returns the new graph and the
    /// community-id → meta-node mapping (dense, by first appearance).
    fn aggregate(&self, comm: &[u32]) -> (WorkingGraph, Vec<u32>) {
        let n = self.len();
        let mut dense = vec![u32::MAX; n];
        let mut next = 0u32;
        for &c in comm {
            if dense[c as usize] == u32::MAX {
                dense[c as usize] = next;
                next += 1;
            }
        }
        let n_new = next as usize;

        let mut self_loop = vec![0.0f64; n_new];
        let mut maps: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); n_new];
        for i in 0..n {
            let ci = dense[comm[i] as usize];
            self_loop[ci as usize] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = dense[comm[j as usize] as usize];
                if ci == cj {
                    // Visited from both endpoints, so intra edges contribute
                    // twice their weight to the meta self-loop.
                    self_loop[ci as usize] += w;
                } else {
                    *maps[ci as usize].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(u32, f64)>> = maps
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let degree: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(list, &sl)| list.iter().map(|&(_, w)| w).sum::<f64>() + sl)
            .collect();
        let m = degree.iter().sum::<f64>() / 2.0;
        (
            WorkingGraph {
                adj,
                self_loop,
                degree,
                m,
            },
            dense,
        )
    }
}

/// Detect communities by multi-level Louvain.
///
/// Deterministic for a fixed seed. The returned partition's modularity is
/// never below the all-singletons baseline. A graph without edges yields
/// the singleton partition.
pub fn louvain(sg: &SimilarityGraph, cfg: &LouvainConfig) -> Result<Partition> {
    cfg.validate()?;
    let n = sg.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if sg.edge_count() == 0 {
        return Ok(Partition::singletons(n));
    }

    let mut wg = WorkingGraph::from_similarity(sg);
    let mut assignment: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for _pass in 0..cfg.max_passes {
        let mut order: Vec<u32> = (0..wg.len() as u32).collect();
        order.shuffle(&mut rng);
        let (comm, moves) = wg.local_moves(&order, cfg.resolution, cfg.min_gain);
        if moves == 0 {
            break;
        }
        let (new_wg, dense) = wg.aggregate(&comm);
        for slot in assignment.iter_mut() {
            *slot = dense[comm[*slot as usize] as usize];
        }
        let shrunk = new_wg.len() < wg.len();
        wg = new_wg;
        if !shrunk {
            break;
        }
    }
    Ok(Partition::from_assignment(&assignment))
}

/// Induced subgraph on one community; only intra-community edges survive.
/// Node order (and interning order) follows the parent graph.
pub fn subgraph(sg: &SimilarityGraph, p: &Partition, community: u32) -> Result<SimilarityGraph> {
    if p.len() != sg.node_count() {
        return Err(Error::Mismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            sg.node_count()
        )));
    }
    if community >= p.num_communities() {
        return Err(Error::UnknownCommunity(community));
    }
    let mut remap = vec![u32::MAX; sg.node_count()];
    let mut books = IdIndex::new();
    for (node, name) in sg.books().iter() {
        if p.community_of(node as usize) == community {
            remap[node as usize] = books.intern(name);
        }
    }
    let edges: Vec<(u32, u32, f64)> = sg
        .edge_list()
        .iter()
        .filter(|&&(a, b, _)| {
            remap[a as usize] != u32::MAX && remap[b as usize] != u32::MAX
        })
        .map(|&(a, b, w)| (remap[a as usize], remap[b as usize], w))
        .collect();
    SimilarityGraph::from_edges(books, edges)
}

fn mix_seed(seed: u64, community: u32) -> u64 {
    // splitmix64 of the seed xored with the community tag.
    let mut z = seed ^ (u64::from(community) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Rerun Louvain inside each community of `p`, with per-community seeds
/// derived deterministically from `cfg.seed` and the community id.
pub fn sub_communities(
    sg: &SimilarityGraph,
    p: &Partition,
    cfg: &LouvainConfig,
) -> Result<BTreeMap<u32, (SimilarityGraph, Partition)>> {
    let mut out = BTreeMap::new();
    for community in 0..p.num_communities() {
        let sub = subgraph(sg, p, community)?;
        let sub_cfg = LouvainConfig {
            seed: mix_seed(cfg.seed, community),
            ..cfg.clone()
        };
        let partition = louvain(&sub, &sub_cfg)?;
        out.insert(community, (sub, partition));
    }
    Ok(out)
}

/// Normalized mutual information between two partitions of the same node
/// set, in `[0, 1]`; 1 exactly when they are identical up to relabeling.
/// Uses the arithmetic-mean normalization `2·I / (H(a) + H(b))`.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "partitions cover {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut count_a = vec![0u64; a.num_communities() as usize];
    let mut count_b = vec![0u64; b.num_communities() as usize];
    for node in 0..a.len() {
        let ca = a.community_of(node);
        let cb = b.community_of(node);
        *joint.entry((ca, cb)).or_insert(0) += 1;
        count_a[ca as usize] += 1;
        count_b[cb as usize] += 1;
    }
    let entropy = |counts: &[u64]| -> f64 {
        counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&count_a);
    let h_b = entropy(&count_b);
    if h_a + h_b == 0.0 {
        // Both partitions are a single community over the same nodes.
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (&(ca, cb), &c) in &joint {
        let p = c as f64 / n;
        mi += p * (c as f64 * n / (count_a[ca as usize] as f64 * count_b[cb as usize] as f64))
            .ln();
    }
    Ok((2.0 * mi / (h_a + h_b)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SimilarityGraph;

    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn clique(names: &[&str], weight: f64) -> Vec<(String, String, f64)> {
        let mut edges = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                edges.push((names[i].to_string(), names[j].to_string(), weight));
            }
        }
        edges
    }

    fn graph_from(edges: &[(String, String, f64)]) -> SimilarityGraph {
        let borrowed: Vec<(&str, &str, f64)> = edges
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        SimilarityGraph::from_named_edges(&borrowed).unwrap()
    }

    fn random_weighted_graph(rng: &mut StdRng, n: usize, p_edge: f64) -> SimilarityGraph {
        let mut books = IdIndex::new();
        for i in 0..n {
            books.intern(&format!("n{i}"));
        }
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                if rng.random_bool(p_edge) {
                    edges.push((i, j, rng.random_range(0.05..=1.0f64)));
                }
            }
        }
        if edges.is_empty() {
            edges.push((0, 1, 0.5));
        }
        SimilarityGraph::from_edges(books, edges).unwrap()
    }

    /// O(n²) double-sum oracle over the dense weight matrix.
    fn modularity_oracle(sg: &SimilarityGraph, p: &Partition, gamma: f64) -> f64 {
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

    #[test]
    fn one_community_is_exactly_zero_at_unit_resolution() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let sg = random_weighted_graph(&mut rng, 10, 0.4);
            let p = Partition::from_assignment(&vec![0; sg.node_count()]);
            assert_eq!(modularity(&sg, &p, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_disjoint_triangles_score_half() {
        let mut edges = clique(&["a", "b", "c"], 0.7);
        edges.extend(clique(&["x", "y", "z"], 0.7));
        let sg = graph_from(&edges);
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        let q = modularity(&sg, &p, 1.0).unwrap();
        assert!((q - 0.5).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn modularity_matches_double_sum_oracle() {
        let mut rng = StdRng::seed_from_u64(32);
        for _ in 0..100 {
            let n = rng.random_range(3..=12);
            let sg = random_weighted_graph(&mut rng, n, 0.5);
            let labels: Vec<u32> = (0..sg.node_count())
                .map(|_| rng.random_range(0..4u32))
                .collect();
            let p = Partition::from_assignment(&labels);
            let gamma = rng.random_range(0.3..=2.5f64);
            let got = modularity(&sg, &p, gamma).unwrap();
            let want = modularity_oracle(&sg, &p, gamma);
            assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
        }
    }

    #[test]
    fn modularity_input_errors() {
        let sg = graph_from(&clique(&["a", "b", "c"], 0.5));
        let short = Partition::from_assignment(&[0, 0]);
        assert!(matches!(
            modularity(&sg, &short, 1.0),
            Err(Error::Mismatch(_))
        ));

        let mut empty_books = IdIndex::new();
        empty_books.intern("a");
        let edgeless = SimilarityGraph::from_edges(empty_books, vec![]).unwrap();
        let p1 = Partition::from_assignment(&[0]);
        assert!(modularity(&edgeless, &p1, 1.0).is_err());
    }

    #[test]
    fn modularity_invariant_under_relabeling() {
        let mut rng = StdRng::seed_from_u64(33);
        let sg = random_weighted_graph(&mut rng, 12, 0.5);
        let labels: Vec<u32> = (0..12).map(|_| rng.random_range(0..3u32)).collect();
        let p = Partition::from_assignment(&labels);
        let relabeled: Vec<u32> = labels.iter().map(|&c| 2 - c).collect();
        let q1 = modularity(&sg, &p, 1.3).unwrap();
        let q2 = modularity(&sg, &Partition::from_assignment(&relabeled), 1.3).unwrap();
        assert!((q1 - q2).abs() < 1e-12);
    }

    #[test]
    fn modularity_and_louvain_are_weight_scale_free() {
        let mut rng = StdRng::seed_from_u64(34);
        let sg = random_weighted_graph(&mut rng, 14, 0.45);
        let cfg = LouvainConfig {
            seed: 5,
            ..LouvainConfig::default()
        };
        let p = louvain(&sg, &cfg).unwrap();

        // Power-of-two scaling commutes with rounding: identical trajectory.
        let quarter: Vec<(u32, u32, f64)> = sg
            .edge_list()
            .iter()
            .map(|&(a, b, w)| (a, b, w * 0.25))
            .collect();
        let sg_quarter = SimilarityGraph::from_edges(sg.books().clone(), quarter).unwrap();
        let p_quarter = louvain(&sg_quarter, &cfg).unwrap();
        assert_eq!(p, p_quarter);
        assert_eq!(
            modularity(&sg, &p, 1.0).unwrap(),
            modularity(&sg_quarter, &p_quarter, 1.0).unwrap()
        );

        // Arbitrary scaling agrees to rounding error.
        let third: Vec<(u32, u32, f64)> = sg
            .edge_list()
            .iter()
            .map(|&(a, b, w)| (a, b, w / 3.0))
            .collect();
        let sg_third = SimilarityGraph::from_edges(sg.books().clone(), third).unwrap();
        let q1 = modularity(&sg, &p, 1.0).unwrap();
        let q3 = modularity(&sg_third, &p, 1.0).unwrap();
        assert!((q1 - q3).abs() < 1e-12);
    }

    #[test]
    fn louvain_splits_two_disjoint_cliques() {
        let mut edges = clique(&["a", "b", "c", "d", "e"], 1.0);
        edges.extend(clique(&["v", "w", "x", "y", "z"], 1.0));
        let sg = graph_from(&edges);
        let p = louvain(&sg, &LouvainConfig::default()).unwrap();
        assert_eq!(p.num_communities(), 2);
        let first = p.community_of(0);
        for node in 0..5 {
            assert_eq!(p.community_of(node), first);
        }
        for node in 5..10 {
            assert_ne!(p.community_of(node), first);
        }
    }

    /// All set partitions of `0..n` as restricted-growth strings.
    fn all_partitions(n: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
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
        if n > 0 {
            rec(&mut current, 1, 0, &mut out);
        }
        out
    }

    #[test]
    fn louvain_on_complete_graphs_lands_between_baseline_and_optimum() {
        for n in 2..=8usize {
            let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let sg = graph_from(&clique(&refs, 0.8));
            let detected = louvain(&sg, &LouvainConfig::default()).unwrap();
            let got = modularity(&sg, &detected, 1.0).unwrap();

            let singles = modularity(&sg, &Partition::singletons(n), 1.0).unwrap();
            let best = all_partitions(n)
                .into_iter()
                .map(|labels| {
                    modularity(&sg, &Partition::from_assignment(&labels), 1.0).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                got >= singles - 1e-12 && got <= best + 1e-12,
                "n={n}: got {got}, baseline {singles}, optimum {best}"
            );
        }
    }

    #[test]
    fn louvain_never_below_singleton_baseline() {
        let mut rng = StdRng::seed_from_u64(35);
        for _ in 0..25 {
            let n = rng.random_range(4..=16);
            let sg = random_weighted_graph(&mut rng, n, 0.3);
            let p = louvain(
                &sg,
                &LouvainConfig {
                    seed: rng.random_range(0..1000),
                    ..LouvainConfig::default()
                },
            )
            .unwrap();
            let q = modularity(&sg, &p, 1.0).unwrap();
            let baseline = modularity(&sg, &Partition::singletons(sg.node_count()), 1.0).unwrap();
            assert!(q >= baseline - 1e-12);
        }
    }

    #[test]
    fn louvain_deterministic_for_fixed_seed() {
        let mut rng = StdRng::seed_from_u64(36);
        let sg = random_weighted_graph(&mut rng, 30, 0.2);
        let cfg = LouvainConfig {
            seed: 77,
            ..LouvainConfig::default()
        };
        assert_eq!(louvain(&sg, &cfg).unwrap(), louvain(&sg, &cfg).unwrap());
    }

    #[test]
    fn louvain_on_edgeless_graph_returns_singletons() {
        let mut books = IdIndex::new();
        for name in ["a", "b", "c"] {
            books.intern(name);
        }
        let sg = SimilarityGraph::from_edges(books, vec![]).unwrap();
        let p = louvain(&sg, &LouvainConfig::default()).unwrap();
        assert_eq!(p.num_communities(), 3);
    }

    #[test]
    fn subgraph_restriction() {
        let mut edges = clique(&["a", "b", "c"], 0.9);
        edges.push(("a".into(), "x".into(), 0.2));
        let sg = graph_from(&edges);
        let p = Partition::from_assignment(&[0, 0, 0, 1]);

        let sub = subgraph(&sg, &p, 1).unwrap();
        assert_eq!(sub.node_count(), 1);
        assert_eq!(sub.edge_count(), 0);

        let whole = subgraph(&sg, &Partition::from_assignment(&[0, 0, 0, 0]), 0).unwrap();
        assert_eq!(whole.edge_count(), sg.edge_count());
        assert_eq!(whole.node_count(), sg.node_count());

        assert!(matches!(
            subgraph(&sg, &p, 7),
            Err(Error::UnknownCommunity(7))
        ));
    }

    #[test]
    fn subgraph_matches_edge_filter_oracle() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..15 {
            let sg = random_weighted_graph(&mut rng, 15, 0.35);
            let labels: Vec<u32> = (0..15).map(|_| rng.random_range(0..3u32)).collect();
            let p = Partition::from_assignment(&labels);
            for c in 0..p.num_communities() {
                let sub = subgraph(&sg, &p, c).unwrap();
                let expected: Vec<(String, String, f64)> = sg
                    .edge_list()
                    .iter()
                    .filter(|&&(a, b, _)| {
                        p.community_of(a as usize) == c && p.community_of(b as usize) == c
                    })
                    .map(|&(a, b, w)| {
                        (
                            sg.books().name(a).to_string(),
                            sg.books().name(b).to_string(),
                            w,
                        )
                    })
                    .collect();
                assert_eq!(sub.edge_count(), expected.len());
                for (a, b, w) in expected {
                    assert_eq!(sub.weight(&a, &b), Some(w));
                }
            }
        }
    }

    #[test]
    fn sub_communities_on_cliques() {
        // One community that is a clique stays whole; one made of two
        // disjoint cliques splits in two.
        let mut edges = clique(&["a", "b", "c", "d"], 0.9);
        edges.extend(clique(&["p", "q", "r"], 0.9));
        edges.extend(clique(&["x", "y", "z"], 0.9));
        let sg = graph_from(&edges);
        let p = Partition::from_assignment(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 1]);
        let subs = sub_communities(&sg, &p, &LouvainConfig::default()).unwrap();
        assert_eq!(subs[&0].1.num_communities(), 1);
        assert_eq!(subs[&1].1.num_communities(), 2);
    }

    /// Two super-blocks, each holding two tight sub-blocks.
    fn two_level_fixture() -> (SimilarityGraph, Vec<u32>, Vec<u32>) {
        let block = 10usize;
        let names: Vec<String> = (0..4 * block).map(|i| format!("n{i:02}")).collect();
        let super_of = |i: usize| (i / (2 * block)) as u32;
        let sub_of = |i: usize| (i / block) as u32;
        let mut edges = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                let w = if sub_of(i) == sub_of(j) {
                    0.9
                } else if super_of(i) == super_of(j) {
                    0.35
                } else {
                    0.02
                };
                edges.push((names[i].clone(), names[j].clone(), w));
            }
        }
        let supers = (0..4 * block).map(super_of).collect();
        let subs = (0..4 * block).map(sub_of).collect();
        (graph_from(&edges), supers, subs)
    }

    #[test]
    fn sub_communities_recover_planted_two_level_structure() {
        let (sg, supers, subs) = two_level_fixture();
        let cfg = LouvainConfig::default();
        let top = louvain(&sg, &cfg).unwrap();
        let planted_top = Partition::from_assignment(&supers);
        assert!(nmi(&top, &planted_top).unwrap() >= 0.9);

        let planted_sub = Partition::from_assignment(&subs);
        for (community, (sub_sg, sub_p)) in sub_communities(&sg, &top, &cfg).unwrap() {
            let _ = community;
            let planted_here = planted_sub
                .restricted(sg.books(), sub_sg.books())
                .unwrap();
            assert!(
                nmi(&sub_p, &planted_here).unwrap() >= 0.9,
                "sub-community recovery below 0.9"
            );
        }
    }

    #[test]
    fn nmi_identical_partitions() {
        let p = Partition::from_assignment(&[0, 1, 1, 2, 0]);
        let relabeled = Partition::from_assignment(&[5, 9, 9, 7, 5]);
        assert_eq!(nmi(&p, &p).unwrap(), 1.0);
        assert_eq!(nmi(&p, &relabeled).unwrap(), 1.0);
    }

    #[test]
    fn nmi_singletons_vs_monolith_is_zero() {
        let singles = Partition::singletons(8);
        let one = Partition::from_assignment(&[0; 8]);
        assert_eq!(nmi(&singles, &one).unwrap(), 0.0);
    }

    #[test]
    fn nmi_rejects_mismatched_node_sets() {
        let a = Partition::singletons(4);
        let b = Partition::singletons(5);
        assert!(matches!(nmi(&a, &b), Err(Error::Mismatch(_))));
    }

    /// Independent oracle: builds explicit probability tables and evaluates
    /// `I(A;B)` and the entropies directly.
    fn nmi_oracle(a: &[u32], b: &[u32]) -> f64 {
        let n = a.len() as f64;
        let mut p_a: BTreeMap<u32, f64> = BTreeMap::new();
        let mut p_b: BTreeMap<u32, f64> = BTreeMap::new();
        let mut p_ab: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for i in 0..a.len() {
            *p_a.entry(a[i]).or_insert(0.0) += 1.0 / n;
            *p_b.entry(b[i]).or_insert(0.0) += 1.0 / n;
            *p_ab.entry((a[i], b[i])).or_insert(0.0) += 1.0 / n;
        }
        let mi: f64 = p_ab
            .iter()
            .map(|(&(ca, cb), &p)| p * (p / (p_a[&ca] * p_b[&cb])).ln())
            .sum();
        let h = |m: &BTreeMap<u32, f64>| -> f64 { m.values().map(|&p| -p * p.ln()).sum() };
        let (ha, hb) = (h(&p_a), h(&p_b));
        if ha + hb == 0.0 {
            1.0
        } else {
            (2.0 * mi / (ha + hb)).clamp(0.0, 1.0)
        }
    }

    #[test]
    fn nmi_matches_contingency_oracle() {
        let mut rng = StdRng::seed_from_u64(38);
        for _ in 0..50 {
            let a: Vec<u32> = (0..20).map(|_| rng.random_range(0..4u32)).collect();
            let b: Vec<u32> = (0..20).map(|_| rng.random_range(0..4u32)).collect();
            let got = nmi(
                &Partition::from_assignment(&a),
                &Partition::from_assignment(&b),
            )
            .unwrap();
            let want = nmi_oracle(&a, &b);
            assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
        }
    }
}
