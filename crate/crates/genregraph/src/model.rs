//! Core value types: interned id spaces, the bipartite rating graph, the
//! projected similarity network, community partitions, subject catalogs and
//! the matrices consumed by the enrichment/PCA stages.
//!
//! All types are immutable after construction and safe to share across
//! threads; pipelines rebuild rather than patch.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Interned string identifiers with stable dense `u32` indices.
///
/// Node ids are opaque strings from the input. Internally every algorithm
/// works on dense indices; outputs map back to the original strings.
#[derive(Debug, Clone, Default)]
pub struct IdIndex {
    names: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl IdIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index for `name`, interning it if unseen.
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&idx) = self.lookup.get(name) {
            return idx;
        }
        let idx = u32::try_from(self.names.len()).expect("more than u32::MAX ids");
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), idx);
        idx
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, idx: u32) -> &str {
        &self.names[idx as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Iterate `(index, name)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (i as u32, n.as_str()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// How `parse_ratings` treats repeated `(user, book)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Repeated pairs are a corpus bug; fail with the offending line.
    #[default]
    Error,
    /// Keep the maximum rating seen for the pair.
    KeepMax,
}

/// Bipartite user→book graph with integer star ratings in `[1, 5]`.
///
/// Every edge endpoint exists in the corresponding node set, there is at
/// most one edge per `(user, book)` pair, and nodes may carry zero edges
/// (rating filters keep emptied nodes around on purpose).
#[derive(Debug, Clone)]
pub struct RatingGraph {
    users: IdIndex,
    books: IdIndex,
    by_user: Vec<Vec<(u32, u8)>>,
    by_book: Vec<Vec<(u32, u8)>>,
    edge_count: usize,
}

impl RatingGraph {
    pub fn builder() -> RatingGraphBuilder {
        RatingGraphBuilder::new(DuplicatePolicy::Error)
    }

    pub fn builder_with_policy(policy: DuplicatePolicy) -> RatingGraphBuilder {
        RatingGraphBuilder::new(policy)
    }

    pub fn users(&self) -> &IdIndex {
        &self.users
    }

    pub fn books(&self) -> &IdIndex {
        &self.books
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn book_count(&self) -> usize {
        self.books.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `(book, rating)` pairs of a user, sorted by book index.
    pub fn books_of(&self, user: u32) -> &[(u32, u8)] {
        &self.by_user[user as usize]
    }

    /// `(user, rating)` pairs of a book, sorted by user index.
    pub fn readers_of(&self, book: u32) -> &[(u32, u8)] {
        &self.by_book[book as usize]
    }

    /// The set of user ids adjacent to `book`.
    pub fn reader_set(&self, book: &str) -> Result<BTreeSet<&str>> {
        let idx = self
            .books
            .get(book)
            .ok_or_else(|| Error::UnknownBook(book.to_string()))?;
        Ok(self
            .readers_of(idx)
            .iter()
            .map(|&(u, _)| self.users.name(u))
            .collect())
    }

    /// Edges as `(user, book, rating)` index triples, ordered by user then book.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u8)> + '_ {
        self.by_user
            .iter()
            .enumerate()
            .flat_map(|(u, books)| books.iter().map(move |&(b, r)| (u as u32, b, r)))
    }

    /// Content equality independent of interning order.
    pub fn same_content(&self, other: &RatingGraph) -> bool {
        let names = |ix: &IdIndex| ix.names().map(str::to_string).collect::<BTreeSet<_>>();
        if names(&self.users) != names(&other.users) || names(&self.books) != names(&other.books) {
            return false;
        }
        let canon = |g: &RatingGraph| {
            g.edges()
                .map(|(u, b, r)| {
                    (
                        g.users.name(u).to_string(),
                        g.books.name(b).to_string(),
                        r,
                    )
                })
                .collect::<BTreeSet<_>>()
        };
        canon(self) == canon(other)
    }
}

/// Accumulates edges, then freezes them into a [`RatingGraph`].
#[derive(Debug)]
pub struct RatingGraphBuilder {
    users: IdIndex,
    books: IdIndex,
    edges: HashMap<(u32, u32), u8>,
    policy: DuplicatePolicy,
}

impl RatingGraphBuilder {
    fn new(policy: DuplicatePolicy) -> Self {
        Self {
            users: IdIndex::new(),
            books: IdIndex::new(),
            edges: HashMap::new(),
            policy,
        }
    }

    /// Ensure a user node exists even if it ends up with no edges.
    pub fn add_user(&mut self, name: &str) -> u32 {
        self.users.intern(name)
    }

    /// Ensure a book node exists even if it ends up with no edges.
    pub fn add_book(&mut self, name: &str) -> u32 {
        self.books.intern(name)
    }

    /// Add one edge. Fails on out-of-range ratings and, under
    /// [`DuplicatePolicy::Error`], on repeated `(user, book)` pairs.
    pub fn add_edge(&mut self, user: &str, book: &str, rating: u8) -> Result<()> {
        if !(1..=5).contains(&rating) {
            return Err(Error::Config(format!(
                "rating {rating} outside [1,5] for ({user}, {book})"
            )));
        }
        let u = self.users.intern(user);
        let b = self.books.intern(book);
        match self.edges.entry((u, b)) {
            std::collections::hash_map::Entry::Occupied(mut e) => match self.policy {
                DuplicatePolicy::Error => {
                    return Err(Error::Config(format!(
                        "duplicate rating for ({user}, {book})"
                    )))
                }
                DuplicatePolicy::KeepMax => {
                    let prev = *e.get();
                    e.insert(prev.max(rating));
                }
            },
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(rating);
            }
        }
        Ok(())
    }

    pub fn build(self) -> RatingGraph {
        let mut by_user = vec![Vec::new(); self.users.len()];
        let mut by_book = vec![Vec::new(); self.books.len()];
        let edge_count = self.edges.len();
        for (&(u, b), &r) in &self.edges {
            by_user[u as usize].push((b, r));
            by_book[b as usize].push((u, r));
        }
        for list in &mut by_user {
            list.sort_unstable();
        }
        for list in &mut by_book {
            list.sort_unstable();
        }
        RatingGraph {
            users: self.users,
            books: self.books,
            by_user,
            by_book,
            edge_count,
        }
    }
}

/// Weighted undirected book–book network with Jaccard weights.
///
/// No self-loops; each unordered pair is stored once and mirrored in both
/// adjacency lists; weights lie in `(0, 1]` (zero-similarity pairs are
/// absent, never stored as 0).
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    books: IdIndex,
    adj: Vec<Vec<(u32, f64)>>,
    edges: Vec<(u32, u32, f64)>,
    total_weight: f64,
}

impl SimilarityGraph {
    /// Build from a canonical edge list. Edges must use `a < b` index pairs,
    /// be duplicate-free, and carry weights in `(0, 1]`.
    pub fn from_edges(books: IdIndex, mut edges: Vec<(u32, u32, f64)>) -> Result<Self> {
        let n = books.len() as u32;
        edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut adj = vec![Vec::new(); n as usize];
        let mut total_weight = 0.0;
        let mut prev: Option<(u32, u32)> = None;
        for &(a, b, w) in &edges {
            if a >= b {
                return Err(Error::Config(format!(
                    "edge ({a}, {b}) is not a canonical a < b pair"
                )));
            }
            if b >= n {
                return Err(Error::Config(format!("edge endpoint {b} out of range")));
            }
            if prev == Some((a, b)) {
                return Err(Error::Config(format!("duplicate edge ({a}, {b})")));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::Config(format!(
                    "weight {w} for edge ({a}, {b}) outside (0, 1]"
                )));
            }
            prev = Some((a, b));
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
            total_weight += w;
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(v, _)| v);
        }
        Ok(Self {
            books,
            adj,
            edges,
            total_weight,
        })
    }

    /// Convenience constructor from named edges, mostly for tests and
    /// hand-built fixtures. Names are interned in order of appearance.
    pub fn from_named_edges(edges: &[(&str, &str, f64)]) -> Result<Self> {
        let mut books = IdIndex::new();
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            let ia = books.intern(a);
            let ib = books.intern(b);
            if ia == ib {
                return Err(Error::Config(format!("self-loop on `{a}`")));
            }
            let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
            list.push((lo, hi, w));
        }
        Self::from_edges(books, list)
    }

    pub fn books(&self) -> &IdIndex {
        &self.books
    }

    pub fn node_count(&self) -> usize {
        self.books.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights (each unordered edge counted once).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Canonical edge list, sorted `(a, b)` with `a < b`.
    pub fn edge_list(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    /// Neighbors of a node with weights, sorted by neighbor index.
    pub fn neighbors(&self, node: u32) -> &[(u32, f64)] {
        &self.adj[node as usize]
    }

    /// Weight between two nodes by index; `None` when the pair has no edge.
    pub fn weight_between(&self, a: u32, b: u32) -> Option<f64> {
        self.adj[a as usize]
            .binary_search_by_key(&b, |&(v, _)| v)
            .ok()
            .map(|i| self.adj[a as usize][i].1)
    }

    /// Weight between two nodes by name.
    pub fn weight(&self, a: &str, b: &str) -> Option<f64> {
        let ia = self.books.get(a)?;
        let ib = self.books.get(b)?;
        self.weight_between(ia, ib)
    }
}

/// Assignment of every node of a graph to exactly one community.
///
/// Community ids are dense `0..k` with no empty community; the index space
/// is that of the graph the partition was computed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    communities: u32,
}

impl Partition {
    /// Build from raw labels, renumbering them to dense ids `0..k` in order
    /// of first appearance.
    pub fn from_assignment(raw: &[u32]) -> Partition {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &label in raw {
            let next = remap.len() as u32;
            let id = *remap.entry(label).or_insert(next);
            assignment.push(id);
        }
        Partition {
            assignment,
            communities: remap.len() as u32,
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n as u32).collect(),
            communities: n as u32,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_communities(&self) -> u32 {
        self.communities
    }

    pub fn community_of(&self, node: usize) -> u32 {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Node indices of one community, ascending.
    pub fn members(&self, community: u32) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == community)
            .map(|(i, _)| i)
            .collect()
    }

    /// Community sizes indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.communities as usize];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Restrict a partition over `source` ids to the node set of `target`,
    /// renumbering communities densely. Every target name must exist in
    /// `source`.
    pub fn restricted(&self, source: &IdIndex, target: &IdIndex) -> Result<Partition> {
        if self.assignment.len() != source.len() {
            return Err(Error::Mismatch(format!(
                "partition covers {} nodes but source id space has {}",
                self.assignment.len(),
                source.len()
            )));
        }
        let mut raw = Vec::with_capacity(target.len());
        for (_, name) in target.iter() {
            let idx = source.get(name).ok_or_else(|| {
                Error::Mismatch(format!("node `{name}` missing from source partition"))
            })?;
            raw.push(self.assignment[idx as usize]);
        }
        Ok(Partition::from_assignment(&raw))
    }
}

/// Book → set of subject labels; the proxy for traditional genre.
///
/// Subject strings are whitespace-trimmed and non-empty; a book missing from
/// the catalog simply has no subjects.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubjectCatalog {
    by_book: BTreeMap<String, BTreeSet<String>>,
}

impl SubjectCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record that `book` carries `subject`. Repeated insertions collapse to
    /// one membership; empty-after-trim subjects are rejected.
    pub fn insert(&mut self, book: &str, subject: &str) -> Result<()> {
        let trimmed = subject.trim();
        if trimmed.is_empty() {
            return Err(Error::Config(format!("empty subject for book `{book}`")));
        }
        self.by_book
            .entry(book.to_string())
            .or_default()
            .insert(trimmed.to_string());
        Ok(())
    }

    /// Ensure a book exists in the catalog, possibly with zero subjects.
    pub fn touch(&mut self, book: &str) {
        self.by_book.entry(book.to_string()).or_default();
    }

    pub fn subjects_of(&self, book: &str) -> Option<&BTreeSet<String>> {
        self.by_book.get(book)
    }

    pub fn book_count(&self) -> usize {
        self.by_book.len()
    }

    /// Iterate `(book, subjects)` in book order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.by_book.iter().map(|(b, s)| (b.as_str(), s))
    }

    /// All distinct subjects, sorted.
    pub fn all_subjects(&self) -> BTreeSet<&str> {
        self.by_book
            .values()
            .flat_map(|s| s.iter().map(String::as_str))
            .collect()
    }

    pub fn distinct_subject_count(&self) -> usize {
        self.all_subjects().len()
    }
}

/// Per-community subject prevalence: rows are subjects (the "individuals"),
/// columns are communities (the "variables").
///
/// `entry(s, c)` is the fraction of community `c`'s subject-bearing books
/// that carry subject `s`; column sums may exceed 1 because books carry
/// multiple subjects.
#[derive(Debug, Clone)]
pub struct CommunitySubjectMatrix {
    subjects: Vec<String>,
    communities: Vec<u32>,
    prevalence: DMatrix<f64>,
    counts: Vec<u32>,
    community_totals: Vec<u32>,
}

impl CommunitySubjectMatrix {
    pub(crate) fn new(
        subjects: Vec<String>,
        communities: Vec<u32>,
        prevalence: DMatrix<f64>,
        counts: Vec<u32>,
        community_totals: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(prevalence.nrows(), subjects.len());
        debug_assert_eq!(prevalence.ncols(), communities.len());
        debug_assert_eq!(counts.len(), subjects.len() * communities.len());
        Self {
            subjects,
            communities,
            prevalence,
            counts,
            community_totals,
        }
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn communities(&self) -> &[u32] {
        &self.communities
    }

    pub fn prevalence(&self) -> &DMatrix<f64> {
        &self.prevalence
    }

    pub fn entry(&self, subject: usize, community: usize) -> f64 {
        self.prevalence[(subject, community)]
    }

    /// Number of books in `community` carrying `subject`.
    pub fn count(&self, subject: usize, community: usize) -> u32 {
        self.counts[subject * self.communities.len() + community]
    }

    /// Number of subject-bearing books in `community`.
    pub fn community_total(&self, community: usize) -> u32 {
        self.community_totals[community]
    }
}

/// Principal-component decomposition of a [`CommunitySubjectMatrix`].
///
/// `loadings` is dimensions × communities with unit-norm rows; `scores` is
/// subjects × dimensions; `explained_variance_ratio` is per retained
/// dimension, non-increasing.
#[derive(Debug, Clone)]
pub struct PcaResult {
    pub(crate) loadings: DMatrix<f64>,
    pub(crate) scores: DMatrix<f64>,
    pub(crate) explained_variance_ratio: Vec<f64>,
    pub(crate) subjects: Vec<String>,
    pub(crate) communities: Vec<u32>,
}

impl PcaResult {
    pub fn dimensions(&self) -> usize {
        self.loadings.nrows()
    }

    pub fn loadings(&self) -> &DMatrix<f64> {
        &self.loadings
    }

    pub fn scores(&self) -> &DMatrix<f64> {
        &self.scores
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }

    /// Subject labels for score rows.
    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    /// Community ids for loading columns.
    pub fn communities(&self) -> &[u32] {
        &self.communities
    }
}
