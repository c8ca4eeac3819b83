//! Subject pruning, per-community subject distributions, and enrichment of
//! each community's distribution against the whole network.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{CommunitySubjectMatrix, Partition, SimilarityGraph, SubjectCatalog};

/// Keep subjects appearing in at least this many in-scope books ("a dozen
/// or less" are ignored).
pub const DEFAULT_SUBJECT_MIN_COUNT: usize = 13;

/// Drop subjects carried by fewer than `min_count` in-scope books.
///
/// The returned catalog covers exactly the in-scope books; books are kept
/// even when pruning leaves them subject-less. Idempotent for a fixed scope.
pub fn prune_subjects<'a, I>(
    catalog: &SubjectCatalog,
    books_in_scope: I,
    min_count: usize,
) -> SubjectCatalog
where
    I: IntoIterator<Item = &'a str>,
{
    let scope: Vec<&str> = books_in_scope.into_iter().collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &book in &scope {
        if let Some(subjects) = catalog.subjects_of(book) {
            for s in subjects {
                *counts.entry(s.as_str()).or_insert(0) += 1;
            }
        }
    }
    let mut pruned = SubjectCatalog::new();
    for &book in &scope {
        pruned.touch(book);
        if let Some(subjects) = catalog.subjects_of(book) {
            for s in subjects {
                if counts[s.as_str()] >= min_count {
                    pruned
                        .insert(book, s)
                        .expect("subjects of a valid catalog stay valid");
                }
            }
        }
    }
    pruned
}

/// Per-community subject prevalence.
///
/// `entry(s, c)` = (books in `c` carrying `s`) / (books in `c` with at
/// least one subject). Subjects are ordered lexicographically, communities
/// by id. A community whose books carry no subjects at all produces a zero
/// column and a warning.
pub fn community_subject_matrix(
    catalog: &SubjectCatalog,
    sg: &SimilarityGraph,
    p: &Partition,
) -> Result<CommunitySubjectMatrix> {
    if p.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if p.len() != sg.node_count() {
        return Err(Error::Mismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            sg.node_count()
        )));
    }
    let k = p.num_communities() as usize;
    let subjects: Vec<String> = {
        let mut set: BTreeMap<&str, ()> = BTreeMap::new();
        for (node, name) in sg.books().iter() {
            let _ = node;
            if let Some(subs) = catalog.subjects_of(name) {
                for s in subs {
                    set.insert(s, ());
                }
            }
        }
        set.into_keys().map(str::to_string).collect()
    };
    let index_of: BTreeMap<&str, usize> = subjects
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();

    let mut counts = vec![0u32; subjects.len() * k];
    let mut totals = vec![0u32; k];
    for (node, name) in sg.books().iter() {
        let community = p.community_of(node as usize) as usize;
        let Some(subs) = catalog.subjects_of(name) else {
            continue;
        };
        if subs.is_empty() {
            continue;
        }
        totals[community] += 1;
        for s in subs {
            counts[index_of[s.as_str()] * k + community] += 1;
        }
    }

    let mut prevalence = DMatrix::zeros(subjects.len(), k);
    for c in 0..k {
        if totals[c] == 0 {
            log::warn!("community {c} has no subject-bearing books; zero column emitted");
            continue;
        }
        for s in 0..subjects.len() {
            prevalence[(s, c)] = counts[s * k + c] as f64 / totals[c] as f64;
        }
    }
    Ok(CommunitySubjectMatrix::new(
        subjects,
        (0..k as u32).collect(),
        prevalence,
        counts,
        totals,
    ))
}

/// Network-wide subject counts over subject-bearing books.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSubjectCounts {
    counts: BTreeMap<String, u32>,
    total_books: u32,
}

impl GlobalSubjectCounts {
    /// Count over every book of `catalog` that carries at least one subject.
    pub fn from_catalog(catalog: &SubjectCatalog) -> Self {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        let mut total_books = 0u32;
        for (_, subjects) in catalog.iter() {
            if subjects.is_empty() {
                continue;
            }
            total_books += 1;
            for s in subjects {
                *counts.entry(s.clone()).or_insert(0) += 1;
            }
        }
        Self {
            counts,
            total_books,
        }
    }

    pub fn count(&self, subject: &str) -> u32 {
        self.counts.get(subject).copied().unwrap_or(0)
    }

    pub fn total_books(&self) -> u32 {
        self.total_books
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }
}

/// One `(subject, community)` enrichment record.
#[derive(Debug, Clone)]
pub struct EnrichmentRow {
    pub subject: String,
    pub community: u32,
    pub in_community_proportion: f64,
    pub global_proportion: f64,
    /// Smoothed prevalence ratio vs the whole network.
    pub lift: f64,
    /// Log-likelihood-ratio statistic of the 2x2 (in/out community ×
    /// has/lacks subject) table.
    pub g_statistic: f64,
}

/// Enrichment of every subject in every community, sorted by community then
/// descending lift.
#[derive(Debug, Clone)]
pub struct EnrichmentReport {
    rows: Vec<EnrichmentRow>,
    community_totals: Vec<u32>,
}

impl EnrichmentReport {
    pub fn rows(&self) -> &[EnrichmentRow] {
        &self.rows
    }

    /// Subject-bearing book count per community id.
    pub fn community_totals(&self) -> &[u32] {
        &self.community_totals
    }

    /// Rows of one community, descending by lift.
    pub fn for_community(&self, community: u32) -> impl Iterator<Item = &EnrichmentRow> {
        self.rows.iter().filter(move |r| r.community == community)
    }
}

fn g_statistic(in_with: u32, in_total: u32, all_with: u32, all_total: u32) -> f64 {
    // 2x2 observed table over subject-bearing books.
    let a = in_with as f64; // in community, has subject
    let b = (in_total - in_with) as f64; // in community, lacks subject
    let c = (all_with - in_with) as f64; // outside, has subject
    let d = (all_total - in_total - (all_with - in_with)) as f64; // outside, lacks
    let n = all_total as f64;
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let col2 = b + d;
    let mut g = 0.0;
    for (observed, expected) in [
        (a, row1 * col1 / n),
        (b, row1 * col2 / n),
        (c, row2 * col1 / n),
        (d, row2 * col2 / n),
    ] {
        if observed > 0.0 {
            g += observed * (observed / expected).ln();
        }
    }
    (2.0 * g).max(0.0)
}

/// Quantify how each community's subject distribution deviates from the
/// network-wide distribution.
///
/// `lift(s, c) = (prevalence(s, c) + α) / (global_proportion(s) + α)` with
/// Laplace `α = 1 / total subject-bearing books`; the G statistic comes from
/// the 2x2 contingency table per `(s, c)`.
pub fn enrichment(
    matrix: &CommunitySubjectMatrix,
    global: &GlobalSubjectCounts,
) -> Result<EnrichmentReport> {
    let matrix_subjects: Vec<&str> = matrix.subjects().iter().map(String::as_str).collect();
    let global_subjects: Vec<&str> = global.subjects().collect();
    if matrix_subjects != global_subjects {
        return Err(Error::Mismatch(
            "matrix and global counts cover different subject universes".into(),
        ));
    }
    let total = global.total_books();
    if total == 0 {
        return Err(Error::Degenerate("no subject-bearing books".into()));
    }
    let alpha = 1.0 / total as f64;

    let mut rows = Vec::with_capacity(matrix.subjects().len() * matrix.communities().len());
    for (ci, &community) in matrix.communities().iter().enumerate() {
        let in_total = matrix.community_total(ci);
        for (si, subject) in matrix.subjects().iter().enumerate() {
            let in_prop = matrix.entry(si, ci);
            let all_with = global.count(subject);
            let global_prop = all_with as f64 / total as f64;
            rows.push(EnrichmentRow {
                subject: subject.clone(),
                community,
                in_community_proportion: in_prop,
                global_proportion: global_prop,
                lift: (in_prop + alpha) / (global_prop + alpha),
                g_statistic: g_statistic(matrix.count(si, ci), in_total, all_with, total),
            });
        }
    }
    rows.sort_by(|x, y| {
        x.community
            .cmp(&y.community)
            .then_with(|| y.lift.total_cmp(&x.lift))
            .then_with(|| x.subject.cmp(&y.subject))
    });
    let community_totals = (0..matrix.communities().len())
        .map(|c| matrix.community_total(c))
        .collect();
    Ok(EnrichmentReport {
        rows,
        community_totals,
    })
}
