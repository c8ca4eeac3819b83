//! Parse rating and subject files into model types, and generate seeded
//! synthetic corpora with planted community structure.
//!
//! File formats are line-oriented UTF-8 with tab-separated fields (book ids
//! may contain commas, so CSV quoting is avoided on the input side):
//!
//! - ratings:  `user_id<TAB>book_id<TAB>rating`, `#` comment lines, LF or CRLF
//! - subjects: `book_id<TAB>subject`

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DuplicatePolicy, Partition, RatingGraph, SubjectCatalog};

/// Parameters of the planted-community synthetic corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of planted communities.
    pub communities: usize,
    pub books_per_community: usize,
    pub users_per_community: usize,
    pub reads_per_user: usize,
    /// Probability a read falls in the user's home community.
    pub p_in: f64,
    /// Probability an in-community read is rated >= 4.
    pub p_enjoy_in: f64,
    /// Probability an out-of-community read is rated >= 4.
    pub p_enjoy_out: f64,
    pub subjects_per_community: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            communities: 4,
            books_per_community: 50,
            users_per_community: 500,
            reads_per_user: 15,
            p_in: 0.9,
            p_enjoy_in: 0.8,
            p_enjoy_out: 0.3,
            subjects_per_community: 3,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("communities", self.communities),
            ("books_per_community", self.books_per_community),
            ("users_per_community", self.users_per_community),
            ("reads_per_user", self.reads_per_user),
            ("subjects_per_community", self.subjects_per_community),
        ] {
            if value < 1 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        for (name, p) in [
            ("p_in", self.p_in),
            ("p_enjoy_in", self.p_enjoy_in),
            ("p_enjoy_out", self.p_enjoy_out),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        let total_books = self.communities * self.books_per_community;
        if self.reads_per_user > total_books {
            return Err(Error::Config(format!(
                "reads_per_user ({}) exceeds total books ({total_books})",
                self.reads_per_user
            )));
        }
        Ok(())
    }

    pub fn total_books(&self) -> usize {
        self.communities * self.books_per_community
    }
}

/// Strip one trailing `\r` so CRLF input parses like LF.
fn strip_cr(line: &str) -> &str {
    line.strip_suffix('\r').unwrap_or(line)
}

/// Parse a ratings stream into a [`RatingGraph`].
///
/// One edge per retained line; `#` lines and blank lines are skipped.
/// Malformed lines, out-of-range or non-integer ratings, and (under
/// [`DuplicatePolicy::Error`]) repeated `(user, book)` pairs fail with the
/// offending line number.
pub fn parse_ratings<R: BufRead>(reader: R, policy: DuplicatePolicy) -> Result<RatingGraph> {
    let mut builder = RatingGraph::builder_with_policy(policy);
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = strip_cr(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let (user, book, rating_str) = (fields[0], fields[1], fields[2]);
        if user.is_empty() {
            return Err(Error::parse(lineno, "empty user id"));
        }
        if book.is_empty() {
            return Err(Error::parse(lineno, "empty book id"));
        }
        let rating: i64 = rating_str
            .parse()
            .map_err(|_| Error::parse(lineno, format!("rating `{rating_str}` is not an integer")))?;
        if !(1..=5).contains(&rating) {
            return Err(Error::parse(
                lineno,
                format!("rating {rating} outside [1,5]"),
            ));
        }
        builder
            .add_edge(user, book, rating as u8)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(builder.build())
}

pub fn parse_ratings_path(path: &Path, policy: DuplicatePolicy) -> Result<RatingGraph> {
    let file = File::open(path).map_err(|source| Error::InputFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ratings(BufReader::new(file), policy)
}

/// Parse a subjects stream into a [`SubjectCatalog`].
///
/// Repeated `(book, subject)` lines collapse to one membership.
pub fn parse_subjects<R: BufRead>(reader: R) -> Result<SubjectCatalog> {
    let mut catalog = SubjectCatalog::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = strip_cr(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                lineno,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(Error::parse(lineno, "empty book id"));
        }
        catalog
            .insert(fields[0], fields[1])
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(catalog)
}

pub fn parse_subjects_path(path: &Path) -> Result<SubjectCatalog> {
    let file = File::open(path).map_err(|source| Error::InputFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_subjects(BufReader::new(file))
}

/// Write a ratings file that `parse_ratings` reads back into the same graph.
/// Rows are sorted by user then book name for stable output.
pub fn serialize_ratings<W: Write>(graph: &RatingGraph, mut out: W) -> io::Result<()> {
    let mut rows: Vec<(&str, &str, u8)> = graph
        .edges()
        .map(|(u, b, r)| (graph.users().name(u), graph.books().name(b), r))
        .collect();
    rows.sort_unstable();
    for (user, book, rating) in rows {
        writeln!(out, "{user}\t{book}\t{rating}")?;
    }
    Ok(())
}

/// Write a subjects file that `parse_subjects` reads back into the same
/// catalog (books with zero subjects have no rows and are dropped).
pub fn serialize_subjects<W: Write>(catalog: &SubjectCatalog, mut out: W) -> io::Result<()> {
    for (book, subjects) in catalog.iter() {
        for subject in subjects {
            writeln!(out, "{book}\t{subject}")?;
        }
    }
    Ok(())
}

fn book_name(idx: usize) -> String {
    format!("b{idx:05}")
}

fn user_name(idx: usize) -> String {
    format!("u{idx:05}")
}

fn subject_name(community: usize, topic: usize) -> String {
    format!("subject_{community:02}_{topic:02}")
}

/// Generate a seeded synthetic corpus with planted community structure.
///
/// Each user draws `reads_per_user` distinct books: with probability `p_in`
/// from the home community, otherwise uniformly from the other communities
/// (falling back to whichever pool still has unread books). Reads are rated
/// 5 with probability `p_enjoy_in`/`p_enjoy_out` and 2 otherwise, which
/// separates reader from enjoyment semantics at the rating-4 threshold.
/// Every book carries its community's subject labels. Deterministic for a
/// fixed seed.
pub fn generate_synthetic(
    cfg: &SynthConfig,
) -> Result<(RatingGraph, SubjectCatalog, Partition)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total_books = cfg.total_books();

    let mut builder = RatingGraph::builder();
    let mut catalog = SubjectCatalog::new();
    let mut planted = Vec::with_capacity(total_books);
    for book in 0..total_books {
        let community = book / cfg.books_per_community;
        builder.add_book(&book_name(book));
        planted.push(community as u32);
        for topic in 0..cfg.subjects_per_community {
            catalog.insert(&book_name(book), &subject_name(community, topic))?;
        }
    }

    for user in 0..cfg.communities * cfg.users_per_community {
        let home = user / cfg.users_per_community;
        builder.add_user(&user_name(user));
        let mut home_pool: Vec<usize> = (home * cfg.books_per_community
            ..(home + 1) * cfg.books_per_community)
            .collect();
        let mut out_pool: Vec<usize> = (0..total_books)
            .filter(|b| b / cfg.books_per_community != home)
            .collect();
        for _ in 0..cfg.reads_per_user {
            let want_home = rng.random_bool(cfg.p_in);
            let pool = if want_home {
                if home_pool.is_empty() {
                    &mut out_pool
                } else {
                    &mut home_pool
                }
            } else if out_pool.is_empty() {
                &mut home_pool
            } else {
                &mut out_pool
            };
            let book = pool.swap_remove(rng.random_range(0..pool.len()));
            let in_home = book / cfg.books_per_community == home;
            let p_enjoy = if in_home {
                cfg.p_enjoy_in
            } else {
                cfg.p_enjoy_out
            };
            let rating = if rng.random_bool(p_enjoy) { 5 } else { 2 };
            builder.add_edge(&user_name(user), &book_name(book), rating)?;
        }
    }

    Ok((
        builder.build(),
        catalog,
        Partition::from_assignment(&planted),
    ))
}
