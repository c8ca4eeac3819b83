//! C ABI for the genregraph pipeline.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `gg_*` constructor and released by the matching `gg_*_free`. Functions
//! return [`GgStatus`]; on any non-`Ok` status the thread-local error
//! message is available via [`gg_last_error_message`] (free it with
//! [`gg_string_free`]). The C header is generated into
//! `include/genregraph.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use genregraph::community::{self, LouvainConfig};
use genregraph::ingest;
use genregraph::model::{DuplicatePolicy, Partition, RatingGraph, SimilarityGraph};
use genregraph::pipeline::{run_pipeline, PipelineConfig};
use genregraph::project::{build_network_with_threads, NetworkMode, ProjectionConfig};
use genregraph::Error;

/// Status codes returned by every fallible `gg_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input data failed to parse (bad line, bad rating, missing file).
    ParseError = 3,
    /// Filtering left nothing to analyze.
    EmptyNetwork = 4,
    /// Iterative computation failed to converge.
    NonConvergence = 5,
    IoError = 6,
    /// Invalid configuration or argument value.
    InvalidArgument = 7,
    /// A named entity (book, community) does not exist.
    NotFound = 8,
    InternalError = 9,
}

/// Which similarity network to build.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GgMode {
    Reader = 0,
    Enjoyment = 1,
}

/// Opaque bipartite rating graph.
pub struct GgRatingGraph(RatingGraph);
/// Opaque weighted book-book similarity network.
pub struct GgSimilarityGraph(SimilarityGraph);
/// Opaque community assignment over a similarity network's nodes.
pub struct GgPartition(Partition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn set_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> GgStatus {
    match err {
        Error::Parse { .. } | Error::InputFile { .. } => GgStatus::ParseError,
        Error::EmptyNetwork(_) => GgStatus::EmptyNetwork,
        Error::NonConvergence { .. } => GgStatus::NonConvergence,
        Error::Io(_) | Error::Csv(_) => GgStatus::IoError,
        Error::UnknownBook(_) | Error::UnknownCommunity(_) => GgStatus::NotFound,
        Error::Config(_) | Error::Mismatch(_) | Error::Degenerate(_) | Error::EmptyGraph => {
            GgStatus::InvalidArgument
        }
    }
}

fn fail(err: &Error) -> GgStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, GgStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(GgStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        GgStatus::InvalidUtf8
    })
}

unsafe fn deref<'a, T>(ptr: *const T) -> Result<&'a T, GgStatus> {
    ptr.as_ref().ok_or_else(|| {
        set_error("null handle argument");
        GgStatus::NullArgument
    })
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn gg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the most recent error on this thread, or null. The caller
/// owns the returned string and must release it with `gg_string_free`.
#[no_mangle]
pub extern "C" fn gg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned by a `gg_*` function
/// that documents this deallocator, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a ratings TSV file (`user<TAB>book<TAB>rating`) into a graph
/// handle. With `keep_max_duplicates` repeated (user, book) pairs keep
/// their maximum rating instead of failing.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On `Ok` the caller owns `*out` and must free it with
/// `gg_rating_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn gg_ratings_parse_file(
    path: *const c_char,
    keep_max_duplicates: bool,
    out: *mut *mut GgRatingGraph,
) -> GgStatus {
    clear_error();
    if out.is_null() {
        set_error("null output argument");
        return GgStatus::NullArgument;
    }
    let path = match utf8_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let policy = if keep_max_duplicates {
        DuplicatePolicy::KeepMax
    } else {
        DuplicatePolicy::Error
    };
    match ingest::parse_ratings_path(&PathBuf::from(path), policy) {
        Ok(graph) => {
            *out = Box::into_raw(Box::new(GgRatingGraph(graph)));
            GgStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// # Safety
/// `graph` must be null or an owned handle from `gg_ratings_parse_file`.
#[no_mangle]
pub unsafe extern "C" fn gg_rating_graph_free(graph: *mut GgRatingGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_rating_graph_user_count(graph: *const GgRatingGraph) -> usize {
    deref(graph).map_or(0, |g| g.0.user_count())
}

/// # Safety
/// `graph` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_rating_graph_book_count(graph: *const GgRatingGraph) -> usize {
    deref(graph).map_or(0, |g| g.0.book_count())
}

/// # Safety
/// `graph` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_rating_graph_edge_count(graph: *const GgRatingGraph) -> usize {
    deref(graph).map_or(0, |g| g.0.edge_count())
}

/// Filter the rating graph and project it into a similarity network.
/// `rating_threshold` only applies in enjoyment mode; `threads` caps the
/// projection workers (results are identical for any value).
///
/// # Safety
/// `graph` must be a valid handle and `out` a valid pointer. On `Ok` the
/// caller owns `*out` and must free it with `gg_similarity_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn gg_build_network(
    graph: *const GgRatingGraph,
    mode: GgMode,
    rating_threshold: u8,
    min_books_per_user: usize,
    min_readers_per_book: usize,
    threads: usize,
    out: *mut *mut GgSimilarityGraph,
) -> GgStatus {
    clear_error();
    if out.is_null() {
        set_error("null output argument");
        return GgStatus::NullArgument;
    }
    let graph = match deref(graph) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let cfg = ProjectionConfig {
        mode: match mode {
            GgMode::Reader => NetworkMode::Reader,
            GgMode::Enjoyment => NetworkMode::Enjoyment,
        },
        rating_threshold,
        min_books_per_user,
        min_readers_per_book,
    };
    match build_network_with_threads(&graph.0, &cfg, threads.max(1)) {
        Ok(sg) => {
            *out = Box::into_raw(Box::new(GgSimilarityGraph(sg)));
            GgStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// # Safety
/// `sg` must be null or an owned handle from `gg_build_network`.
#[no_mangle]
pub unsafe extern "C" fn gg_similarity_graph_free(sg: *mut GgSimilarityGraph) {
    if !sg.is_null() {
        drop(Box::from_raw(sg));
    }
}

/// # Safety
/// `sg` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_similarity_graph_node_count(sg: *const GgSimilarityGraph) -> usize {
    deref(sg).map_or(0, |g| g.0.node_count())
}

/// # Safety
/// `sg` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_similarity_graph_edge_count(sg: *const GgSimilarityGraph) -> usize {
    deref(sg).map_or(0, |g| g.0.edge_count())
}

/// Jaccard weight between two books by id; 0 when no edge exists or an id
/// is unknown.
///
/// # Safety
/// `sg` must be a valid handle; `book_a`/`book_b` valid NUL-terminated
/// strings.
#[no_mangle]
pub unsafe extern "C" fn gg_similarity_graph_weight(
    sg: *const GgSimilarityGraph,
    book_a: *const c_char,
    book_b: *const c_char,
) -> f64 {
    let Ok(sg) = deref(sg) else { return 0.0 };
    let (Ok(a), Ok(b)) = (utf8_arg(book_a), utf8_arg(book_b)) else {
        return 0.0;
    };
    sg.0.weight(a, b).unwrap_or(0.0)
}

/// Louvain community detection at the given resolution, deterministic for
/// a fixed seed.
///
/// # Safety
/// `sg` must be a valid handle and `out` a valid pointer. On `Ok` the
/// caller owns `*out` and must free it with `gg_partition_free`.
#[no_mangle]
pub unsafe extern "C" fn gg_louvain(
    sg: *const GgSimilarityGraph,
    resolution: f64,
    seed: u64,
    out: *mut *mut GgPartition,
) -> GgStatus {
    clear_error();
    if out.is_null() {
        set_error("null output argument");
        return GgStatus::NullArgument;
    }
    let sg = match deref(sg) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let cfg = LouvainConfig {
        resolution,
        seed,
        ..LouvainConfig::default()
    };
    match community::louvain(&sg.0, &cfg) {
        Ok(partition) => {
            *out = Box::into_raw(Box::new(GgPartition(partition)));
            GgStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// # Safety
/// `p` must be null or an owned handle from `gg_louvain`.
#[no_mangle]
pub unsafe extern "C" fn gg_partition_free(p: *mut GgPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a valid handle. Returns 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn gg_partition_num_communities(p: *const GgPartition) -> u32 {
    deref(p).map_or(0, |p| p.0.num_communities())
}

/// Community id of a book, or -1 when the book is not in the network.
///
/// # Safety
/// `p` and `sg` must be valid handles over the same network; `book` a
/// valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gg_partition_community_of(
    p: *const GgPartition,
    sg: *const GgSimilarityGraph,
    book: *const c_char,
) -> i64 {
    let (Ok(p), Ok(sg)) = (deref(p), deref(sg)) else {
        return -1;
    };
    let Ok(book) = utf8_arg(book) else { return -1 };
    match sg.0.books().get(book) {
        Some(idx) if (idx as usize) < p.0.len() => i64::from(p.0.community_of(idx as usize)),
        _ => -1,
    }
}

/// Weighted modularity of a partition at resolution `gamma`.
///
/// # Safety
/// `sg` and `p` must be valid handles over the same network; `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_modularity(
    sg: *const GgSimilarityGraph,
    p: *const GgPartition,
    gamma: f64,
    out: *mut f64,
) -> GgStatus {
    clear_error();
    if out.is_null() {
        set_error("null output argument");
        return GgStatus::NullArgument;
    }
    let (sg, p) = match (deref(sg), deref(p)) {
        (Ok(sg), Ok(p)) => (sg, p),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    match community::modularity(&sg.0, &p.0, gamma) {
        Ok(q) => {
            *out = q;
            GgStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Normalized mutual information between two partitions of the same node
/// set, in [0, 1].
///
/// # Safety
/// `a` and `b` must be valid handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_nmi(
    a: *const GgPartition,
    b: *const GgPartition,
    out: *mut f64,
) -> GgStatus {
    clear_error();
    if out.is_null() {
        set_error("null output argument");
        return GgStatus::NullArgument;
    }
    let (a, b) = match (deref(a), deref(b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    match community::nmi(&a.0, &b.0) {
        Ok(v) => {
            *out = v;
            GgStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Run the full pipeline from a JSON configuration (the manifest schema:
/// `ratings`, `subjects`, `mode`, thresholds, `resolution`, `seed`,
/// `sub_communities`, `dedupe`), writing report bundles under `out_dir`.
///
/// # Safety
/// `config_json` and `out_dir` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gg_run_pipeline_json(
    config_json: *const c_char,
    out_dir: *const c_char,
) -> GgStatus {
    clear_error();
    let config_json = match utf8_arg(config_json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let out_dir = match utf8_arg(out_dir) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let mut cfg: PipelineConfig = match serde_json::from_str(config_json) {
        Ok(cfg) => cfg,
        Err(err) => {
            set_error(&format!("invalid pipeline config: {err}"));
            return GgStatus::InvalidArgument;
        }
    };
    cfg.out_dir = PathBuf::from(out_dir);
    match run_pipeline(&cfg) {
        Ok(_) => GgStatus::Ok,
        Err(err) => fail(&err),
    }
}
