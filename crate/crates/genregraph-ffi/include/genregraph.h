/* C interface for the genregraph book-network pipeline. */

#ifndef GENREGRAPH_H
#define GENREGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible `gg_*` call.
 */
typedef enum GgStatus {
  GgStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  GgStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GgStatus_InvalidUtf8 = 2,
  /**
   * Input data failed to parse (bad line, bad rating, missing file).
   */
  GgStatus_ParseError = 3,
  /**
   * Filtering left nothing to analyze.
   */
  GgStatus_EmptyNetwork = 4,
  /**
   * Iterative computation failed to converge.
   */
  GgStatus_NonConvergence = 5,
  GgStatus_IoError = 6,
  /**
   * Invalid configuration or argument value.
   */
  GgStatus_InvalidArgument = 7,
  /**
   * A named entity (book, community) does not exist.
   */
  GgStatus_NotFound = 8,
  GgStatus_InternalError = 9,
} GgStatus;

/**
 * Which similarity network to build.
 */
typedef enum GgMode {
  GgMode_Reader = 0,
  GgMode_Enjoyment = 1,
} GgMode;

/**
 * Opaque community assignment over a similarity network's nodes.
 */
typedef struct GgPartition GgPartition;

/**
 * Opaque bipartite rating graph.
 */
typedef struct GgRatingGraph GgRatingGraph;

/**
 * Opaque weighted book-book similarity network.
 */
typedef struct GgSimilarityGraph GgSimilarityGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *gg_version(void);

/**
 * Message of the most recent error on this thread, or null. The caller
 * owns the returned string and must release it with `gg_string_free`.
 */
char *gg_last_error_message(void);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by a `gg_*` function
 * that documents this deallocator, and must not be used afterwards.
 */
void gg_string_free(char *s);

/**
 * Parse a ratings TSV file (`user<TAB>book<TAB>rating`) into a graph
 * handle. With `keep_max_duplicates` repeated (user, book) pairs keep
 * their maximum rating instead of failing.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On `Ok` the caller owns `*out` and must free it with
 * `gg_rating_graph_free`.
 */
enum GgStatus gg_ratings_parse_file(const char *path,
                                    bool keep_max_duplicates,
                                    struct GgRatingGraph **out);

/**
 * # Safety
 * `graph` must be null or an owned handle from `gg_ratings_parse_file`.
 */
void gg_rating_graph_free(struct GgRatingGraph *graph);

/**
 * # Safety
 * `graph` must be a valid handle. Returns 0 on a null handle.
 */
size_t gg_rating_graph_user_count(const struct GgRatingGraph *graph);

/**
 * # Safety
 * `graph` must be a valid handle. Returns 0 on a null handle.
 */
size_t gg_rating_graph_book_count(const struct GgRatingGraph *graph);

/**
 * # Safety
 * `graph` must be a valid handle. Returns 0 on a null handle.
 */
size_t gg_rating_graph_edge_count(const struct GgRatingGraph *graph);

/**
 * Filter the rating graph and project it into a similarity network.
 * `rating_threshold` only applies in enjoyment mode; `threads` caps the
 * projection workers (results are identical for any value).
 *
 * # Safety
 * `graph` must be a valid handle and `out` a valid pointer. On `Ok` the
 * caller owns `*out` and must free it with `gg_similarity_graph_free`.
 */
enum GgStatus gg_build_network(const struct GgRatingGraph *graph,
                               enum GgMode mode,
                               uint8_t rating_threshold,
                               size_t min_books_per_user,
                               size_t min_readers_per_book,
                               size_t threads,
                               struct GgSimilarityGraph **out);

/**
 * # Safety
 * `sg` must be null or an owned handle from `gg_build_network`.
 */
void gg_similarity_graph_free(struct GgSimilarityGraph *sg);

/**
 * # Safety
 * `sg` must be a valid handle. Returns 0 on a null handle.
 */
size_t gg_similarity_graph_node_count(const struct GgSimilarityGraph *sg);

/**
 * # Safety
 * `sg` must be a valid handle. Returns 0 on a null handle.
 */
size_t gg_similarity_graph_edge_count(const struct GgSimilarityGraph *sg);

/**
 * Jaccard weight between two books by id; 0 when no edge exists or an id
 * is unknown.
 *
 * # Safety
 * `sg` must be a valid handle; `book_a`/`book_b` valid NUL-terminated
 * strings.
 */
double gg_similarity_graph_weight(const struct GgSimilarityGraph *sg,
                                  const char *book_a,
                                  const char *book_b);

/**
 * Louvain community detection at the given resolution, deterministic for
 * a fixed seed.
 *
 * # Safety
 * `sg` must be a valid handle and `out` a valid pointer. On `Ok` the
 * caller owns `*out` and must free it with `gg_partition_free`.
 */
enum GgStatus gg_louvain(const struct GgSimilarityGraph *sg,
                         double resolution,
                         uint64_t seed,
                         struct GgPartition **out);

/**
 * # Safety
 * `p` must be null or an owned handle from `gg_louvain`.
 */
void gg_partition_free(struct GgPartition *p);

/**
 * # Safety
 * `p` must be a valid handle. Returns 0 on a null handle.
 */
uint32_t gg_partition_num_communities(const struct GgPartition *p);

/**
 * Community id of a book, or -1 when the book is not in the network.
 *
 * # Safety
 * `p` and `sg` must be valid handles over the same network; `book` a
 * valid NUL-terminated string.
 */
int64_t gg_partition_community_of(const struct GgPartition *p,
                                  const struct GgSimilarityGraph *sg,
                                  const char *book);

/**
 * Weighted modularity of a partition at resolution `gamma`.
 *
 * # Safety
 * `sg` and `p` must be valid handles over the same network; `out` a valid
 * pointer.
 */
enum GgStatus gg_modularity(const struct GgSimilarityGraph *sg,
                            const struct GgPartition *p,
                            double gamma,
                            double *out);

/**
 * Normalized mutual information between two partitions of the same node
 * set, in [0, 1].
 *
 * # Safety
 * `a` and `b` must be valid handles; `out` a valid pointer.
 */
enum GgStatus gg_nmi(const struct GgPartition *a, const struct GgPartition *b, double *out);

/**
 * Run the full pipeline from a JSON configuration (the manifest schema:
 * `ratings`, `subjects`, `mode`, thresholds, `resolution`, `seed`,
 * `sub_communities`, `dedupe`), writing report bundles under `out_dir`.
 *
 * # Safety
 * `config_json` and `out_dir` must be valid NUL-terminated strings.
 */
enum GgStatus gg_run_pipeline_json(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENREGRAPH_H */
