#ifndef MORALNET_H
#define MORALNET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum MnStatus {
  MN_STATUS_OK = 0,
  MN_STATUS_NULL_POINTER = 1,
  MN_STATUS_INVALID_UTF8 = 2,
  MN_STATUS_PARSE = 3,
  MN_STATUS_INVALID_ARGUMENT = 4,
  MN_STATUS_STATS = 5,
  MN_STATUS_PANIC = 6,
} MnStatus;

typedef enum MnDictFormat {
  MN_DICT_FORMAT_LIWC = 0,
  MN_DICT_FORMAT_TSV = 1,
} MnDictFormat;

typedef enum MnLanguage {
  MN_LANGUAGE_EN = 0,
  MN_LANGUAGE_JA = 1,
} MnLanguage;

typedef enum MnCountMode {
  MN_COUNT_MODE_MULTISET = 0,
  MN_COUNT_MODE_SET = 1,
} MnCountMode;

typedef enum MnPcaMode {
  MN_PCA_MODE_COVARIANCE = 0,
  MN_PCA_MODE_CORRELATION = 1,
} MnPcaMode;

/**
 * Compiled moral dictionary.
 */
typedef struct MnLexicon MnLexicon;

/**
 * Mutable weighted retweet network.
 */
typedef struct MnNetwork MnNetwork;

/**
 * Valence lexicon for one language.
 */
typedef struct MnValenceLexicon MnValenceLexicon;

/**
 * Loading counts of one text. `labels` has bit j set for every basic
 * foundation j (Care = 0 .. Purity = 4) attaining the maximum count.
 */
typedef struct MnLoading {
  uint32_t counts[5];
  uint32_t matched;
  uint8_t labels;
} MnLoading;

/**
 * Per-foundation homophily; `scores[j]` is NaN when no node of label j
 * has an edge.
 */
typedef struct MnHomophily {
  double scores[5];
  size_t nodes[5];
} MnHomophily;

typedef struct MnKruskalResult {
  double statistic;
  size_t degrees_of_freedom;
  double p_value;
} MnKruskalResult;

typedef struct MnPcaResult {
  double eigenvalues[5];
  double explained_variance_ratios[5];
  /**
   * Row k is the unit loading vector of component k+1.
   */
  double components[5][5];
} MnPcaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The string
 * is owned by the caller and must be released with [`mn_string_free`].
 */
char *mn_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed.
 */
void mn_string_free(char *s);

/**
 * Parses a dictionary. English dictionaries match whole tokens with `*`
 * stems; Japanese ones match substrings, longest first.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes; `out` must be writable.
 */
enum MnStatus mn_lexicon_parse(const uint8_t *bytes,
                               size_t len,
                               enum MnDictFormat format,
                               enum MnLanguage lang,
                               struct MnLexicon **out);

/**
 * # Safety
 * `lex` must be null or a handle from [`mn_lexicon_parse`] not yet freed.
 */
void mn_lexicon_free(struct MnLexicon *lex);

/**
 * Number of distinct dictionary entries, or 0 for a null handle.
 *
 * # Safety
 * `lex` must be null or a live handle.
 */
size_t mn_lexicon_len(const struct MnLexicon *lex);

/**
 * Scores one text against a dictionary.
 *
 * # Safety
 * `lex` must be a live handle, `text` a NUL-terminated string and `out`
 * writable.
 */
enum MnStatus mn_score_text(const struct MnLexicon *lex,
                            const char *text,
                            enum MnCountMode mode,
                            struct MnLoading *out);

/**
 * The bundled valence lexicon for a language.
 *
 * # Safety
 * `out` must be writable.
 */
enum MnStatus mn_valence_lexicon_default(enum MnLanguage lang, struct MnValenceLexicon **out);

/**
 * Parses a `surface<TAB>polarity` (or `surface<TAB>BOOST<TAB>delta`)
 * valence lexicon.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum MnStatus mn_valence_lexicon_parse(const char *text,
                                       enum MnLanguage lang,
                                       struct MnValenceLexicon **out);

/**
 * # Safety
 * `lex` must be null or a live handle.
 */
void mn_valence_lexicon_free(struct MnValenceLexicon *lex);

/**
 * Valence of a text in [-1, 1].
 *
 * # Safety
 * `lex` must be a live handle, `text` a NUL-terminated string and
 * `score` writable.
 */
enum MnStatus mn_valence(const struct MnValenceLexicon *lex, const char *text, double *score);

struct MnNetwork *mn_network_new(void);

/**
 * # Safety
 * `net` must be null or a live handle.
 */
void mn_network_free(struct MnNetwork *net);

/**
 * Sets a user's label: a foundation index 0..=4, or -1 for unlabelled.
 *
 * # Safety
 * `net` must be a live handle and `user` a NUL-terminated string.
 */
enum MnStatus mn_network_set_label(struct MnNetwork *net, const char *user, int32_t label);

/**
 * Adds `weight` to the undirected edge between two distinct users.
 *
 * # Safety
 * `net` must be a live handle; `a` and `b` NUL-terminated strings.
 */
enum MnStatus mn_network_add_edge(struct MnNetwork *net,
                                  const char *a,
                                  const char *b,
                                  uint64_t weight);

/**
 * # Safety
 * `net` must be null or a live handle.
 */
size_t mn_network_node_count(const struct MnNetwork *net);

/**
 * # Safety
 * `net` must be null or a live handle.
 */
size_t mn_network_edge_count(const struct MnNetwork *net);

/**
 * Homophily of one node. Fails if the user is absent or unlabelled.
 *
 * # Safety
 * `net` must be a live handle, `user` a NUL-terminated string and `out`
 * writable.
 */
enum MnStatus mn_network_node_homophily(const struct MnNetwork *net, const char *user, double *out);

/**
 * Homophily per basic foundation.
 *
 * # Safety
 * `net` must be a live handle and `out` writable.
 */
enum MnStatus mn_network_homophily(const struct MnNetwork *net, struct MnHomophily *out);

/**
 * The k-core of a network as a new handle.
 *
 * # Safety
 * `net` must be a live handle and `out` writable.
 */
enum MnStatus mn_network_kcore(const struct MnNetwork *net, size_t k, struct MnNetwork **out);

/**
 * Kruskal-Wallis H test. `values` holds the groups back to back;
 * `group_sizes[g]` is the length of group g.
 *
 * # Safety
 * `group_sizes` must hold `n_groups` entries and `values` their sum;
 * `out` must be writable.
 */
enum MnStatus mn_kruskal_wallis(const double *values,
                                const size_t *group_sizes,
                                size_t n_groups,
                                struct MnKruskalResult *out);

/**
 * PCA of `n` five-dimensional samples stored row by row.
 *
 * # Safety
 * `samples` must hold `5 * n` values and `out` must be writable.
 */
enum MnStatus mn_pca(const double *samples, size_t n, enum MnPcaMode mode, struct MnPcaResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORALNET_H */
