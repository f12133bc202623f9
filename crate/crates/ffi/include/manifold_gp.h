#ifndef MANIFOLD_GP_H
#define MANIFOLD_GP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MgpStatus {
  MGP_STATUS_OK = 0,
  MGP_STATUS_NULL_POINTER = 1,
  MGP_STATUS_INVALID_UTF8 = 2,
  MGP_STATUS_IO = 3,
  MGP_STATUS_PARSE = 4,
  MGP_STATUS_INVALID_DATA = 5,
  MGP_STATUS_CONFIG = 6,
  MGP_STATUS_OUT_OF_RANGE = 7,
  MGP_STATUS_BUFFER_TOO_SMALL = 8,
  MGP_STATUS_RUNTIME = 9,
  MGP_STATUS_PANIC = 10,
} MgpStatus;

// A normalised dataset with its neighbour ordering.
typedef struct MgpDataset MgpDataset;

// A multi-tree individual.
typedef struct MgpIndividual MgpIndividual;

// The outcome of an evolutionary run: the archive, ascending complexity.
typedef struct MgpRun MgpRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty if none. The
// pointer stays valid until the next failing call on this thread.
const char *mgp_last_error(void);

// Library version, a static string.
const char *mgp_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void mgp_string_free(char *s);

// Loads a CSV file. `label_col` may be NULL for unlabelled data;
// `max_neighbours` of 0 keeps the full neighbour ordering.
//
// # Safety
// `path` and a non-NULL `label_col` must be NUL-terminated strings; `out`
// must be a valid pointer.
enum MgpStatus mgp_dataset_load(const char *path,
                                const char *label_col,
                                size_t max_neighbours,
                                struct MgpDataset **out);

// Builds an unlabelled dataset from a row-major `rows x cols` array.
//
// # Safety
// `values` must point to `rows * cols` doubles; `out` must be valid.
enum MgpStatus mgp_dataset_from_array(const double *values,
                                      size_t rows,
                                      size_t cols,
                                      struct MgpDataset **out);

// # Safety
// `ds` must be NULL or a handle from this library, not yet freed.
void mgp_dataset_free(struct MgpDataset *ds);

// Number of instances, or 0 for NULL.
//
// # Safety
// `ds` must be NULL or a live handle.
size_t mgp_dataset_n_instances(const struct MgpDataset *ds);

// Number of features, or 0 for NULL.
//
// # Safety
// `ds` must be NULL or a live handle.
size_t mgp_dataset_n_features(const struct MgpDataset *ds);

// Parses one s-expression per line, e.g. `"(add f0 f1)\n(sigmoid f2)"`.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be valid.
enum MgpStatus mgp_individual_parse(const char *text, struct MgpIndividual **out);

// # Safety
// `ind` must be NULL or a handle from this library, not yet freed.
void mgp_individual_free(struct MgpIndividual *ind);

// Number of trees (embedding dimensions), or 0 for NULL.
//
// # Safety
// `ind` must be NULL or a live handle.
size_t mgp_individual_n_trees(const struct MgpIndividual *ind);

// The trees as newline-separated s-expressions; free with
// [`mgp_string_free`]. Returns NULL for a NULL handle.
//
// # Safety
// `ind` must be NULL or a live handle.
char *mgp_individual_to_sexpr(const struct MgpIndividual *ind);

// Structural complexity under the default cost model.
//
// # Safety
// `ind` must be a live handle and `out` valid.
enum MgpStatus mgp_individual_complexity(const struct MgpIndividual *ind, double *out);

// Neighbourhood-preservation cost of the individual on the dataset.
//
// # Safety
// `ind` and `ds` must be live handles and `out` valid.
enum MgpStatus mgp_individual_cost(const struct MgpIndividual *ind,
                                   const struct MgpDataset *ds,
                                   double *out);

// Writes the embedding row-major into `buf` (`n_instances * n_trees`
// doubles). Fails with `BufferTooSmall` when `len` is short.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum MgpStatus mgp_individual_embed(const struct MgpIndividual *ind,
                                    const struct MgpDataset *ds,
                                    double *buf,
                                    size_t len);

// Evolves embeddings for `ds`. `config_toml` may be NULL for defaults or hold
// dotted keys such as `evo.generations = 50`; `data.*` and `run.out` keys
// are accepted but unused.
//
// # Safety
// `ds` must be a live handle, `config_toml` NULL or NUL-terminated, and
// `out` valid.
enum MgpStatus mgp_run(const struct MgpDataset *ds, const char *config_toml, struct MgpRun **out);

// # Safety
// `run` must be NULL or a handle from this library, not yet freed.
void mgp_run_free(struct MgpRun *run);

// Number of front entries, or 0 for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
size_t mgp_run_front_len(const struct MgpRun *run);

// Objectives of front entry `index` (entries ascend in complexity).
//
// # Safety
// `run` must be a live handle; `cost` and `complexity` valid.
enum MgpStatus mgp_run_front_objectives(const struct MgpRun *run,
                                        size_t index,
                                        double *cost,
                                        double *complexity);

// Copies front entry `index` into a new individual handle.
//
// # Safety
// `run` must be a live handle and `out` valid.
enum MgpStatus mgp_run_front_individual(const struct MgpRun *run,
                                        size_t index,
                                        struct MgpIndividual **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MANIFOLD_GP_H */
