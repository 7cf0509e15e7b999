#ifndef MATMAN_MATMAN_H
#define MATMAN_MATMAN_H

/*
 * C interface to the matman graph-embedding library.
 *
 * Every fallible call returns MM_OK (0) or one of the MM_ERR_* codes; the
 * message of the most recent failure on the calling thread is available from
 * mm_last_error(). Objects are opaque handles released with their *_free
 * function (NULL is accepted). Strings returned through `char**` are owned by
 * the caller and released with mm_string_free().
 *
 * Points are passed as column-major double buffers of rows*cols entries, the
 * shape reported by mm_manifold_shape().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MATMAN_BUILDING_LIBRARY)
#    define MM_API __declspec(dllexport)
#  else
#    define MM_API __declspec(dllimport)
#  endif
#else
#  define MM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  MM_OK = 0,
  MM_ERR_INVALID_INPUT = 1,
  MM_ERR_NOT_POSITIVE_DEFINITE = 2,
  MM_ERR_SINGULAR = 3,
  MM_ERR_NUMERICAL_DOMAIN = 4,
  MM_ERR_CUT_LOCUS = 5,
  MM_ERR_IO = 6,
  MM_ERR_UNSUPPORTED = 7,
  MM_ERR_DISCONNECTED = 8,
  MM_ERR_DEGENERATE = 9,
  MM_ERR_INTERNAL = 10
};

typedef struct mm_manifold mm_manifold;
typedef struct mm_graph mm_graph;
typedef struct mm_distances mm_distances;
typedef struct mm_embedding mm_embedding;
typedef struct mm_report mm_report;
typedef struct mm_cloud mm_cloud;

MM_API const char* mm_version(void);
MM_API const char* mm_last_error(void);
MM_API const char* mm_status_name(int status);
MM_API void mm_string_free(char* s);

/* Manifolds: "euclidean:3", "sphere:2", "lorentz:3", "spd:2", "stein:2",
 * "grassmann:2,4", "so:3", "product:(lorentz:2)x(sphere:2)". */
MM_API int mm_manifold_parse(const char* spec, mm_manifold** out);
MM_API void mm_manifold_free(mm_manifold* m);
MM_API int mm_manifold_shape(const mm_manifold* m, int* rows, int* cols, int* dim);
MM_API int mm_manifold_spec(const mm_manifold* m, char** out);
MM_API int mm_manifold_base_point(const mm_manifold* m, double* out);
MM_API int mm_manifold_distance(const mm_manifold* m, const double* x, const double* y, double* out);
MM_API int mm_manifold_exp(const mm_manifold* m, const double* x, const double* v, double* out);
MM_API int mm_manifold_log(const mm_manifold* m, const double* x, const double* y, double* out);

/* Graphs. Loading keeps the largest connected component. */
MM_API int mm_graph_load(const char* path, mm_graph** out);
MM_API int mm_graph_from_edges(int m, const int* us, const int* vs, size_t n_edges, mm_graph** out);
MM_API void mm_graph_free(mm_graph* g);
MM_API int mm_graph_info(const mm_graph* g, int* nodes, size_t* edges, int* dropped_nodes);

/* Distance matrices. mm_distances_compute runs all-pairs shortest paths and,
 * when max_scale is nonzero, divides by the diameter. */
MM_API int mm_distances_compute(const mm_graph* g, int max_scale, mm_distances** out);
MM_API int mm_distances_load_cache(const char* path, mm_distances** out);
MM_API int mm_distances_save_cache(const mm_distances* d, const char* path);
/* Square text matrix; the result is max-scaled. */
MM_API int mm_distances_load_dissimilarity(const char* path, mm_distances** out);
MM_API void mm_distances_free(mm_distances* d);
MM_API int mm_distances_info(const mm_distances* d, int* nodes, double* scale);
MM_API int mm_distances_get(const mm_distances* d, int i, int j, double* out);
/* Unscaled copy (entries multiplied by the recorded scale). */
MM_API int mm_distances_unscaled(const mm_distances* d, mm_distances** out);
/* Recovers the graph behind a hop-distance cache; MM_ERR_UNSUPPORTED when the
 * matrix is not a max-scaled hop metric. */
MM_API int mm_distances_graph(const mm_distances* d, mm_graph** out);

/* Training. */
typedef struct mm_train_config {
  const char* loss;      /* "neighborhood", "stress", "distortion", "rsne:T" */
  const char* optimizer; /* "rsgd" or "radam" */
  double learning_rate;
  int max_epochs;
  int batch_nodes;
  int burn_in_epochs;
  double burn_in_factor;
  int plateau_patience;
  double plateau_factor;
  double min_lr;
  uint64_t seed;
  int learn_scale;
  double init_radius;
} mm_train_config;

typedef void (*mm_epoch_callback)(int epoch, double loss, double lr, void* user);

MM_API void mm_train_config_default(mm_train_config* cfg);
/* graph may be NULL unless the loss is "neighborhood". */
MM_API int mm_train(const mm_graph* graph, const mm_distances* d, const mm_manifold* manifold,
                    const mm_train_config* cfg, mm_epoch_callback cb, void* user,
                    mm_embedding** out);

MM_API int mm_embedding_load(const char* path, mm_embedding** out);
MM_API int mm_embedding_save(const mm_embedding* e, const char* path);
MM_API void mm_embedding_free(mm_embedding* e);
MM_API int mm_embedding_info(const mm_embedding* e, int* nodes, double* scale, char** spec);
MM_API int mm_embedding_point(const mm_embedding* e, int i, double* out);
/* Normalized angle sums (angle sum - pi) / (2 pi) of n_triples random geodesic
 * triangles; out holds n_triples doubles. */
MM_API int mm_embedding_angle_samples(const mm_embedding* e, int n_triples, uint64_t seed, double* out);

/* Evaluation. graph may be NULL (no ranking metrics). */
MM_API int mm_evaluate(const mm_graph* graph, const mm_distances* d, const mm_embedding* e,
                       int n_triples, uint64_t seed, mm_report** out);
MM_API void mm_report_free(mm_report* r);
/* Missing ranking metrics are reported as NaN and has_graph = 0. */
MM_API int mm_report_metrics(const mm_report* r, int* has_graph, double* f1_at_1, double* auc,
                             double* map, double* avg_distortion);
MM_API int mm_report_json(const mm_report* r, char** out);
MM_API int mm_report_f1_csv(const mm_report* r, char** out);
MM_API int mm_report_angle_csv(const mm_report* r, int bins, char** out);

/* Graph diagnostics; d should hold unscaled graph distances. */
MM_API int mm_delta(const mm_distances* d, long long n_quadruples, uint64_t seed, double* max,
                    double* mean, char** histogram_csv);
MM_API int mm_ricci(const mm_graph* g, const mm_distances* d, double alpha, char** edges_csv,
                    char** nodes_csv);
MM_API int mm_sectional(const mm_graph* g, const mm_distances* d, long long n_samples, uint64_t seed,
                        char** histogram_csv, double* median);

/* Manifold random graphs. method is "uniform" or "exp_ball"; the ball is
 * centred at the manifold's base point. */
MM_API int mm_sample(const mm_manifold* m, const char* method, double radius, int count, uint64_t seed,
                     mm_cloud** out);
MM_API void mm_cloud_free(mm_cloud* c);
MM_API int mm_cloud_max_distance(const mm_cloud* c, double* out);
MM_API int mm_cloud_sweep(const mm_cloud* c, const double* thresholds, size_t n_thresholds,
                          long long sectional_samples, uint64_t seed, char** csv);
MM_API int mm_cloud_angle_csv(const mm_cloud* c, int n_triples, uint64_t seed, int bins, char** csv);

#ifdef __cplusplus
}
#endif

#endif
