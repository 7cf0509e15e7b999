#include "matman/matman.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>

#include "matman/embedding.hpp"
#include "matman/error.hpp"
#include "matman/eval.hpp"
#include "matman/graph.hpp"
#include "matman/graphgeom.hpp"
#include "matman/manifold.hpp"
#include "matman/sampler.hpp"
#include "matman/train.hpp"

struct mm_manifold {
  matman::ManifoldPtr ptr;
};
struct mm_graph {
  matman::Graph g;
};
struct mm_distances {
  matman::DistanceMatrix d;
};
struct mm_embedding {
  matman::EmbeddingSet e;
};
struct mm_report {
  matman::MetricsReport r;
};
struct mm_cloud {
  matman::SampleCloud c;
};

namespace {

thread_local std::string last_error;

template <typename F>
int guard(F&& fn) {
  try {
    fn();
    last_error.clear();
    return MM_OK;
  } catch (const matman::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) matman::fail(matman::ErrorCode::invalid_input, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

matman::Mat read_point(const matman::Manifold& m, const double* data) {
  need(data, "point buffer");
  return Eigen::Map<const matman::Mat>(data, m.rows(), m.cols());
}

void write_point(const matman::Mat& p, double* out) {
  need(out, "output buffer");
  std::memcpy(out, p.data(), static_cast<std::size_t>(p.size()) * sizeof(double));
}

}  // namespace

extern "C" {

const char* mm_version(void) { return "0.1.0"; }
const char* mm_last_error(void) { return last_error.c_str(); }

const char* mm_status_name(int status) {
  if (status == MM_OK) return "ok";
  if (status >= MM_ERR_INVALID_INPUT && status <= MM_ERR_INTERNAL) {
    return matman::to_string(static_cast<matman::ErrorCode>(status));
  }
  return "unknown";
}

void mm_string_free(char* s) { std::free(s); }

int mm_manifold_parse(const char* spec, mm_manifold** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new mm_manifold{matman::parse_manifold(spec)};
  });
}
void mm_manifold_free(mm_manifold* m) { delete m; }

int mm_manifold_shape(const mm_manifold* m, int* rows, int* cols, int* dim) {
  return guard([&] {
    need(m, "manifold");
    if (rows) *rows = static_cast<int>(m->ptr->rows());
    if (cols) *cols = static_cast<int>(m->ptr->cols());
    if (dim) *dim = m->ptr->dim();
  });
}

int mm_manifold_spec(const mm_manifold* m, char** out) {
  return guard([&] {
    need(m, "manifold");
    need(out, "out");
    *out = dup(m->ptr->spec());
  });
}

int mm_manifold_base_point(const mm_manifold* m, double* out) {
  return guard([&] {
    need(m, "manifold");
    write_point(m->ptr->base_point(), out);
  });
}

int mm_manifold_distance(const mm_manifold* m, const double* x, const double* y, double* out) {
  return guard([&] {
    need(m, "manifold");
    need(out, "out");
    *out = m->ptr->distance(read_point(*m->ptr, x), read_point(*m->ptr, y));
  });
}

int mm_manifold_exp(const mm_manifold* m, const double* x, const double* v, double* out) {
  return guard([&] {
    need(m, "manifold");
    write_point(m->ptr->exp_map(read_point(*m->ptr, x), read_point(*m->ptr, v)), out);
  });
}

int mm_manifold_log(const mm_manifold* m, const double* x, const double* y, double* out) {
  return guard([&] {
    need(m, "manifold");
    write_point(m->ptr->log_map(read_point(*m->ptr, x), read_point(*m->ptr, y)), out);
  });
}

int mm_graph_load(const char* path, mm_graph** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mm_graph{matman::load_edgelist(path)};
  });
}

int mm_graph_from_edges(int m, const int* us, const int* vs, size_t n_edges, mm_graph** out) {
  return guard([&] {
    need(out, "out");
    if (n_edges > 0) {
      need(us, "us");
      need(vs, "vs");
    }
    std::vector<matman::Edge> edges;
    for (size_t k = 0; k < n_edges; ++k) edges.push_back({us[k], vs[k], 1.0});
    *out = new mm_graph{matman::make_graph(m, edges)};
  });
}
void mm_graph_free(mm_graph* g) { delete g; }

int mm_graph_info(const mm_graph* g, int* nodes, size_t* edges, int* dropped_nodes) {
  return guard([&] {
    need(g, "graph");
    if (nodes) *nodes = g->g.m;
    if (edges) *edges = g->g.edge_count();
    if (dropped_nodes) *dropped_nodes = g->g.dropped_nodes;
  });
}

int mm_distances_compute(const mm_graph* g, int max_scale, mm_distances** out) {
  return guard([&] {
    need(g, "graph");
    need(out, "out");
    auto d = matman::apsp(g->g);
    if (max_scale) d = matman::max_scale(std::move(d));
    *out = new mm_distances{std::move(d)};
  });
}

int mm_distances_load_cache(const char* path, mm_distances** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mm_distances{matman::load_distance_cache(path)};
  });
}

int mm_distances_save_cache(const mm_distances* d, const char* path) {
  return guard([&] {
    need(d, "distances");
    need(path, "path");
    matman::save_distance_cache(path, d->d);
  });
}

int mm_distances_load_dissimilarity(const char* path, mm_distances** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mm_distances{matman::max_scale(matman::load_dissimilarity(path))};
  });
}
void mm_distances_free(mm_distances* d) { delete d; }

int mm_distances_info(const mm_distances* d, int* nodes, double* scale) {
  return guard([&] {
    need(d, "distances");
    if (nodes) *nodes = d->d.m();
    if (scale) *scale = d->d.scale;
  });
}

int mm_distances_get(const mm_distances* d, int i, int j, double* out) {
  return guard([&] {
    need(d, "distances");
    need(out, "out");
    if (i < 0 || j < 0 || i >= d->d.m() || j >= d->d.m()) {
      matman::fail(matman::ErrorCode::invalid_input, "distance index out of range");
    }
    *out = d->d(i, j);
  });
}

int mm_distances_unscaled(const mm_distances* d, mm_distances** out) {
  return guard([&] {
    need(d, "distances");
    need(out, "out");
    matman::DistanceMatrix u;
    u.values = d->d.values * d->d.scale;
    u.scale = 1.0;
    *out = new mm_distances{std::move(u)};
  });
}

int mm_distances_graph(const mm_distances* d, mm_graph** out) {
  return guard([&] {
    need(d, "distances");
    need(out, "out");
    matman::Graph g;
    if (!matman::graph_from_distances(d->d, g)) {
      matman::fail(matman::ErrorCode::unsupported, "distance matrix is not a hop-distance metric");
    }
    *out = new mm_graph{std::move(g)};
  });
}

void mm_train_config_default(mm_train_config* cfg) {
  if (!cfg) return;
  const matman::TrainConfig d;
  cfg->loss = "rsne:1";
  cfg->optimizer = "radam";
  cfg->learning_rate = d.learning_rate;
  cfg->max_epochs = d.max_epochs;
  cfg->batch_nodes = d.batch_nodes;
  cfg->burn_in_epochs = d.burn_in_epochs;
  cfg->burn_in_factor = d.burn_in_factor;
  cfg->plateau_patience = d.plateau_patience;
  cfg->plateau_factor = d.plateau_factor;
  cfg->min_lr = d.min_lr;
  cfg->seed = d.seed;
  cfg->learn_scale = d.learn_scale ? 1 : 0;
  cfg->init_radius = d.init_radius;
}

int mm_train(const mm_graph* graph, const mm_distances* d, const mm_manifold* manifold,
             const mm_train_config* cfg, mm_epoch_callback cb, void* user, mm_embedding** out) {
  return guard([&] {
    need(d, "distances");
    need(manifold, "manifold");
    need(cfg, "config");
    need(out, "out");
    matman::TrainConfig c;
    c.loss = matman::parse_loss(cfg->loss ? cfg->loss : "rsne:1");
    c.optimizer = matman::parse_optimizer(cfg->optimizer ? cfg->optimizer : "radam");
    c.learning_rate = cfg->learning_rate;
    c.max_epochs = cfg->max_epochs;
    c.batch_nodes = cfg->batch_nodes;
    c.burn_in_epochs = cfg->burn_in_epochs;
    c.burn_in_factor = cfg->burn_in_factor;
    c.plateau_patience = cfg->plateau_patience;
    c.plateau_factor = cfg->plateau_factor;
    c.min_lr = cfg->min_lr;
    c.seed = cfg->seed;
    c.learn_scale = cfg->learn_scale != 0;
    c.init_radius = cfg->init_radius;
    matman::EpochCallback on_epoch;
    if (cb) on_epoch = [cb, user](int e, double l, double lr) { cb(e, l, lr, user); };
    auto result = matman::train(graph ? &graph->g : nullptr, d->d, manifold->ptr, c, on_epoch);
    *out = new mm_embedding{std::move(result.embedding)};
  });
}

int mm_embedding_load(const char* path, mm_embedding** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mm_embedding{matman::load_checkpoint(path)};
  });
}

int mm_embedding_save(const mm_embedding* e, const char* path) {
  return guard([&] {
    need(e, "embedding");
    need(path, "path");
    matman::save_checkpoint(path, e->e);
  });
}
void mm_embedding_free(mm_embedding* e) { delete e; }

int mm_embedding_info(const mm_embedding* e, int* nodes, double* scale, char** spec) {
  return guard([&] {
    need(e, "embedding");
    if (nodes) *nodes = e->e.m();
    if (scale) *scale = e->e.scale();
    if (spec) *spec = dup(e->e.manifold->spec());
  });
}

int mm_embedding_point(const mm_embedding* e, int i, double* out) {
  return guard([&] {
    need(e, "embedding");
    if (i < 0 || i >= e->e.m()) matman::fail(matman::ErrorCode::invalid_input, "point index out of range");
    write_point(e->e.points[static_cast<std::size_t>(i)], out);
  });
}

int mm_embedding_angle_samples(const mm_embedding* e, int n_triples, uint64_t seed, double* out) {
  return guard([&] {
    need(e, "embedding");
    if (n_triples > 0) need(out, "out");
    const auto s = matman::angle_sum_profile(e->e, n_triples, seed);
    std::copy(s.begin(), s.end(), out);
  });
}

int mm_evaluate(const mm_graph* graph, const mm_distances* d, const mm_embedding* e, int n_triples,
                uint64_t seed, mm_report** out) {
  return guard([&] {
    need(d, "distances");
    need(e, "embedding");
    need(out, "out");
    if (e->e.m() != d->d.m()) {
      matman::fail(matman::ErrorCode::invalid_input,
                   "embedding has " + std::to_string(e->e.m()) + " points but the distance matrix has " +
                       std::to_string(d->d.m()) + " nodes");
    }
    *out = new mm_report{matman::evaluate(graph ? &graph->g : nullptr, d->d, e->e, n_triples, seed)};
  });
}
void mm_report_free(mm_report* r) { delete r; }

int mm_report_metrics(const mm_report* r, int* has_graph, double* f1_at_1, double* auc, double* map,
                      double* avg_distortion) {
  return guard([&] {
    need(r, "report");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool g = r->r.has_graph;
    if (has_graph) *has_graph = g ? 1 : 0;
    if (f1_at_1) *f1_at_1 = g && !r->r.f1.values.empty() ? r->r.f1.values.front() : nan;
    if (auc) *auc = g ? r->r.auc : nan;
    if (map) *map = g ? r->r.map : nan;
    if (avg_distortion) *avg_distortion = r->r.avg_distortion;
  });
}

int mm_report_json(const mm_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup(matman::report_json(r->r));
  });
}

int mm_report_f1_csv(const mm_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup(matman::f1_csv(r->r.f1));
  });
}

int mm_report_angle_csv(const mm_report* r, int bins, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup(matman::histogram_csv(r->r.angles, -0.5, 1.0, bins));
  });
}

int mm_delta(const mm_distances* d, long long n_quadruples, uint64_t seed, double* max, double* mean,
             char** histogram_csv) {
  return guard([&] {
    need(d, "distances");
    const auto r = matman::delta_hyperbolicity(d->d, n_quadruples, seed);
    if (max) *max = r.max;
    if (mean) *mean = r.mean;
    if (histogram_csv) {
      const double hi = std::max(1.0, std::ceil(r.max * 2.0) / 2.0 + 0.5);
      *histogram_csv = dup(matman::histogram_csv(r.samples, 0.0, hi, static_cast<int>(hi * 4)));
    }
  });
}

int mm_ricci(const mm_graph* g, const mm_distances* d, double alpha, char** edges_csv, char** nodes_csv) {
  return guard([&] {
    need(g, "graph");
    need(d, "distances");
    if (g->g.m != d->d.m()) matman::fail(matman::ErrorCode::invalid_input, "graph and distances differ in size");
    const auto r = matman::ollivier_ricci(g->g, d->d, alpha);
    std::ostringstream e, n;
    e.precision(10);
    n.precision(10);
    // The *_limit columns rescale by 1 / (1 - alpha), estimating the alpha -> 1 limit.
    const double lim = 1.0 / (1.0 - alpha);
    e << "u,v,ricci,ricci_limit\n";
    for (std::size_t k = 0; k < r.edges.size(); ++k) {
      e << g->g.labels[static_cast<std::size_t>(r.edges[k].u)] << ','
        << g->g.labels[static_cast<std::size_t>(r.edges[k].v)] << ',' << r.edge_curvature[k] << ','
        << r.edge_curvature[k] * lim << '\n';
    }
    n << "node,mean_ricci,mean_ricci_limit\n";
    for (int x = 0; x < g->g.m; ++x) {
      const double c = r.node_curvature[static_cast<std::size_t>(x)];
      n << g->g.labels[static_cast<std::size_t>(x)] << ',' << c << ',' << c * lim << '\n';
    }
    if (edges_csv) *edges_csv = dup(e.str());
    if (nodes_csv) *nodes_csv = dup(n.str());
  });
}

int mm_sectional(const mm_graph* g, const mm_distances* d, long long n_samples, uint64_t seed,
                 char** histogram_csv, double* median) {
  return guard([&] {
    need(g, "graph");
    need(d, "distances");
    const auto s = matman::graph_sectional_samples(g->g, d->d, n_samples, seed);
    if (median) *median = matman::quantile(s, 0.5);
    if (histogram_csv) {
      double lo = -1.0, hi = 1.0;
      for (double v : s) {
        lo = std::min(lo, std::floor(v));
        hi = std::max(hi, std::ceil(v));
      }
      *histogram_csv = dup(matman::histogram_csv(s, lo, hi, 40));
    }
  });
}

int mm_sample(const mm_manifold* m, const char* method, double radius, int count, uint64_t seed,
              mm_cloud** out) {
  return guard([&] {
    need(m, "manifold");
    need(method, "method");
    need(out, "out");
    const std::string how = method;
    if (how == "uniform") {
      *out = new mm_cloud{matman::sample_uniform(m->ptr, count, seed)};
    } else if (how == "exp_ball") {
      *out = new mm_cloud{matman::sample_exp_ball(m->ptr, m->ptr->base_point(), radius, count, seed)};
    } else {
      matman::fail(matman::ErrorCode::invalid_input, "unknown sampling method '" + how + "'");
    }
  });
}
void mm_cloud_free(mm_cloud* c) { delete c; }

int mm_cloud_max_distance(const mm_cloud* c, double* out) {
  return guard([&] {
    need(c, "cloud");
    need(out, "out");
    const auto d = matman::cloud_distances(c->c);
    *out = d.size() ? d.maxCoeff() : 0.0;
  });
}

int mm_cloud_sweep(const mm_cloud* c, const double* thresholds, size_t n_thresholds,
                   long long sectional_samples, uint64_t seed, char** csv) {
  return guard([&] {
    need(c, "cloud");
    need(thresholds, "thresholds");
    need(csv, "csv");
    const std::vector<double> t(thresholds, thresholds + n_thresholds);
    *csv = dup(matman::sweep_csv(matman::sweep(matman::cloud_distances(c->c), t, sectional_samples, seed)));
  });
}

int mm_cloud_angle_csv(const mm_cloud* c, int n_triples, uint64_t seed, int bins, char** csv) {
  return guard([&] {
    need(c, "cloud");
    need(csv, "csv");
    matman::EmbeddingSet y;
    y.manifold = c->c.manifold;
    y.points = c->c.points;
    *csv = dup(matman::histogram_csv(matman::angle_sum_profile(y, n_triples, seed), -0.5, 1.0, bins));
  });
}

}  // extern "C"
