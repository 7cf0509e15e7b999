#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "matman/matman.h"

namespace {

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("matman_capi_" + name)).string();
}

}  // namespace

TEST(CApi, ManifoldRoundTrip) {
  mm_manifold* m = nullptr;
  ASSERT_EQ(mm_manifold_parse("spd:2", &m), MM_OK);
  int rows = 0, cols = 0, dim = 0;
  ASSERT_EQ(mm_manifold_shape(m, &rows, &cols, &dim), MM_OK);
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(cols, 2);
  EXPECT_EQ(dim, 3);
  char* spec = nullptr;
  ASSERT_EQ(mm_manifold_spec(m, &spec), MM_OK);
  EXPECT_STREQ(spec, "spd:2");
  mm_string_free(spec);

  double x[4], v[4] = {0.3, 0.1, 0.1, -0.2}, y[4], back[4], d = 0;
  ASSERT_EQ(mm_manifold_base_point(m, x), MM_OK);
  ASSERT_EQ(mm_manifold_exp(m, x, v, y), MM_OK);
  ASSERT_EQ(mm_manifold_log(m, x, y, back), MM_OK);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back[i], v[i], 1e-12);
  ASSERT_EQ(mm_manifold_distance(m, x, y, &d), MM_OK);
  EXPECT_NEAR(d, std::sqrt(0.09 + 0.02 + 0.04), 1e-12);
  mm_manifold_free(m);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  mm_manifold* m = nullptr;
  EXPECT_EQ(mm_manifold_parse("torus:2", &m), MM_ERR_INVALID_INPUT);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(mm_last_error()).find("torus"), std::string::npos);
  EXPECT_STREQ(mm_status_name(MM_ERR_CUT_LOCUS), "cut locus");
  EXPECT_STREQ(mm_status_name(MM_OK), "ok");
  EXPECT_EQ(mm_manifold_parse(nullptr, &m), MM_ERR_INVALID_INPUT);

  ASSERT_EQ(mm_manifold_parse("sphere:2", &m), MM_OK);
  const double a[3] = {1, 0, 0}, b[3] = {-1, 0, 0};
  double out[3];
  EXPECT_EQ(mm_manifold_log(m, a, b, out), MM_ERR_CUT_LOCUS);
  mm_manifold_free(m);

  mm_graph* g = nullptr;
  EXPECT_EQ(mm_graph_load("/nonexistent/file.txt", &g), MM_ERR_IO);
  const int us[] = {0}, vs[] = {1};
  ASSERT_EQ(mm_graph_from_edges(3, us, vs, 1, &g), MM_OK);
  mm_distances* d = nullptr;
  EXPECT_EQ(mm_distances_compute(g, 1, &d), MM_ERR_DISCONNECTED);
  mm_graph_free(g);
  mm_graph_free(nullptr);
  mm_distances_free(nullptr);
}

TEST(CApi, EndToEnd) {
  const int us[] = {0, 1, 1, 3, 3}, vs[] = {1, 2, 3, 4, 5};
  mm_graph* g = nullptr;
  ASSERT_EQ(mm_graph_from_edges(6, us, vs, 5, &g), MM_OK);
  int nodes = 0, dropped = -1;
  size_t edges = 0;
  ASSERT_EQ(mm_graph_info(g, &nodes, &edges, &dropped), MM_OK);
  EXPECT_EQ(nodes, 6);
  EXPECT_EQ(edges, 5u);
  EXPECT_EQ(dropped, 0);

  mm_distances* d = nullptr;
  ASSERT_EQ(mm_distances_compute(g, 1, &d), MM_OK);
  double scale = 0, v = 0;
  ASSERT_EQ(mm_distances_info(d, &nodes, &scale), MM_OK);
  EXPECT_EQ(scale, 3.0);
  ASSERT_EQ(mm_distances_get(d, 0, 4, &v), MM_OK);
  EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_EQ(mm_distances_get(d, 0, 9, &v), MM_ERR_INVALID_INPUT);

  const std::string cache = tmp("c.mmdm");
  ASSERT_EQ(mm_distances_save_cache(d, cache.c_str()), MM_OK);
  mm_distances* d2 = nullptr;
  ASSERT_EQ(mm_distances_load_cache(cache.c_str(), &d2), MM_OK);
  mm_graph* g2 = nullptr;
  ASSERT_EQ(mm_distances_graph(d2, &g2), MM_OK);
  ASSERT_EQ(mm_graph_info(g2, &nodes, &edges, nullptr), MM_OK);
  EXPECT_EQ(edges, 5u);

  mm_manifold* m = nullptr;
  ASSERT_EQ(mm_manifold_parse("lorentz:2", &m), MM_OK);
  mm_train_config cfg;
  mm_train_config_default(&cfg);
  cfg.max_epochs = 50;
  int calls = 0;
  auto cb = [](int, double loss, double, void* user) {
    EXPECT_TRUE(std::isfinite(loss));
    ++*static_cast<int*>(user);
  };
  mm_embedding* e = nullptr;
  ASSERT_EQ(mm_train(g2, d2, m, &cfg, cb, &calls, &e), MM_OK) << mm_last_error();
  EXPECT_EQ(calls, 50);

  const std::string ckpt = tmp("e.mmemb");
  ASSERT_EQ(mm_embedding_save(e, ckpt.c_str()), MM_OK);
  mm_embedding* e2 = nullptr;
  ASSERT_EQ(mm_embedding_load(ckpt.c_str(), &e2), MM_OK);
  char* spec = nullptr;
  ASSERT_EQ(mm_embedding_info(e2, &nodes, &scale, &spec), MM_OK);
  EXPECT_STREQ(spec, "lorentz:2");
  mm_string_free(spec);
  double p[3];
  ASSERT_EQ(mm_embedding_point(e2, 5, p), MM_OK);
  EXPECT_NEAR(-p[0] * p[0] + p[1] * p[1] + p[2] * p[2], -1.0, 1e-9);
  EXPECT_EQ(mm_embedding_point(e2, 6, p), MM_ERR_INVALID_INPUT);

  mm_report* r = nullptr;
  ASSERT_EQ(mm_evaluate(g2, d2, e2, 200, 1, &r), MM_OK);
  int has_graph = 0;
  double f1 = 0, auc = 0, map = 0, ad = 0;
  ASSERT_EQ(mm_report_metrics(r, &has_graph, &f1, &auc, &map, &ad), MM_OK);
  EXPECT_EQ(has_graph, 1);
  EXPECT_GE(f1, 0.0);
  EXPECT_LE(auc, 1.0);
  char* json = nullptr;
  ASSERT_EQ(mm_report_json(r, &json), MM_OK);
  EXPECT_NE(std::string(json).find("avg_distortion"), std::string::npos);
  mm_string_free(json);
  mm_report_free(r);

  ASSERT_EQ(mm_evaluate(nullptr, d2, e2, 0, 1, &r), MM_OK);
  ASSERT_EQ(mm_report_metrics(r, &has_graph, &f1, &auc, &map, &ad), MM_OK);
  EXPECT_EQ(has_graph, 0);
  EXPECT_TRUE(std::isnan(f1));
  EXPECT_FALSE(std::isnan(ad));
  mm_report_free(r);

  std::vector<double> angles(100);
  ASSERT_EQ(mm_embedding_angle_samples(e2, 100, 3, angles.data()), MM_OK);
  for (double a : angles) EXPECT_LE(a, 1e-9);

  mm_embedding_free(e);
  mm_embedding_free(e2);
  mm_manifold_free(m);
  mm_graph_free(g);
  mm_graph_free(g2);
  mm_distances_free(d);
  mm_distances_free(d2);
  std::filesystem::remove(cache);
  std::filesystem::remove(ckpt);
}

TEST(CApi, Diagnostics) {
  const int us[] = {0, 0, 0, 1}, vs[] = {1, 2, 3, 4};
  mm_graph* g = nullptr;
  ASSERT_EQ(mm_graph_from_edges(5, us, vs, 4, &g), MM_OK);
  mm_distances* d = nullptr;
  ASSERT_EQ(mm_distances_compute(g, 0, &d), MM_OK);
  double dmax = -1, dmean = -1, median = 0;
  char* csv = nullptr;
  ASSERT_EQ(mm_delta(d, 100, 1, &dmax, &dmean, &csv), MM_OK);
  EXPECT_EQ(dmax, 0.0);
  mm_string_free(csv);
  char *ecsv = nullptr, *ncsv = nullptr;
  ASSERT_EQ(mm_ricci(g, d, 0.5, &ecsv, &ncsv), MM_OK);
  EXPECT_EQ(std::string(ecsv).rfind("u,v,ricci,ricci_limit\n", 0), 0u);
  mm_string_free(ecsv);
  mm_string_free(ncsv);
  ASSERT_EQ(mm_sectional(g, d, 100, 1, &csv, &median), MM_OK);
  mm_string_free(csv);
  mm_graph_free(g);
  mm_distances_free(d);

  mm_manifold* m = nullptr;
  ASSERT_EQ(mm_manifold_parse("sphere:2", &m), MM_OK);
  mm_cloud* c = nullptr;
  ASSERT_EQ(mm_sample(m, "uniform", 0, 120, 1, &c), MM_OK);
  double far = 0;
  ASSERT_EQ(mm_cloud_max_distance(c, &far), MM_OK);
  EXPECT_LE(far, M_PI + 1e-12);
  const double t[] = {0.5, 1.0, far * 1.000001};
  ASSERT_EQ(mm_cloud_sweep(c, t, 3, 100, 1, &csv), MM_OK);
  EXPECT_NE(std::string(csv).find("119"), std::string::npos);
  mm_string_free(csv);
  EXPECT_EQ(mm_sample(m, "gaussian", 1, 10, 1, &c), MM_ERR_INVALID_INPUT);
  mm_cloud_free(c);
  mm_manifold_free(m);
}
