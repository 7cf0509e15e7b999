#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matman/matman.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(int status) {
  switch (status) {
    case MM_OK:
      return 0;
    case MM_ERR_INVALID_INPUT:
    case MM_ERR_IO:
    case MM_ERR_UNSUPPORTED:
    case MM_ERR_DISCONNECTED:
      return kExitData;
    default:
      return kExitNumeric;
  }
}

struct Failure {
  int exit_code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kExitUsage, msg}; }
[[noreturn]] void data_error(const std::string& msg) { throw Failure{kExitData, msg}; }

void check(int status, const std::string& context) {
  if (status != MM_OK) {
    throw Failure{exit_code_for(status),
                  context + ": " + mm_last_error() + " [" + mm_status_name(status) + "]"};
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Manifold = std::unique_ptr<mm_manifold, Deleter<mm_manifold, mm_manifold_free>>;
using GraphH = std::unique_ptr<mm_graph, Deleter<mm_graph, mm_graph_free>>;
using Distances = std::unique_ptr<mm_distances, Deleter<mm_distances, mm_distances_free>>;
using Embedding = std::unique_ptr<mm_embedding, Deleter<mm_embedding, mm_embedding_free>>;
using Report = std::unique_ptr<mm_report, Deleter<mm_report, mm_report_free>>;
using Cloud = std::unique_ptr<mm_cloud, Deleter<mm_cloud, mm_cloud_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  mm_string_free(s);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) data_error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) data_error("cannot create directory " + dir.string());
}

std::string file_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot read " + path.string());
  char buf[5] = {};
  in.read(buf, 5);
  return std::string(buf, static_cast<std::size_t>(in.gcount()));
}

int worker_cap() {
  if (const char* env = std::getenv("MM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string histogram(const std::vector<double>& s, double lo, double hi, int bins) {
  std::vector<long long> count(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double v : s) {
    auto b = static_cast<long long>(std::floor((v - lo) / width));
    b = std::clamp<long long>(b, 0, bins - 1);
    ++count[static_cast<std::size_t>(b)];
  }
  std::ostringstream out;
  out << "bin_lo,bin_hi,count,density\n";
  for (int b = 0; b < bins; ++b) {
    const double density = s.empty() ? 0.0 : count[static_cast<std::size_t>(b)] / (s.size() * width);
    out << fmt_double(lo + b * width) << ',' << fmt_double(lo + (b + 1) * width) << ','
        << count[static_cast<std::size_t>(b)] << ',' << fmt_double(density) << '\n';
  }
  return out.str();
}

json summary_stats(const std::vector<double>& s) {
  json j;
  j["count"] = s.size();
  if (s.empty()) return j;
  double mean = 0.0;
  for (double v : s) mean += v;
  j["mean"] = mean / static_cast<double>(s.size());
  j["min"] = *std::min_element(s.begin(), s.end());
  j["q25"] = quantile(s, 0.25);
  j["median"] = quantile(s, 0.5);
  j["q75"] = quantile(s, 0.75);
  j["max"] = *std::max_element(s.begin(), s.end());
  return j;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input;
  std::string output;
  bool dissimilarity = false;
  bool force = false;
};

int cmd_preprocess(const PreprocessArgs& a) {
  const fs::path out = a.output.empty() ? fs::path(a.input).replace_extension(".mmdm") : fs::path(a.output);
  const fs::path sidecar = fs::path(out.string() + ".json");
  if (!a.force && fs::exists(out) && fs::exists(sidecar)) {
    std::cout << "skipped: " << out.string() << " exists (use --force to rebuild)\n";
    return 0;
  }
  if (out.has_parent_path()) make_dirs(out.parent_path());

  json meta;
  meta["source"] = a.input;
  mm_distances* raw = nullptr;
  if (a.dissimilarity) {
    check(mm_distances_load_dissimilarity(a.input.c_str(), &raw), a.input);
    meta["kind"] = "dissimilarity";
  } else {
    mm_graph* g = nullptr;
    check(mm_graph_load(a.input.c_str(), &g), a.input);
    GraphH graph(g);
    int nodes = 0, dropped = 0;
    size_t edges = 0;
    check(mm_graph_info(graph.get(), &nodes, &edges, &dropped), a.input);
    check(mm_distances_compute(graph.get(), 1, &raw), a.input);
    meta["kind"] = "graph";
    meta["edges"] = edges;
    meta["dropped_nodes"] = dropped;
  }
  Distances d(raw);
  int m = 0;
  double scale = 0.0;
  check(mm_distances_info(d.get(), &m, &scale), a.input);
  meta["m"] = m;
  meta["diameter"] = scale;
  meta["scale"] = scale;
  check(mm_distances_save_cache(d.get(), out.string().c_str()), out.string());
  write_text(sidecar, meta.dump(2) + "\n");
  std::cout << "wrote " << out.string() << " (m=" << m << ", scale=" << fmt_double(scale) << ")\n";
  return 0;
}

// ---------------------------------------------------------------- embed

struct Preset {
  std::string name;
  const char* optimizer;
  int learn_scale;
};

Preset parse_preset(const std::string& name) {
  if (name == "radam") return {name, "radam", 0};
  if (name == "rsgd+scale") return {name, "rsgd", 1};
  if (name == "radam+scale") return {name, "radam", 1};
  usage_error("unknown optimizer preset '" + name + "' (expected radam, rsgd+scale, radam+scale)");
}

struct Cell {
  std::string name;
  std::string manifold;
  std::string loss;
  Preset preset;
  uint64_t seed = 0;
  std::string status;
  std::string message;
  int epochs = 0;
  double final_loss = std::nan("");
  double seconds = 0.0;
};

void apply_train_json(mm_train_config& cfg, const json& t) {
  for (const auto& [key, value] : t.items()) {
    if (key == "learning_rate") cfg.learning_rate = value.get<double>();
    else if (key == "max_epochs") cfg.max_epochs = value.get<int>();
    else if (key == "batch_nodes") cfg.batch_nodes = value.get<int>();
    else if (key == "burn_in_epochs") cfg.burn_in_epochs = value.get<int>();
    else if (key == "burn_in_factor") cfg.burn_in_factor = value.get<double>();
    else if (key == "plateau_patience") cfg.plateau_patience = value.get<int>();
    else if (key == "plateau_factor") cfg.plateau_factor = value.get<double>();
    else if (key == "min_lr") cfg.min_lr = value.get<double>();
    else if (key == "init_radius") cfg.init_radius = value.get<double>();
    else usage_error("unknown train key '" + key + "'");
  }
}

std::vector<std::string> string_list(const json& cfg, const char* key, std::vector<std::string> fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

struct EmbedArgs {
  std::string config;
  int workers = 0;
  bool force = false;
};

int cmd_embed(const EmbedArgs& a) {
  json cfg;
  try {
    cfg = json::parse(read_text(a.config));
  } catch (const json::exception& e) {
    usage_error(a.config + ": " + e.what());
  }
  const fs::path base = fs::path(a.config).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  std::vector<std::string> manifolds, losses, preset_names;
  std::vector<uint64_t> seeds;
  mm_train_config train;
  mm_train_config_default(&train);
  std::map<std::string, double> preset_lr;
  fs::path cache, outdir;
  try {
    if (!cfg.contains("cache")) usage_error("config needs \"cache\"");
    if (!cfg.contains("output")) usage_error("config needs \"output\"");
    cache = resolve(cfg.at("cache").get<std::string>());
    outdir = resolve(cfg.at("output").get<std::string>());
    manifolds = string_list(cfg, "manifolds", {});
    losses = string_list(cfg, "losses", {});
    preset_names = string_list(cfg, "presets", {"radam", "rsgd+scale", "radam+scale"});
    seeds = cfg.value("seeds", std::vector<uint64_t>{0});
    if (cfg.contains("train")) apply_train_json(train, cfg.at("train"));
    if (cfg.contains("preset_learning_rates")) {
      preset_lr = cfg.at("preset_learning_rates").get<std::map<std::string, double>>();
    }
  } catch (const json::exception& e) {
    usage_error(a.config + ": " + e.what());
  }
  if (manifolds.empty()) usage_error("config needs at least one manifold");
  if (losses.empty()) usage_error("config needs at least one loss");
  if (seeds.empty()) usage_error("config needs at least one seed");

  std::vector<Preset> presets;
  for (const auto& p : preset_names) presets.push_back(parse_preset(p));
  for (const auto& spec : manifolds) {
    mm_manifold* m = nullptr;
    check(mm_manifold_parse(spec.c_str(), &m), "manifold '" + spec + "'");
    mm_manifold_free(m);
  }

  mm_distances* raw = nullptr;
  check(mm_distances_load_cache(cache.string().c_str(), &raw), cache.string());
  Distances dist(raw);
  GraphH graph;
  mm_graph* g = nullptr;
  if (mm_distances_graph(dist.get(), &g) == MM_OK) graph.reset(g);

  make_dirs(outdir);
  std::vector<Cell> cells;
  for (const auto& man : manifolds) {
    for (const auto& loss : losses) {
      for (const auto& preset : presets) {
        for (uint64_t seed : seeds) {
          Cell c;
          c.manifold = man;
          c.loss = loss;
          c.preset = preset;
          c.seed = seed;
          c.name = sanitize(man) + "__" + sanitize(loss) + "__" + sanitize(preset.name) + "__seed" +
                   std::to_string(seed);
          cells.push_back(std::move(c));
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto run_cell = [&](Cell& c) {
    const fs::path dir = outdir / c.name;
    const fs::path ckpt = dir / "embedding.mmemb";
    if (!a.force && fs::exists(ckpt)) {
      c.status = "skipped";
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      make_dirs(dir);
      json meta = {{"manifold", c.manifold}, {"loss", c.loss}, {"preset", c.preset.name}, {"seed", c.seed}};
      write_text(dir / "cell.json", meta.dump(2) + "\n");
      std::error_code ec;
      fs::remove(dir / "error.txt", ec);

      mm_manifold* mp = nullptr;
      check(mm_manifold_parse(c.manifold.c_str(), &mp), c.manifold);
      Manifold man(mp);
      mm_train_config tc = train;
      tc.loss = c.loss.c_str();
      tc.optimizer = c.preset.optimizer;
      tc.learn_scale = c.preset.learn_scale;
      tc.seed = c.seed;
      if (auto it = preset_lr.find(c.preset.name); it != preset_lr.end()) tc.learning_rate = it->second;

      struct History {
        std::ostringstream csv;
        int epochs = 0;
        double last = std::nan("");
      } hist;
      hist.csv << "epoch,loss,lr\n";
      auto cb = [](int epoch, double loss, double lr, void* user) {
        auto* h = static_cast<History*>(user);
        h->csv << epoch << ',' << fmt_double(loss) << ',' << fmt_double(lr) << '\n';
        h->epochs = epoch + 1;
        h->last = loss;
      };
      mm_embedding* ep = nullptr;
      check(mm_train(graph.get(), dist.get(), man.get(), &tc, cb, &hist, &ep), c.name);
      Embedding emb(ep);
      write_text(dir / "history.csv", hist.csv.str());
      check(mm_embedding_save(emb.get(), ckpt.string().c_str()), ckpt.string());
      c.status = "ok";
      c.epochs = hist.epochs;
      c.final_loss = hist.last;
    } catch (const Failure& f) {
      c.status = "failed";
      c.message = f.message;
      std::error_code ec;
      if (fs::is_directory(dir, ec)) write_text(dir / "error.txt", f.message + "\n");
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << c.status << ": " << c.name;
    if (!c.message.empty()) std::cerr << " (" << c.message << ")";
    std::cerr << '\n';
  };

  const int workers = std::max(1, std::min<int>(a.workers > 0 ? a.workers : worker_cap(),
                                                static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < cells.size();) run_cell(cells[i]);
    });
  }
  for (auto& t : pool) t.join();

  std::ostringstream table;
  table << "cell,manifold,loss,preset,seed,status,epochs,final_loss,seconds,message\n";
  int failed = 0;
  for (const auto& c : cells) {
    if (c.status == "failed") ++failed;
    std::string msg = c.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    table << c.name << ",\"" << c.manifold << "\"," << c.loss << ',' << c.preset.name << ',' << c.seed << ','
          << c.status << ',' << c.epochs << ',' << fmt_double(c.final_loss) << ',' << fmt_double(c.seconds)
          << ",\"" << msg << "\"\n";
  }
  write_text(outdir / "cells.csv", table.str());
  std::cout << cells.size() << " cells, " << failed << " failed; summary in " << (outdir / "cells.csv").string()
            << '\n';
  return failed ? kExitNumeric : 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> inputs;
  std::string cache;
  std::string graph;
  std::string output;
  int triples = 10000;
  uint64_t seed = 0;
};

struct EvalRow {
  std::string cell;
  std::string manifold;
  int dimension = 0;
  std::string loss, preset, seed;
  double f1 = std::nan(""), auc = std::nan(""), map = std::nan(""), ad = std::nan("");
};

int cmd_eval(const EvalArgs& a) {
  std::vector<fs::path> ckpts;
  for (const auto& in : a.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".mmemb") ckpts.push_back(e.path());
      }
    } else if (fs::exists(in)) {
      ckpts.emplace_back(in);
    } else {
      data_error("no such checkpoint or directory: " + in);
    }
  }
  std::sort(ckpts.begin(), ckpts.end());
  if (ckpts.empty()) data_error("no checkpoints found");

  mm_distances* raw = nullptr;
  check(mm_distances_load_cache(a.cache.c_str(), &raw), a.cache);
  Distances dist(raw);

  bool dissimilarity = false;
  if (const fs::path side = a.cache + ".json"; fs::exists(side)) {
    try {
      dissimilarity = json::parse(read_text(side)).value("kind", "graph") == "dissimilarity";
    } catch (const json::exception&) {
    }
  }
  GraphH graph;
  mm_graph* g = nullptr;
  if (!a.graph.empty()) {
    check(mm_graph_load(a.graph.c_str(), &g), a.graph);
    graph.reset(g);
  } else if (!dissimilarity) {
    if (mm_distances_graph(dist.get(), &g) == MM_OK) {
      graph.reset(g);
    } else {
      std::cerr << "warning: no graph structure in " << a.cache << "; F1 and AUC are not computed\n";
    }
  }

  make_dirs(a.output);
  std::vector<EvalRow> rows;
  for (const auto& path : ckpts) {
    mm_embedding* ep = nullptr;
    check(mm_embedding_load(path.string().c_str(), &ep), path.string());
    Embedding emb(ep);
    EvalRow row;
    char* spec = nullptr;
    check(mm_embedding_info(emb.get(), nullptr, nullptr, &spec), path.string());
    row.manifold = take(spec);
    const fs::path meta_path = path.parent_path() / "cell.json";
    if (fs::exists(meta_path)) {
      row.cell = path.parent_path().filename().string();
      try {
        const json meta = json::parse(read_text(meta_path));
        row.loss = meta.value("loss", "");
        row.preset = meta.value("preset", "");
        if (meta.contains("seed")) row.seed = std::to_string(meta.at("seed").get<uint64_t>());
      } catch (const json::exception& e) {
        data_error(meta_path.string() + ": " + e.what());
      }
    } else {
      row.cell = path.stem().string();
    }
    mm_manifold* mp = nullptr;
    check(mm_manifold_parse(row.manifold.c_str(), &mp), path.string());
    Manifold man(mp);
    check(mm_manifold_shape(man.get(), nullptr, nullptr, &row.dimension), path.string());

    mm_report* rp = nullptr;
    check(mm_evaluate(graph.get(), dist.get(), emb.get(), a.triples, a.seed, &rp), path.string());
    Report rep(rp);
    int has_graph = 0;
    check(mm_report_metrics(rep.get(), &has_graph, &row.f1, &row.auc, &row.map, &row.ad), path.string());
    if (has_graph) {
      row.f1 *= 100.0;
      row.auc *= 100.0;
    }
    const fs::path dir = fs::path(a.output) / row.cell;
    make_dirs(dir);
    char* text = nullptr;
    check(mm_report_json(rep.get(), &text), row.cell);
    write_text(dir / "report.json", take(text));
    if (has_graph) {
      check(mm_report_f1_csv(rep.get(), &text), row.cell);
      write_text(dir / "f1.csv", take(text));
    }
    if (a.triples > 0) {
      check(mm_report_angle_csv(rep.get(), 30, &text), row.cell);
      write_text(dir / "angles.csv", take(text));
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream table;
  table << "cell,manifold,dimension,loss,preset,seed,f1_at_1,auc,map,avg_distortion\n";
  for (const auto& r : rows) {
    table << r.cell << ",\"" << r.manifold << "\"," << r.dimension << ',' << r.loss << ',' << r.preset << ','
          << r.seed << ',' << fmt_double(r.f1) << ',' << fmt_double(r.auc) << ',' << fmt_double(r.map) << ','
          << fmt_double(r.ad) << '\n';
  }
  write_text(fs::path(a.output) / "results.csv", table.str());

  // Best value of each metric taken independently over the cells of one
  // manifold and dimension.
  struct Best {
    int dimension = 0;
    int cells = 0;
    double f1 = std::nan(""), auc = std::nan(""), ad = std::nan("");
  };
  std::map<std::string, Best> best;
  auto upd_max = [](double& b, double v) {
    if (!std::isnan(v) && (std::isnan(b) || v > b)) b = v;
  };
  for (const auto& r : rows) {
    auto& b = best[r.manifold];
    b.dimension = r.dimension;
    ++b.cells;
    upd_max(b.f1, r.f1);
    upd_max(b.auc, r.auc);
    if (!std::isnan(r.ad) && (std::isnan(b.ad) || r.ad < b.ad)) b.ad = r.ad;
  }
  std::ostringstream agg;
  json agg_json = json::array();
  agg << "manifold,dimension,cells,best_f1_at_1,best_auc,best_avg_distortion\n";
  for (const auto& [spec, b] : best) {
    agg << '"' << spec << "\"," << b.dimension << ',' << b.cells << ',' << fmt_double(b.f1) << ','
        << fmt_double(b.auc) << ',' << fmt_double(b.ad) << '\n';
    agg_json.push_back({{"manifold", spec},
                        {"dimension", b.dimension},
                        {"cells", b.cells},
                        {"best_f1_at_1", number_or_null(b.f1)},
                        {"best_auc", number_or_null(b.auc)},
                        {"best_avg_distortion", number_or_null(b.ad)}});
  }
  write_text(fs::path(a.output) / "aggregate.csv", agg.str());
  write_text(fs::path(a.output) / "aggregate.json", agg_json.dump(2) + "\n");
  std::cout << agg.str();
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string input;
  std::string output;
  double alpha = 0.999;
  long long quadruples = 1000000;
  long long sectional = 10000;
  int triples = 10000;
  int bins = 40;
  uint64_t seed = 0;
  bool no_ricci = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
  make_dirs(a.output);
  const fs::path out = a.output;
  const std::string magic = file_magic(a.input);
  json summary;
  summary["input"] = a.input;

  if (magic == "MMEMB") {
    mm_embedding* ep = nullptr;
    check(mm_embedding_load(a.input.c_str(), &ep), a.input);
    Embedding emb(ep);
    std::vector<double> s(static_cast<std::size_t>(std::max(0, a.triples)));
    check(mm_embedding_angle_samples(emb.get(), a.triples, a.seed, s.data()), a.input);
    char* spec = nullptr;
    check(mm_embedding_info(emb.get(), nullptr, nullptr, &spec), a.input);
    summary["kind"] = "checkpoint";
    summary["manifold"] = take(spec);
    summary["angle_sum"] = summary_stats(s);
    write_text(out / "angles.csv", histogram(s, -0.5, 1.0, a.bins));
    std::ostringstream raw;
    raw << "k_theta\n";
    for (double v : s) raw << fmt_double(v) << '\n';
    write_text(out / "angle_samples.csv", raw.str());
  } else {
    GraphH graph;
    Distances dist;
    mm_graph* g = nullptr;
    mm_distances* d = nullptr;
    if (magic.rfind("MMDM", 0) == 0) {
      check(mm_distances_load_cache(a.input.c_str(), &d), a.input);
      Distances cached(d);
      check(mm_distances_graph(cached.get(), &g), a.input);
      graph.reset(g);
      // The cache holds single-precision values; exact hops come from the graph.
      check(mm_distances_compute(graph.get(), 0, &d), a.input);
      dist.reset(d);
    } else {
      check(mm_graph_load(a.input.c_str(), &g), a.input);
      graph.reset(g);
      check(mm_distances_compute(graph.get(), 0, &d), a.input);
      dist.reset(d);
    }
    int nodes = 0, dropped = 0;
    size_t edges = 0;
    check(mm_graph_info(graph.get(), &nodes, &edges, &dropped), a.input);
    summary["kind"] = "graph";
    summary["nodes"] = nodes;
    summary["edges"] = edges;
    summary["dropped_nodes"] = dropped;

    double dmax = 0.0, dmean = 0.0;
    char* csv = nullptr;
    check(mm_delta(dist.get(), a.quadruples, a.seed, &dmax, &dmean, &csv), "delta");
    write_text(out / "delta.csv", take(csv));
    summary["delta_max"] = dmax;
    summary["delta_mean"] = dmean;

    if (!a.no_ricci) {
      char* ecsv = nullptr;
      char* ncsv = nullptr;
      check(mm_ricci(graph.get(), dist.get(), a.alpha, &ecsv, &ncsv), "ricci");
      write_text(out / "ricci_edges.csv", take(ecsv));
      write_text(out / "ricci_nodes.csv", take(ncsv));
      summary["ricci_alpha"] = a.alpha;
    }

    double median = 0.0;
    check(mm_sectional(graph.get(), dist.get(), a.sectional, a.seed, &csv, &median), "sectional");
    write_text(out / "sectional.csv", take(csv));
    summary["sectional_median"] = number_or_null(median);
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string spec;
  std::string method = "uniform";
  double radius = 1.0;
  int count = 1000;
  uint64_t seed = 0;
  int grid = 20;
  long long sectional = 2000;
  int angles = 0;
  std::string output;
};

int cmd_sample(const SampleArgs& a) {
  mm_manifold* mp = nullptr;
  check(mm_manifold_parse(a.spec.c_str(), &mp), "manifold '" + a.spec + "'");
  Manifold man(mp);
  mm_cloud* cp = nullptr;
  check(mm_sample(man.get(), a.method.c_str(), a.radius, a.count, a.seed, &cp), a.spec);
  Cloud cloud(cp);
  double dmax = 0.0;
  check(mm_cloud_max_distance(cloud.get(), &dmax), a.spec);
  if (a.grid < 1) usage_error("--grid must be positive");
  std::vector<double> thresholds;
  for (int i = 1; i <= a.grid; ++i) thresholds.push_back(dmax * i / a.grid);
  // Threshold edges use a strict comparison; nudge the last one so that the
  // full grid ends at the complete graph.
  thresholds.back() = std::nextafter(dmax, INFINITY) * (1.0 + 1e-12);

  make_dirs(a.output);
  const fs::path out = a.output;
  char* csv = nullptr;
  check(mm_cloud_sweep(cloud.get(), thresholds.data(), thresholds.size(), a.sectional, a.seed, &csv), a.spec);
  write_text(out / "sweep.csv", take(csv));
  if (a.angles > 0) {
    check(mm_cloud_angle_csv(cloud.get(), a.angles, a.seed, 30, &csv), a.spec);
    write_text(out / "angles.csv", take(csv));
  }
  char* spec = nullptr;
  check(mm_manifold_spec(man.get(), &spec), a.spec);
  const json summary = {{"manifold", take(spec)}, {"method", a.method},     {"radius", a.radius},
                        {"count", a.count},       {"seed", a.seed},         {"grid", a.grid},
                        {"max_distance", dmax},   {"sectional", a.sectional}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "wrote " << (out / "sweep.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph embedding on matrix manifolds"};
  app.set_version_flag("--version", std::string(mm_version()));
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* sp = app.add_subcommand("preprocess", "All-pairs shortest paths, max-scaled, cached to disk");
  sp->add_option("input", pre.input, "Edge list (or square matrix with --dissimilarity)")->required();
  sp->add_option("-o,--output", pre.output, "Cache path (default: input with .mmdm extension)");
  sp->add_flag("--dissimilarity", pre.dissimilarity, "Input is a square dissimilarity matrix");
  sp->add_flag("--force", pre.force, "Rebuild an existing cache");

  EmbedArgs emb;
  auto* se = app.add_subcommand("embed", "Train every (manifold, loss, preset, seed) cell of a config");
  se->add_option("config", emb.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  se->add_option("--workers", emb.workers, "Concurrent cells (default: MM_THREADS or core count)");
  se->add_flag("--force", emb.force, "Retrain cells that already have a checkpoint");

  EvalArgs ev;
  auto* sv = app.add_subcommand("eval", "Metrics per checkpoint plus best-per-manifold aggregate");
  sv->add_option("inputs", ev.inputs, "Checkpoints or run directories")->required();
  sv->add_option("--cache", ev.cache, "Distance cache the checkpoints were trained on")->required();
  sv->add_option("--graph", ev.graph, "Edge list to use for ranking metrics");
  sv->add_option("-o,--output", ev.output, "Output directory")->required();
  sv->add_option("--triples", ev.triples, "Geodesic triangles for the angle profile")->capture_default_str();
  sv->add_option("--seed", ev.seed)->capture_default_str();

  AnalyzeArgs an;
  auto* sa = app.add_subcommand("analyze", "Curvature statistics of a graph or a checkpoint");
  sa->add_option("input", an.input, "Edge list, distance cache or checkpoint")->required();
  sa->add_option("-o,--output", an.output, "Output directory")->required();
  sa->add_option("--alpha", an.alpha, "Laziness of the Ricci measures")->capture_default_str();
  sa->add_option("--quadruples", an.quadruples, "Sampled quadruples for delta")->capture_default_str();
  sa->add_option("--sectional", an.sectional, "Sampled sectional curvature triples")->capture_default_str();
  sa->add_option("--triples", an.triples, "Triangles for the angle profile")->capture_default_str();
  sa->add_option("--bins", an.bins)->capture_default_str()->check(CLI::PositiveNumber);
  sa->add_option("--seed", an.seed)->capture_default_str();
  sa->add_flag("--no-ricci", an.no_ricci, "Skip Ollivier-Ricci curvature");

  SampleArgs sm;
  auto* ss = app.add_subcommand("sample", "Random geometric graphs on a manifold, swept over thresholds");
  ss->add_option("spec", sm.spec, "Manifold, e.g. sphere:2 or spd:3")->required();
  ss->add_option("--method", sm.method)->check(CLI::IsMember({"uniform", "exp_ball"}))->capture_default_str();
  ss->add_option("--radius", sm.radius, "Ball radius for exp_ball")->capture_default_str();
  ss->add_option("--count", sm.count)->capture_default_str()->check(CLI::PositiveNumber);
  ss->add_option("--seed", sm.seed)->capture_default_str();
  ss->add_option("--grid", sm.grid, "Number of thresholds")->capture_default_str();
  ss->add_option("--sectional", sm.sectional, "Sectional curvature samples per threshold")->capture_default_str();
  ss->add_option("--angles", sm.angles, "Triangles for an angle-sum histogram (0: none)")->capture_default_str();
  ss->add_option("-o,--output", sm.output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sp) return cmd_preprocess(pre);
    if (*se) return cmd_embed(emb);
    if (*sv) return cmd_eval(ev);
    if (*sa) return cmd_analyze(an);
    if (*ss) return cmd_sample(sm);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
