#include "twist/experiment.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "twist/baselines.hpp"
#include "twist/random.hpp"

namespace twist {

namespace {

constexpr std::size_t kMethodCount = 4;
constexpr std::size_t kMetricCount = 2;

std::size_t idx(Method m) { return static_cast<std::size_t>(m); }
std::size_t idx(Metric m) { return static_cast<std::size_t>(m); }

std::vector<double> grid(double from, double to, double step) {
  std::vector<double> out;
  const auto count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(std::round((from + i * step) * 1e9) / 1e9);
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kTwist: return "twist";
    case Method::kHosvdTucker: return "hosvd-tucker";
    case Method::kSumAdj: return "sum-adj";
    case Method::kM3Sc: return "m3-sc";
  }
  return "?";
}

std::string to_string(Metric m) { return m == Metric::kGlobal ? "global" : "layer"; }

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kDegree: return "d";
    case SweepParam::kAlpha: return "alpha";
    case SweepParam::kLayers: return "L";
    case SweepParam::kNodes: return "n";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "twist") return Method::kTwist;
  if (s == "hosvd-tucker" || s == "hosvd") return Method::kHosvdTucker;
  if (s == "sum-adj" || s == "sumadj") return Method::kSumAdj;
  if (s == "m3-sc" || s == "m3sc") return Method::kM3Sc;
  throw ParameterError("unknown method '" + s + "'");
}

Metric parse_metric(const std::string& s) {
  if (s == "global") return Metric::kGlobal;
  if (s == "layer") return Metric::kLayer;
  throw ParameterError("unknown metric '" + s + "'");
}

SweepParam parse_sweep(const std::string& s) {
  if (s == "d") return SweepParam::kDegree;
  if (s == "alpha") return SweepParam::kAlpha;
  if (s == "L") return SweepParam::kLayers;
  if (s == "n") return SweepParam::kNodes;
  throw ParameterError("unknown sweep parameter '" + s + "' (use d, alpha, L or n)");
}

std::string to_string(WarmStart w) {
  switch (w) {
    case WarmStart::kLayerSum: return "layer-sum";
    case WarmStart::kHosvd: return "hosvd";
    case WarmStart::kBest: return "best";
  }
  return "?";
}

WarmStart parse_warm_start(const std::string& s) {
  if (s == "layer-sum") return WarmStart::kLayerSum;
  if (s == "hosvd") return WarmStart::kHosvd;
  if (s == "best") return WarmStart::kBest;
  throw ParameterError("unknown warm start '" + s + "' (use layer-sum, hosvd or best)");
}

bool produces(Method method, Metric metric) {
  if (method == Method::kSumAdj) return metric == Metric::kGlobal;
  if (method == Method::kM3Sc) return metric == Metric::kLayer;
  return true;
}

void ExperimentConfig::validate() const {
  if (values.empty()) throw ParameterError("experiment: the sweep has no values");
  if (replicates < 1) throw ParameterError("experiment: replicates must be >= 1");
  if (methods.empty() || metrics.empty()) throw ParameterError("experiment: methods and metrics must be non-empty");
  if (m < 1 || K < 1) throw ParameterError("experiment: m and K must be >= 1");
  if (iter_max < 1) throw ParameterError("experiment: iter_max must be >= 1");
  for (double v : values) {
    const PointSettings s = point_settings(*this, v);
    if (s.n < 2 || s.L < 1) throw ParameterError("experiment: n must be >= 2 and L >= 1");
    if (s.L < m) throw ParameterError("experiment: L must be >= m");
    planted_p(s.n, K, s.d, s.alpha);
  }
}

ExperimentConfig simulation_preset(int id) {
  ExperimentConfig c;
  c.simulation = id;
  switch (id) {
    case 1:
      c.sweep = SweepParam::kDegree;
      c.values = grid(2, 20, 1);
      break;
    case 2:
      c.sweep = SweepParam::kAlpha;
      c.values = grid(0.1, 0.8, 0.1);
      break;
    case 3:
      c.alpha = 0.6;
      c.sweep = SweepParam::kLayers;
      c.values = grid(10, 60, 10);
      break;
    case 4:
      c.alpha = 0.6;
      c.sweep = SweepParam::kNodes;
      c.values = grid(100, 1200, 100);
      break;
    case 5:
      c.K = 3;
      c.alpha = 0.6;
      c.sweep = SweepParam::kDegree;
      c.values = grid(3, 30, 3);
      break;
    case 6:
      c.K = 3;
      c.L = 30;
      c.sweep = SweepParam::kAlpha;
      c.values = grid(0.1, 0.9, 0.1);
      break;
    case 7:
      c.K = 3;
      c.L = 30;
      c.alpha = 0.6;
      c.sweep = SweepParam::kLayers;
      c.values = grid(20, 80, 10);
      break;
    case 8:
      c.K = 3;
      c.L = 30;
      c.alpha = 0.6;
      c.d_per_node = 0.02;
      c.sweep = SweepParam::kNodes;
      c.values = grid(100, 1200, 100);
      break;
    default:
      throw ParameterError("simulation id must be 1..8");
  }
  if (id <= 4) {
    c.methods = {Method::kTwist, Method::kHosvdTucker, Method::kSumAdj};
    c.metrics = {Metric::kGlobal};
  } else {
    c.methods = {Method::kTwist, Method::kHosvdTucker, Method::kM3Sc};
    c.metrics = {Metric::kLayer};
  }
  return c;
}

ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
  static const std::vector<std::string> known = {"simulation", "n", "L", "m", "K", "d", "d_per_node", "alpha",
                                                 "sweep", "values", "from", "to", "step", "replicates", "seed",
                                                 "methods", "metrics", "layer_method", "warm_start", "iter_max",
                                                 "self_loops"};
  for (const auto& k : kv.keys())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ParameterError("experiment config: unknown key '" + k + "'");

  ExperimentConfig c;
  const auto sim = kv.get("simulation");
  if (sim && *sim != "custom") {
    c = simulation_preset(static_cast<int>(kv.get_int("simulation", 0)));
  } else {
    c.methods = {Method::kTwist, Method::kHosvdTucker, Method::kSumAdj, Method::kM3Sc};
    c.metrics = {Metric::kGlobal, Metric::kLayer};
  }
  c.n = kv.get_int("n", c.n);
  c.L = kv.get_int("L", c.L);
  c.m = static_cast<int>(kv.get_int("m", c.m));
  c.K = static_cast<int>(kv.get_int("K", c.K));
  c.d = kv.get_real("d", c.d);
  if (kv.has("d_per_node")) c.d_per_node = kv.get_real("d_per_node", 0.0);
  c.alpha = kv.get_real("alpha", c.alpha);
  if (kv.has("sweep")) c.sweep = parse_sweep(*kv.get("sweep"));
  if (kv.has("values")) {
    c.values = kv.get_reals("values");
  } else if (kv.has("from") || kv.has("to") || kv.has("step")) {
    if (!kv.has("from") || !kv.has("to") || !kv.has("step"))
      throw ParameterError("experiment config: from, to and step go together");
    const double step = kv.get_real("step", 1.0);
    if (!(step > 0.0)) throw ParameterError("experiment config: step must be positive");
    c.values = grid(kv.get_real("from", 0.0), kv.get_real("to", 0.0), step);
  }
  if (c.values.empty()) {
    switch (c.sweep) {
      case SweepParam::kDegree: c.values = {c.d}; break;
      case SweepParam::kAlpha: c.values = {c.alpha}; break;
      case SweepParam::kLayers: c.values = {static_cast<double>(c.L)}; break;
      case SweepParam::kNodes: c.values = {static_cast<double>(c.n)}; break;
    }
  }
  c.replicates = static_cast<int>(kv.get_int("replicates", c.replicates));
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
  if (kv.has("methods")) {
    c.methods.clear();
    for (const auto& s : split_list(*kv.get("methods"))) c.methods.push_back(parse_method(s));
  }
  if (kv.has("metrics")) {
    c.metrics.clear();
    for (const auto& s : split_list(*kv.get("metrics"))) c.metrics.push_back(parse_metric(s));
  }
  if (kv.has("warm_start")) c.warm_start = parse_warm_start(*kv.get("warm_start"));
  if (kv.has("layer_method")) {
    const auto lm = *kv.get("layer_method");
    if (lm == "kmeans") c.layer_method = LayerClusterMethod::kKmeans;
    else if (lm == "supnorm") c.layer_method = LayerClusterMethod::kSupnorm;
    else throw ParameterError("layer_method must be kmeans or supnorm");
  }
  c.iter_max = static_cast<int>(kv.get_int("iter_max", c.iter_max));
  c.self_loops = kv.get_flag("self_loops", c.self_loops);
  c.validate();
  return c;
}

PointSettings point_settings(const ExperimentConfig& cfg, double value) {
  PointSettings s{cfg.n, cfg.L, cfg.d, cfg.alpha};
  switch (cfg.sweep) {
    case SweepParam::kDegree: s.d = value; break;
    case SweepParam::kAlpha: s.alpha = value; break;
    case SweepParam::kLayers: s.L = static_cast<Eigen::Index>(std::llround(value)); break;
    case SweepParam::kNodes: s.n = static_cast<Eigen::Index>(std::llround(value)); break;
  }
  if (cfg.d_per_node) s.d = *cfg.d_per_node * static_cast<double>(s.n);
  return s;
}

ReplicateResult run_replicate(const ExperimentConfig& cfg, std::size_t point, std::size_t replicate) {
  ReplicateResult out;
  out.rates.assign(kMethodCount, std::vector<std::optional<double>>(kMetricCount));

  const PointSettings s = point_settings(cfg, cfg.values.at(point));
  Rng seeds(cfg.seed, {key(Stream::kReplicate), point, replicate});
  const std::uint64_t params_seed = seeds();
  const std::uint64_t labels_seed = seeds();
  const std::uint64_t tensor_seed = seeds();
  KmeansConfig km;
  km.seed = seeds();

  const MmsbmParams params = planted_params(s.n, cfg.m, cfg.K, s.d, s.alpha, params_seed);
  const LayerLabels labels = sample_labels(params, s.L, labels_seed);
  const Tensor3d a = sample_tensor(params, labels, tensor_seed, cfg.self_loops);
  const Partition truth_global = global_membership(params);
  const Partition truth_layers = layer_partition(labels);

  TwistConfig tc;
  tc.r = std::max<Eigen::Index>(membership_rank(params), cfg.m);
  tc.m = cfg.m;
  tc.iter_max = cfg.iter_max;
  tc.warm_start = cfg.warm_start;
  const int kbar = truth_global.k();

  auto wants = [&](Method method, Metric metric) {
    return std::find(cfg.metrics.begin(), cfg.metrics.end(), metric) != cfg.metrics.end() && produces(method, metric);
  };
  auto record = [&](Method method, Metric metric, const Partition& est) {
    if (!wants(method, metric)) return;
    const Partition& truth = metric == Metric::kGlobal ? truth_global : truth_layers;
    out.rates[idx(method)][idx(metric)] = misclustering(est, truth).rate;
  };

  for (Method method : cfg.methods) {
    try {
      switch (method) {
        case Method::kTwist: {
          PipelineOptions opt;
          opt.layer_method = cfg.layer_method;
          opt.kmeans = km;
          opt.local_communities = false;
          const TwistResult res = twist_pipeline(a, tc, kbar, {cfg.K}, opt);
          record(method, Metric::kGlobal, res.global);
          record(method, Metric::kLayer, res.layers);
          break;
        }
        case Method::kHosvdTucker: {
          const EmbeddingPair emb = hosvd_tucker(a, tc);
          if (wants(method, Metric::kGlobal)) record(method, Metric::kGlobal, kmeans(emb.U.matrix(), kbar, km).partition);
          if (wants(method, Metric::kLayer))
            record(method, Metric::kLayer, kmeans(emb.W.matrix(), cfg.m, km).partition);
          break;
        }
        case Method::kSumAdj:
          if (wants(method, Metric::kGlobal)) record(method, Metric::kGlobal, sum_adj(a, kbar, km));
          break;
        case Method::kM3Sc:
          if (wants(method, Metric::kLayer)) record(method, Metric::kLayer, m3_spectral(a, cfg.m, km));
          break;
      }
    } catch (const std::exception& e) {
      out.errors.push_back(to_string(method) + " at point " + std::to_string(point) + " replicate " +
                           std::to_string(replicate) + ": " + e.what());
    }
  }
  return out;
}

const ResultRow* ExperimentResult::find(double value, Method method, Metric metric) const {
  for (const auto& row : rows)
    if (std::abs(row.value - value) < 1e-9 && row.method == to_string(method) && row.metric == to_string(metric))
      return &row;
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads, const ProgressFn& progress) {
  cfg.validate();
  const std::size_t points = cfg.values.size();
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  const std::size_t total = points * reps;
  std::vector<ReplicateResult> results(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      results[task] = run_replicate(cfg, task / reps, task % reps);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, total);
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  ExperimentResult out;
  for (std::size_t p = 0; p < points; ++p) {
    for (Method method : cfg.methods) {
      for (Metric metric : cfg.metrics) {
        if (!produces(method, metric)) continue;
        std::vector<double> xs;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto& v = results[p * reps + r].rates[idx(method)][idx(metric)];
          if (v) xs.push_back(*v);
        }
        ResultRow row;
        row.sweep_param = to_string(cfg.sweep);
        row.value = cfg.values[p];
        row.method = to_string(method);
        row.metric = to_string(metric);
        row.replicates = static_cast<int>(xs.size());
        if (!xs.empty()) {
          double mean = 0.0;
          for (double x : xs) mean += x;
          mean /= static_cast<double>(xs.size());
          double ss = 0.0;
          for (double x : xs) ss += (x - mean) * (x - mean);
          row.mean = mean;
          row.std_error = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))
                                        : 0.0;
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  for (const auto& r : results) out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());
  return out;
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << "sweep_param,value,method,metric,mean,stderr,replicates\n";
  for (const auto& row : result.rows) {
    out << row.sweep_param << ',' << format_real(row.value) << ',' << row.method << ',' << row.metric << ','
        << (row.mean ? format_real(*row.mean) : "") << ',' << (row.std_error ? format_real(*row.std_error) : "") << ','
        << row.replicates << '\n';
  }
}

void write_json(std::ostream& out, const ExperimentResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"sweep_param", row.sweep_param},
                    {"value", row.value},
                    {"method", row.method},
                    {"metric", row.metric},
                    {"mean", row.mean ? nlohmann::json(*row.mean) : nlohmann::json(nullptr)},
                    {"stderr", row.std_error ? nlohmann::json(*row.std_error) : nlohmann::json(nullptr)},
                    {"replicates", row.replicates}});
  }
  nlohmann::json doc = {{"rows", rows}, {"errors", result.errors}};
  out << doc.dump(2) << '\n';
}

}  // namespace twist
