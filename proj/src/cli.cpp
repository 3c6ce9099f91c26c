#include "twist/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twist/baselines.hpp"
#include "twist/experiment.hpp"
#include "twist/io.hpp"
#include "twist/mmsbm.hpp"
#include "twist/twist.hpp"

namespace twist {

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "csv";
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_label_file(const std::filesystem::path& path, const std::vector<std::string>& ids, const Partition& p) {
  auto out = open_output(path);
  write_labels(out, ids, p);
}

// ---- simulate ----

struct SimulateOptions {
  std::string config;
  std::string out;
  bool fast = false;
};

int run_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = experiment_from_config(KeyValueConfig::load(o.config));
  if (o.fast) cfg.replicates = 20;
  if (g.seed) cfg.seed = *g.seed;
  const ExperimentResult result = run_experiment(cfg, g.threads);
  for (const auto& e : result.errors) err << "warning: " << e << '\n';

  auto emit = [&](std::ostream& dst) {
    if (g.format == "json") write_json(dst, result);
    else write_csv(dst, result);
  };
  if (o.out.empty()) {
    emit(out);
  } else {
    auto file = open_output(o.out);
    emit(file);
  }
  return kExitOk;
}

// ---- sample ----

struct SampleOptions {
  std::string config;
  std::string out;
  std::string truth_dir;
};

int run_sample(const GlobalOptions& g, const SampleOptions& o, std::ostream& out) {
  const KeyValueConfig kv = KeyValueConfig::load(o.config);
  static const std::vector<std::string> known = {"n", "L", "m", "K", "d", "alpha", "seed", "self_loops"};
  for (const auto& k : kv.keys())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ParameterError("sample config: unknown key '" + k + "'");

  const Eigen::Index n = kv.get_int("n", 600);
  const Eigen::Index L = kv.get_int("L", 20);
  const int m = static_cast<int>(kv.get_int("m", 3));
  const int K = static_cast<int>(kv.get_int("K", 2));
  if (n < 2 || L < 1) throw ParameterError("sample: n must be >= 2 and L >= 1");
  const std::uint64_t seed = g.seed.value_or(static_cast<std::uint64_t>(kv.get_int("seed", 1)));

  const MmsbmParams params = planted_params(n, m, K, kv.get_real("d", 10.0), kv.get_real("alpha", 0.4), seed);
  const LayerLabels labels = sample_labels(params, L, seed);
  const Tensor3d a = sample_tensor(params, labels, seed, kv.get_flag("self_loops", false));

  std::vector<std::string> node_ids;
  for (Eigen::Index i = 0; i < n; ++i) node_ids.push_back("v" + std::to_string(i + 1));
  std::vector<std::string> layer_names;
  for (Eigen::Index l = 0; l < L; ++l) layer_names.push_back("layer" + std::to_string(l + 1));

  {
    auto file = open_output(o.out);
    write_layered_edgelist(file, graph_from_tensor(a, node_ids, layer_names));
  }
  if (!o.truth_dir.empty()) {
    const std::filesystem::path dir(o.truth_dir);
    std::filesystem::create_directories(dir);
    write_label_file(dir / "global_labels.tsv", node_ids, global_membership(params));
    write_label_file(dir / "layer_labels.tsv", layer_names, layer_partition(labels));
    for (int j = 0; j < m; ++j)
      write_label_file(dir / ("local_labels_" + std::to_string(j + 1) + ".tsv"), node_ids, local_membership(params, j));
  }
  if (g.format == "json") {
    out << nlohmann::json{{"nodes", n}, {"layers", L}, {"seed", seed}, {"output", o.out}}.dump() << '\n';
  } else {
    out << "nodes,layers,seed,output\n" << n << ',' << L << ',' << seed << ',' << o.out << '\n';
  }
  return kExitOk;
}

// ---- fit ----

struct FitOptions {
  std::string input;
  Eigen::Index rank_r = 0;
  Eigen::Index rank_m = 0;
  int kbar = 0;
  std::vector<int> local_k;
  double weight_min = 0.0;
  Eigen::Index min_component = 0;
  bool intersect = false;
  std::string layer_method = "kmeans";
  std::string warm_start = "layer-sum";
  int iter_max = 30;
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::optional<double> epsilon0;
  std::string out_dir;
};

int run_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out, std::ostream& err) {
  const Preprocessed data = preprocess(load_layered_edgelist(o.input), o.weight_min, o.min_component, o.intersect);

  TwistConfig config;
  config.r = o.rank_r;
  config.m = o.rank_m;
  config.iter_max = o.iter_max;
  config.delta1 = o.delta1;
  config.delta2 = o.delta2;
  config.warm_start = parse_warm_start(o.warm_start);

  PipelineOptions options;
  options.layer_method = o.layer_method == "supnorm" ? LayerClusterMethod::kSupnorm : LayerClusterMethod::kKmeans;
  options.epsilon0 = o.epsilon0;
  options.kmeans.seed = g.seed.value_or(0);
  options.local_communities = !o.local_k.empty();

  const TwistResult result = twist_pipeline(data.tensor, config, o.kbar, o.local_k.empty() ? std::vector<int>{1} : o.local_k,
                                            options);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  const std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  write_label_file(dir / "global_labels.tsv", data.node_ids, result.global);
  write_label_file(dir / "layer_labels.tsv", data.layer_names, result.layers);
  for (std::size_t j = 0; j < result.locals.size(); ++j)
    if (result.locals[j])
      write_label_file(dir / ("local_labels_" + std::to_string(j + 1) + ".tsv"), data.node_ids, *result.locals[j]);
  {
    auto file = open_output(dir / "embedding_U.tsv");
    write_embedding(file, data.node_ids, result.embedding.U.matrix());
  }
  {
    auto file = open_output(dir / "embedding_W.tsv");
    write_embedding(file, data.layer_names, result.embedding.W.matrix());
  }

  const auto n = data.tensor.dim(1);
  const auto L = data.tensor.dim(3);
  if (g.format == "json") {
    out << nlohmann::json{{"nodes", n},
                          {"layers", L},
                          {"iterations", result.embedding.iterations_run},
                          {"delta1", result.deltas.delta1},
                          {"delta2", result.deltas.delta2}}
               .dump()
        << '\n';
  } else {
    out << "nodes,layers,iterations,delta1,delta2\n"
        << n << ',' << L << ',' << result.embedding.iterations_run << ',' << format_real(result.deltas.delta1) << ','
        << format_real(result.deltas.delta2) << '\n';
  }
  return kExitOk;
}

// ---- eval ----

struct EvalOptions {
  std::string estimate;
  std::string truth;
};

int run_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out) {
  const LabelFile est = load_labels(o.estimate);
  const LabelFile truth = load_labels(o.truth);

  std::map<std::string, int> truth_by_id;
  for (std::size_t i = 0; i < truth.ids.size(); ++i)
    if (!truth_by_id.emplace(truth.ids[i], truth.labels[i]).second)
      throw DataError("duplicate id '" + truth.ids[i] + "' in " + o.truth);
  if (est.ids.size() != truth.ids.size())
    throw DataError("label files cover different items (" + std::to_string(est.ids.size()) + " vs " +
                    std::to_string(truth.ids.size()) + ")");

  std::vector<int> a;
  std::vector<int> b;
  std::map<std::string, bool> seen;
  for (std::size_t i = 0; i < est.ids.size(); ++i) {
    const auto it = truth_by_id.find(est.ids[i]);
    if (it == truth_by_id.end()) throw DataError("id '" + est.ids[i] + "' is missing from " + o.truth);
    if (seen[est.ids[i]]) throw DataError("duplicate id '" + est.ids[i] + "' in " + o.estimate);
    seen[est.ids[i]] = true;
    a.push_back(est.labels[i] - 1);
    b.push_back(it->second - 1);
  }
  if (a.empty()) throw DataError("label files are empty");

  const Misclustering mc = misclustering(Partition::from_labels(a), Partition::from_labels(b));
  if (g.format == "json") {
    out << nlohmann::json{{"misclustered", mc.count}, {"rate", mc.rate}, {"items", a.size()}}.dump() << '\n';
  } else {
    out << "misclustered,rate,items\n" << mc.count << ',' << format_real(mc.rate) << ',' << a.size() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community detection on mixture multi-layer networks"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides config files)");
  app.add_option("--threads", g.threads, "Worker threads for simulations")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation sweep and emit a results table");
  simulate->add_option("--config", sim.config, "Experiment config file")->required();
  simulate->add_option("--out", sim.out, "Output file (default: stdout)");
  simulate->add_flag("--fast", sim.fast, "Use 20 replicates per point");

  SampleOptions smp;
  auto* sample = app.add_subcommand("sample", "Sample a planted MMSBM instance as an edge list");
  sample->add_option("--config", smp.config, "Model config file (n, L, m, K, d, alpha, seed, self_loops)")->required();
  sample->add_option("--out", smp.out, "Edge-list file to write")->required();
  sample->add_option("--truth-dir", smp.truth_dir, "Directory for ground-truth label files");

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit the pipeline to a layered edge list");
  fit->add_option("--input", fo.input, "Layered edge-list file")->required();
  fit->add_option("--rank-r", fo.rank_r, "Node-factor rank r")->required()->check(CLI::PositiveNumber);
  fit->add_option("--rank-m", fo.rank_m, "Number of layer classes m")->required()->check(CLI::PositiveNumber);
  fit->add_option("--kbar", fo.kbar, "Number of global communities")->required()->check(CLI::PositiveNumber);
  fit->add_option("--local-k", fo.local_k, "Local community counts (one, or one per class)")->delimiter(',');
  fit->add_option("--weight-min", fo.weight_min, "Drop edges lighter than this")->check(CLI::NonNegativeNumber);
  fit->add_option("--min-component", fo.min_component, "Drop layers whose largest component is smaller")
      ->check(CLI::NonNegativeNumber);
  fit->add_flag("--intersect", fo.intersect, "Keep only nodes in every layer's largest component");
  fit->add_option("--layer-method", fo.layer_method, "Layer clustering")->check(CLI::IsMember({"kmeans", "supnorm"}));
  fit->add_option("--warm-start", fo.warm_start, "Initialization")->check(CLI::IsMember({"layer-sum", "hosvd", "best"}));
  fit->add_option("--iter-max", fo.iter_max, "Power iterations")->check(CLI::PositiveNumber);
  fit->add_option("--delta1", fo.delta1, "Row-norm cap for U (default: data-driven)");
  fit->add_option("--delta2", fo.delta2, "Row-norm cap for W (default: data-driven)");
  fit->add_option("--epsilon0", fo.epsilon0, "Initial sup-norm clustering threshold");
  fit->add_option("--out-dir", fo.out_dir, "Directory for label and embedding files")->required();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Misclustering rate between two label files");
  eval->add_option("--estimate", ev.estimate, "Estimated labels")->required();
  eval->add_option("--truth", ev.truth, "True labels")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*simulate) return run_simulate(g, sim, out, err);
    if (*sample) return run_sample(g, smp, out);
    if (*fit) return run_fit(g, fo, out, err);
    if (*eval) return run_eval(g, ev, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace twist
