#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twist/io.hpp"
#include "twist/mmsbm.hpp"
#include "twist/twist.hpp"

namespace twist {

enum class Method { kTwist, kHosvdTucker, kSumAdj, kM3Sc };
enum class Metric { kGlobal, kLayer };
enum class SweepParam { kDegree, kAlpha, kLayers, kNodes };

std::string to_string(Method m);
std::string to_string(Metric m);
std::string to_string(SweepParam p);
Method parse_method(const std::string& s);
Metric parse_metric(const std::string& s);
SweepParam parse_sweep(const std::string& s);
std::string to_string(WarmStart w);
WarmStart parse_warm_start(const std::string& s);

/// Whether a method produces a given metric (Sum-Adj has no layer labels,
/// M3-SC no node communities).
bool produces(Method method, Metric metric);

struct ExperimentConfig {
  int simulation = 0;  // 1..8 for the built-in grids, 0 for custom
  Eigen::Index n = 600;
  Eigen::Index L = 20;
  int m = 3;
  int K = 2;
  double d = 10.0;
  std::optional<double> d_per_node;  // when set, d = d_per_node * n
  double alpha = 0.4;
  SweepParam sweep = SweepParam::kDegree;
  std::vector<double> values;
  int replicates = 100;
  std::uint64_t seed = 1;
  std::vector<Method> methods;
  std::vector<Metric> metrics;
  LayerClusterMethod layer_method = LayerClusterMethod::kKmeans;
  WarmStart warm_start = WarmStart::kBest;  // TWIST initialization
  int iter_max = 30;
  bool self_loops = false;

  void validate() const;
};

/// Built-in grids for the eight simulation studies.
ExperimentConfig simulation_preset(int id);

/// Reads an experiment from key-value text. A `simulation` key starts from
/// that preset; every other key overrides a field.
ExperimentConfig experiment_from_config(const KeyValueConfig& kv);

/// One sampled instance at a sweep point.
struct ReplicateResult {
  // indexed [method][metric]; empty when the method failed or does not apply
  std::vector<std::vector<std::optional<double>>> rates;
  std::vector<std::string> errors;
};

struct PointSettings {
  Eigen::Index n = 0;
  Eigen::Index L = 0;
  double d = 0.0;
  double alpha = 0.0;
};

PointSettings point_settings(const ExperimentConfig& cfg, double value);

ReplicateResult run_replicate(const ExperimentConfig& cfg, std::size_t point, std::size_t replicate);

struct ResultRow {
  std::string sweep_param;
  double value = 0.0;
  std::string method;
  std::string metric;
  std::optional<double> mean;    // empty when every replicate failed
  std::optional<double> std_error;
  int replicates = 0;            // successful replicates
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> errors;

  [[nodiscard]] const ResultRow* find(double value, Method method, Metric metric) const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (sweep point, replicate) task on a pool of `threads` workers.
/// Each task seeds itself from (seed, point, replicate), so the output does
/// not depend on the thread count or scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1, const ProgressFn& progress = {});

void write_csv(std::ostream& out, const ExperimentResult& result);
void write_json(std::ostream& out, const ExperimentResult& result);

}  // namespace twist
