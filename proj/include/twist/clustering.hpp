#pragma once

#include <cstdint>
#include <vector>

#include "twist/errors.hpp"
#include "twist/tensor.hpp"

namespace twist {

/// A labelling of N items into K clusters. Labels are 0-based in memory and
/// written 1-based by the file writers.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<int> labels, int k);

  /// Builds a partition from arbitrary non-negative labels, renumbering them in
  /// order of first appearance.
  static Partition from_labels(const std::vector<int>& labels);

  [[nodiscard]] const std::vector<int>& labels() const { return labels_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return labels_[i]; }

  /// Same partition with labels renumbered in order of first appearance.
  [[nodiscard]] Partition canonical() const { return from_labels(labels_); }

  /// Number of items carrying each label.
  [[nodiscard]] std::vector<std::size_t> cluster_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

struct KmeansConfig {
  int restarts = 20;
  int max_iters = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct KmeansResult {
  Partition partition;
  MatrixXd centers;                // k x dim
  double wcss = 0.0;               // within-cluster sum of squares of the best run
  std::vector<double> wcss_trace;  // per Lloyd iteration of the best run
  bool fewer_clusters = false;     // fewer distinct points than requested clusters
};

/// Lloyd's algorithm on the rows of `points`, k-means++ seeding, best of
/// `restarts` runs by WCSS. Restart i draws from its own substream of `seed`.
KmeansResult kmeans(const MatrixXd& points, int k, const KmeansConfig& config = {});

/// Algorithm-2 failure: no epsilon in the search produced exactly m clusters.
class ClusterCountError : public NumericalError {
 public:
  ClusterCountError(const std::string& what, int closest_k)
      : NumericalError(what), closest_k_(closest_k) {}
  [[nodiscard]] int closest_k() const { return closest_k_; }

 private:
  int closest_k_;
};

struct SupnormResult {
  Partition partition;
  double epsilon = 0.0;  // threshold of the accepted pass
  int passes = 0;
};

/// One greedy screening pass over the rows of w with threshold epsilon.
Partition supnorm_pass(const MatrixXd& w, double epsilon);

/// Network clustering by row screening. Rows are visited in order; each joins
/// the cluster of its nearest representative unless that Euclidean distance
/// exceeds epsilon, in which case it opens a new cluster and becomes its
/// representative. Epsilon is doubled while too many clusters appear and
/// halved while too few do; once both sides have been seen the search bisects
/// between them. At most 64 passes.
SupnormResult supnorm_cluster(const MatrixXd& w, int m, double epsilon0);

struct Misclustering {
  std::size_t count = 0;
  double rate = 0.0;
};

/// Hamming error minimized over label permutations. Exhaustive search when
/// both partitions have at most 8 clusters, Hungarian assignment otherwise.
Misclustering misclustering(const Partition& est, const Partition& truth);

/// Maximum-weight perfect matching on a square weight matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const MatrixXd& weights);

}  // namespace twist
