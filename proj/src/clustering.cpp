#include "twist/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "twist/random.hpp"

namespace twist {

Partition::Partition(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw ContractViolation("Partition: cluster count must be >= 1");
  for (int label : labels_)
    if (label < 0 || label >= k_) throw ContractViolation("Partition: label out of range");
}

Partition Partition::from_labels(const std::vector<int>& labels) {
  std::unordered_map<int, int> rename;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = rename.try_emplace(label, static_cast<int>(rename.size()));
    out.push_back(it->second);
  }
  return Partition(std::move(out), std::max<int>(1, static_cast<int>(rename.size())));
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k_), 0);
  for (int label : labels_) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  MatrixXd centers;
  double wcss = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool fewer = false;
};

// k-means++: first center uniform, the rest with probability proportional to
// squared distance from the nearest chosen center.
std::vector<Eigen::Index> seed_plus_plus(const MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> chosen{static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))};
  VectorXd d2 = (x.rowwise() - x.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = d2.sum();
    if (!(total > 0.0)) break;
    double target = rng.uniform() * total;
    Eigen::Index pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      target -= d2(i);
      if (target < 0.0 && d2(i) > 0.0) {
        pick = i;
        break;
      }
    }
    if (d2(pick) <= 0.0) {
      // rounding pushed us past the end; take the last positive-mass point
      for (Eigen::Index i = n - 1; i >= 0; --i)
        if (d2(i) > 0.0) {
          pick = i;
          break;
        }
    }
    chosen.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return chosen;
}

double assign(const MatrixXd& x, const MatrixXd& centers, std::vector<int>& labels, VectorXd& dist) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (x.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    dist(i) = best;
    total += best;
  }
  return total;
}

LloydRun lloyd(const MatrixXd& x, int k, const KmeansConfig& cfg, Rng& rng) {
  LloydRun run;
  const auto seeds = seed_plus_plus(x, k, rng);
  const int kk = static_cast<int>(seeds.size());
  run.fewer = kk < k;
  run.centers.resize(kk, x.cols());
  for (int c = 0; c < kk; ++c) run.centers.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);

  run.labels.assign(static_cast<std::size_t>(x.rows()), 0);
  VectorXd dist(x.rows());
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double wcss = assign(x, run.centers, run.labels, dist);
    run.trace.push_back(wcss);
    run.wcss = wcss;
    if (previous - wcss <= cfg.tol * std::max(1.0, previous) && it > 0) break;
    previous = wcss;

    MatrixXd sums = MatrixXd::Zero(kk, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(kk), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < kk; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // empty cluster: move its center onto the worst-served point
        Eigen::Index far = 0;
        dist.maxCoeff(&far);
        run.centers.row(c) = x.row(far);
        dist(far) = 0.0;
      }
    }
  }
  return run;
}

}  // namespace

KmeansResult kmeans(const MatrixXd& points, int k, const KmeansConfig& config) {
  if (k < 1) throw ContractViolation("kmeans: k must be >= 1");
  if (k > points.rows()) throw ContractViolation("kmeans: more clusters than points");
  if (config.restarts < 1 || config.max_iters < 1) throw ContractViolation("kmeans: bad config");

  LloydRun best;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(config.seed, {key(Stream::kKmeans), static_cast<std::uint64_t>(r)});
    LloydRun run = lloyd(points, k, config, rng);
    if (run.wcss < best.wcss) best = std::move(run);
  }

  KmeansResult out;
  out.partition = Partition::from_labels(best.labels);
  // centers reordered to match the canonical labels
  out.centers.resize(out.partition.k(), points.cols());
  for (std::size_t i = 0; i < best.labels.size(); ++i)
    out.centers.row(out.partition[i]) = best.centers.row(best.labels[i]);
  out.wcss = best.wcss;
  out.wcss_trace = std::move(best.trace);
  out.fewer_clusters = best.fewer || out.partition.k() < k;
  return out;
}

Partition supnorm_pass(const MatrixXd& w, double epsilon) {
  const Eigen::Index rows = w.rows();
  if (rows == 0) throw ContractViolation("supnorm_pass: no rows");
  std::vector<int> labels(static_cast<std::size_t>(rows), 0);
  std::vector<Eigen::Index> reps{0};
  int k = 1;
  for (Eigen::Index l = 1; l < rows; ++l) {
    Eigen::Index nearest = reps.front();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j : reps) {
      const double d = (w.row(l) - w.row(j)).norm();
      if (d < best) {
        best = d;
        nearest = j;
      }
    }
    if (best > epsilon) {
      labels[static_cast<std::size_t>(l)] = k++;
      reps.push_back(l);
    } else {
      labels[static_cast<std::size_t>(l)] = labels[static_cast<std::size_t>(nearest)];
    }
  }
  return Partition(std::move(labels), k);
}

SupnormResult supnorm_cluster(const MatrixXd& w, int m, double epsilon0) {
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw ContractViolation("supnorm_cluster: epsilon0 must lie in (0, 1)");
  if (m < 1 || m > w.rows()) throw ContractViolation("supnorm_cluster: m out of range");

  constexpr int kMaxPasses = 64;
  double eps = epsilon0;
  double too_small = 0.0;  // largest epsilon seen giving k > m
  double too_large = std::numeric_limits<double>::infinity();  // smallest giving k < m
  int closest_k = 0;
  for (int pass = 1; pass <= kMaxPasses; ++pass) {
    Partition p = supnorm_pass(w, eps);
    if (closest_k == 0 || std::abs(p.k() - m) < std::abs(closest_k - m)) closest_k = p.k();
    if (p.k() == m) return {std::move(p), eps, pass};
    if (p.k() > m) {
      too_small = std::max(too_small, eps);
    } else {
      too_large = std::min(too_large, eps);
    }
    if (std::isinf(too_large)) {
      eps *= 2.0;
    } else if (too_small == 0.0) {
      eps /= 2.0;
    } else {
      eps = 0.5 * (too_small + too_large);
    }
  }
  throw ClusterCountError("supnorm_cluster: no threshold yields exactly " + std::to_string(m) +
                              " clusters (closest " + std::to_string(closest_k) + ")",
                          closest_k);
}

std::vector<int> max_weight_assignment(const MatrixXd& weights) {
  if (weights.rows() != weights.cols()) throw ContractViolation("max_weight_assignment: matrix must be square");
  const int n = static_cast<int>(weights.rows());
  if (n == 0) return {};
  const double top = weights.maxCoeff();
  // Shortest augmenting path Hungarian method on cost = top - weight, 1-based arrays.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = (top - weights(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return assignment;
}

Misclustering misclustering(const Partition& est, const Partition& truth) {
  if (est.size() != truth.size()) throw ContractViolation("misclustering: partitions differ in size");
  const int s = std::max(est.k(), truth.k());
  MatrixXd confusion = MatrixXd::Zero(s, s);
  for (std::size_t i = 0; i < est.size(); ++i) confusion(est[i], truth[i]) += 1.0;

  double matched = 0.0;
  if (s <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double total = 0.0;
      for (int i = 0; i < s; ++i) total += confusion(i, perm[static_cast<std::size_t>(i)]);
      matched = std::max(matched, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const auto assignment = max_weight_assignment(confusion);
    for (int i = 0; i < s; ++i) matched += confusion(i, assignment[static_cast<std::size_t>(i)]);
  }
  Misclustering out;
  out.count = est.size() - static_cast<std::size_t>(std::llround(matched));
  out.rate = est.size() == 0 ? 0.0 : static_cast<double>(out.count) / static_cast<double>(est.size());
  return out;
}

}  // namespace twist
