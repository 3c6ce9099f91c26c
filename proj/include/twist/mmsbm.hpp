#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twist/clustering.hpp"
#include "twist/linalg.hpp"
#include "twist/tensor.hpp"

namespace twist {

/// Mixture of m stochastic block models over a shared set of n nodes.
///
/// Class j assigns node i to local community memberships[j][i] in [0, K_j)
/// and connects communities a, b with probability B[j](a, b). Layers pick
/// class j with probability pi[j].
struct MmsbmParams {
  Eigen::Index n = 0;
  std::vector<int> K;                          // communities per class
  std::vector<std::vector<int>> memberships;   // [class][node] -> community
  std::vector<MatrixXd> B;                     // [class] K_j x K_j, symmetric, entries in [0, 1]
  std::vector<double> pi;                      // mixture weights

  [[nodiscard]] int m() const { return static_cast<int>(K.size()); }
  /// One-hot membership matrix Z_j (n x K_j).
  [[nodiscard]] MatrixXd Z(int j) const;
  /// Z_j B_j Z_j^T, the expected slice of a class-j layer (diagonal included).
  [[nodiscard]] MatrixXd expected_slice(int j) const;
  /// Throws ParameterError if any invariant fails.
  void validate() const;
};

struct LayerLabels {
  std::vector<int> labels;  // [layer] -> class in [0, m)
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(labels.size()); }
};

/// Planted-partition MMSBM: every class shares B = p I + q (11^T - I) with
/// q = alpha p, and p solves d = (n/K) p + n (K-1) q / K. Memberships are drawn
/// uniformly over the K communities, independently per class; pi is uniform.
MmsbmParams planted_params(Eigen::Index n, int m, int K, double avg_degree, double out_in_ratio,
                           std::uint64_t seed);

/// Within-community probability p implied by the average degree.
double planted_p(Eigen::Index n, int K, double avg_degree, double out_in_ratio);

LayerLabels sample_labels(const MmsbmParams& params, Eigen::Index L, std::uint64_t seed);

/// Symmetric Bernoulli adjacency tensor. Each layer draws from its own
/// substream of `seed`, so layers are reproducible independently of each other.
/// The diagonal is zero unless `self_loops` is set.
Tensor3d sample_tensor(const MmsbmParams& params, const LayerLabels& labels, std::uint64_t seed,
                       bool self_loops = false);

/// Expected tensor and its Tucker factorization for the classes that occur in
/// `labels`. Classes without any layer are dropped (see `warnings`).
struct OracleDecomposition {
  Tensor3d expected_tensor;     // n x n x L
  MatrixXd Zbar;                // n x (sum of K_j over present classes)
  Factor Ubar;                  // n x r
  Factor Wbar;                  // L x m'
  Tensor3d core;                // r x r x m'
  VectorXd Dbar;                // singular values of Zbar, length r
  MatrixXd Rbar;                // right singular vectors of Zbar, Kring x r
  std::vector<int> classes;     // original indices of the present classes
  std::vector<Eigen::Index> layer_counts;  // L_j for present classes
  double sigma_min_core = 0.0;
  double sigma_min_bbar = 0.0;  // signal strength of B x1 Rbar^T x2 Rbar^T
  double p_max = 0.0;           // largest entry of the expected tensor
  double delta1 = 0.0;          // max row norm of Ubar
  double delta2 = 0.0;          // max row norm of Wbar
  Eigen::Index r = 0;
  std::vector<std::string> warnings;

  [[nodiscard]] double kappa0() const { return Dbar(0) / Dbar(Dbar.size() - 1); }
};

OracleDecomposition oracle_decomposition(const MmsbmParams& params, const LayerLabels& labels);

/// Block-diagonal probability tensor with slice j = diag(0, ..., B_j, ..., 0),
/// restricted to the listed classes.
Tensor3d probability_tensor(const MmsbmParams& params, const std::vector<int>& classes);

/// One-hot layer-label matrix W (L x m).
MatrixXd label_matrix(const LayerLabels& labels, int m);

/// min over modes of the smallest nominal singular value of each unfolding,
/// using `ranks` as the Tucker ranks.
double signal_strength(const Tensor3d& t, const std::array<Eigen::Index, 3>& ranks);

/// Numerical rank of the full global membership matrix (Z_1 ... Z_m).
Eigen::Index membership_rank(const MmsbmParams& params);

/// Nodes share a global community iff they share a local community in every class.
Partition global_membership(const MmsbmParams& params);
Partition local_membership(const MmsbmParams& params, int j);
Partition layer_partition(const LayerLabels& labels);

}  // namespace twist
