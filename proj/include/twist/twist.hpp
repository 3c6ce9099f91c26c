#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twist/clustering.hpp"
#include "twist/linalg.hpp"
#include "twist/tensor.hpp"

namespace twist {

enum class WarmStart {
  kLayerSum,  // top-r singular vectors of the summed layers
  kHosvd,     // top-r left singular vectors of the mode-1 unfolding
  kBest,      // iterate from both and keep the larger Tucker objective
};

enum class LayerClusterMethod { kKmeans, kSupnorm };

struct TwistConfig {
  Eigen::Index r = 1;                  // node-factor rank
  Eigen::Index m = 1;                  // layer-factor rank
  int iter_max = 30;
  std::optional<double> delta1;        // empty: data-driven choice
  std::optional<double> delta2;
  double tol = 1e-8;                   // early stop on successive subspace distance
  WarmStart warm_start = WarmStart::kLayerSum;

  void validate(Eigen::Index n, Eigen::Index L) const;
};

struct IterationRecord {
  double dist_u = 0.0;           // d(U^(t), U^(t-1))
  double dist_w = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double truncated_row_norm_u = 0.0;  // max row norm after truncation, before re-orthonormalizing
  double truncated_row_norm_w = 0.0;
  double regularized_row_norm_u = 0.0;  // max row norm of the regularized factor
  double regularized_row_norm_w = 0.0;
  double orthonormality_u = 0.0;  // max |U^T U - I| of the new iterate
  double orthonormality_w = 0.0;
};

struct EmbeddingPair {
  Factor U;  // n x r
  Factor W;  // L x m
  int iterations_run = 0;
  std::vector<IterationRecord> trace;
};

struct Regularized {
  Factor factor;
  double truncated_max_row_norm = 0.0;
  double truncated_sigma_min = 0.0;  // smallest singular value of the shrunken matrix
};

/// Shrinks every row of u to norm at most delta, then re-orthonormalizes by
/// taking the top left singular vectors of the shrunken matrix. Rows of the
/// result are bounded by delta / truncated_sigma_min, hence by sqrt(2) delta
/// whenever the truncation keeps sigma_min >= 1/sqrt(2) (delta at or above the
/// incoherence of a nearby factor).
Regularized regularize_with_stats(const Factor& u, double delta);
Factor regularize(const Factor& u, double delta);

struct Deltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// delta1 = 2 sqrt(r) max_i deg_i / ||deg||, delta2 = 2 sqrt(m) max_l neg_l / ||neg||
/// with node degrees deg_i = sum_{j,l} A(i,j,l) and layer volumes neg_l = sum_{i,j} A(i,j,l).
Deltas auto_deltas(const Tensor3d& a, Eigen::Index r, Eigen::Index m);

/// Resolves the data-driven deltas of a config.
Deltas resolve_deltas(const Tensor3d& a, const TwistConfig& config);

Factor warm_init_U(const Tensor3d& a, Eigen::Index r);
Factor hosvd_init(const Tensor3d& a, int mode, Eigen::Index rank);
Factor warm_init_W(const Tensor3d& a, const Factor& u0, Eigen::Index m, double delta1);

/// Regularized power iterations. Each sweep regularizes the previous iterates
/// and updates both factors from them (U and W do not see each other's update
/// within a sweep). Stops after iter_max sweeps or once both successive
/// subspace distances fall below tol. Config deltas must be set.
EmbeddingPair power_iterate(const Tensor3d& a, const TwistConfig& config, const Factor& u0, const Factor& w0);

/// ||A x1 U^T x2 U^T x3 W^T||_F, the quantity power iterations increase.
double tucker_objective(const Tensor3d& a, const Factor& u, const Factor& w);

struct TwistResult {
  Partition global;
  Partition layers;
  std::vector<std::optional<Partition>> locals;  // one per recovered layer class
  EmbeddingPair embedding;
  Deltas deltas;
  WarmStart warm_start_used = WarmStart::kLayerSum;
  std::vector<std::string> warnings;
};

struct PipelineOptions {
  LayerClusterMethod layer_method = LayerClusterMethod::kKmeans;
  std::optional<double> epsilon0;  // sup-norm threshold; empty: sqrt(m / (2L)) capped at 0.5
  KmeansConfig kmeans;
  bool local_communities = true;   // also recover per-class local communities
};

/// Full pipeline: warm start and power iterations, K-means on the rows of U
/// into kbar global communities, layer classes from the rows of W, then
/// spectral clustering of each class's summed layers into its local
/// communities. `local_k` holds one count per recovered class, or a single
/// count used for all of them.
TwistResult twist_pipeline(const Tensor3d& a, const TwistConfig& config, int kbar, const std::vector<int>& local_k,
                           const PipelineOptions& options = {});

/// Default sup-norm threshold for L layers and m classes.
double default_epsilon0(Eigen::Index L, Eigen::Index m);

/// Top-k eigenvectors (by |eigenvalue|) of a symmetric matrix, rows clustered by K-means.
Partition spectral_clustering(const MatrixXd& symmetric, int k, const KmeansConfig& config);

}  // namespace twist
