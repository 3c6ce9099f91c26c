#include "twist/twist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twist {

namespace {
constexpr double kRegularizedRankFloor = 1e-12;
}

void TwistConfig::validate(Eigen::Index n, Eigen::Index L) const {
  if (m < 1 || r < m || r > n) throw ContractViolation("TwistConfig: ranks must satisfy 1 <= m <= r <= n");
  if (m > L) throw ContractViolation("TwistConfig: m must not exceed the number of layers");
  if (iter_max < 1) throw ContractViolation("TwistConfig: iter_max must be >= 1");
  if (tol < 0.0) throw ContractViolation("TwistConfig: tol must be >= 0");
  if ((delta1 && !(*delta1 > 0.0)) || (delta2 && !(*delta2 > 0.0)))
    throw ContractViolation("TwistConfig: regularization parameters must be positive");
}

Regularized regularize_with_stats(const Factor& u, double delta) {
  if (!(delta > 0.0)) throw ContractViolation("regularize: delta must be positive");
  MatrixXd shrunk = u.matrix();
  for (Eigen::Index i = 0; i < shrunk.rows(); ++i) {
    const double norm = shrunk.row(i).norm();
    if (norm > delta) shrunk.row(i) *= delta / norm;
  }
  const double truncated = shrunk.rows() == 0 ? 0.0 : shrunk.rowwise().norm().maxCoeff();
  auto svd = left_singular(shrunk, u.cols());
  if (svd.values(u.cols() - 1) < kRegularizedRankFloor) {
    std::ostringstream msg;
    msg << "regularize: delta = " << delta << " is too small, the truncated factor lost rank";
    throw NumericalError(msg.str());
  }
  const double sigma_min = svd.values(u.cols() - 1);
  return {Factor(std::move(svd.vectors)), truncated, sigma_min};
}

Factor regularize(const Factor& u, double delta) { return regularize_with_stats(u, delta).factor; }

Deltas auto_deltas(const Tensor3d& a, Eigen::Index r, Eigen::Index m) {
  const auto [n1, n2, n3] = a.dims();
  const VectorXd degrees = Eigen::Map<const MatrixXd>(a.data(), n1, n2 * n3).rowwise().sum();
  const VectorXd volumes = a.as_slice_columns().colwise().sum().transpose();
  const double degree_norm = degrees.norm();
  const double volume_norm = volumes.norm();
  if (!(degree_norm > 0.0) || !(volume_norm > 0.0)) throw DataError("auto_deltas: adjacency tensor is all zero");
  return {2.0 * std::sqrt(static_cast<double>(r)) * degrees.maxCoeff() / degree_norm,
          2.0 * std::sqrt(static_cast<double>(m)) * volumes.maxCoeff() / volume_norm};
}

Deltas resolve_deltas(const Tensor3d& a, const TwistConfig& config) {
  if (config.delta1 && config.delta2) return {*config.delta1, *config.delta2};
  Deltas out = auto_deltas(a, config.r, config.m);
  if (config.delta1) out.delta1 = *config.delta1;
  if (config.delta2) out.delta2 = *config.delta2;
  return out;
}

Factor warm_init_U(const Tensor3d& a, Eigen::Index r) {
  if (a.dims()[0] != a.dims()[1]) throw ContractViolation("warm_init_U: slices must be square");
  return top_eigenvectors_by_magnitude(slice_sum(a), r);
}

Factor hosvd_init(const Tensor3d& a, int mode, Eigen::Index rank) {
  const auto [n1, n2, n3] = a.dims();
  switch (Tensor3d::check_mode(mode)) {
    case 1:
      return top_left_singular_vectors(Eigen::Map<const MatrixXd>(a.data(), n1, n2 * n3), rank);
    case 3:
      return top_left_singular_vectors(a.as_slice_columns().transpose(), rank);
    default:
      return top_left_singular_vectors(unfold(a, 2), rank);
  }
}

Factor warm_init_W(const Tensor3d& a, const Factor& u0, Eigen::Index m, double delta1) {
  if (m < 1 || m > u0.cols()) throw ContractViolation("warm_init_W: m must lie in [1, r]");
  const Factor u = regularize(u0, delta1);
  const MatrixXd ut = u.matrix().transpose();
  return top_left_singular_vectors(unfold(mode_product(mode_product(a, ut, 1), ut, 2), 3), m);
}

EmbeddingPair power_iterate(const Tensor3d& a, const TwistConfig& config, const Factor& u0, const Factor& w0) {
  const auto [n1, n2, n3] = a.dims();
  if (n1 != n2) throw ContractViolation("power_iterate: slices must be square");
  config.validate(n1, n3);
  if (!config.delta1 || !config.delta2) throw ContractViolation("power_iterate: deltas must be resolved");
  if (u0.rows() != n1 || u0.cols() != config.r || w0.rows() != n3 || w0.cols() != config.m)
    throw ContractViolation("power_iterate: initial factors do not match the tensor and ranks");

  EmbeddingPair out{u0, w0, 0, {}};
  for (int it = 0; it < config.iter_max; ++it) {
    const Regularized ru = regularize_with_stats(out.U, *config.delta1);
    const Regularized rw = regularize_with_stats(out.W, *config.delta2);
    const MatrixXd ut = ru.factor.matrix().transpose();
    const MatrixXd wt = rw.factor.matrix().transpose();

    Factor next_u = top_left_singular_vectors(unfold(mode_product(mode_product(a, wt, 3), ut, 2), 1), config.r);
    Factor next_w = top_left_singular_vectors(unfold(mode_product(mode_product(a, ut, 1), ut, 2), 3), config.m);

    IterationRecord rec;
    rec.dist_u = subspace_distance(next_u, out.U);
    rec.dist_w = subspace_distance(next_w, out.W);
    rec.delta1 = *config.delta1;
    rec.delta2 = *config.delta2;
    rec.truncated_row_norm_u = ru.truncated_max_row_norm;
    rec.truncated_row_norm_w = rw.truncated_max_row_norm;
    rec.regularized_row_norm_u = ru.factor.max_row_norm();
    rec.regularized_row_norm_w = rw.factor.max_row_norm();
    rec.orthonormality_u = orthonormality_error(next_u.matrix());
    rec.orthonormality_w = orthonormality_error(next_w.matrix());
    out.trace.push_back(rec);

    out.U = std::move(next_u);
    out.W = std::move(next_w);
    out.iterations_run = it + 1;
    if (rec.dist_u < config.tol && rec.dist_w < config.tol) break;
  }
  return out;
}

double tucker_objective(const Tensor3d& a, const Factor& u, const Factor& w) {
  const MatrixXd ut = u.matrix().transpose();
  const Tensor3d core = mode_product(mode_product(mode_product(a, ut, 1), ut, 2), w.matrix().transpose(), 3);
  return Eigen::Map<const VectorXd>(core.values().data(), static_cast<Eigen::Index>(core.values().size())).norm();
}

double default_epsilon0(Eigen::Index L, Eigen::Index m) {
  return std::min(0.5, std::sqrt(static_cast<double>(m) / (2.0 * static_cast<double>(L))));
}

Partition spectral_clustering(const MatrixXd& symmetric, int k, const KmeansConfig& config) {
  const Factor v = top_eigenvectors_by_magnitude(symmetric, k);
  return kmeans(v.matrix(), k, config).partition;
}

TwistResult twist_pipeline(const Tensor3d& a, const TwistConfig& config, int kbar, const std::vector<int>& local_k,
                           const PipelineOptions& options) {
  const auto [n, n2, L] = a.dims();
  if (n != n2) throw ContractViolation("twist_pipeline: slices must be square");
  config.validate(n, L);
  if (kbar < 1 || kbar > n) throw ContractViolation("twist_pipeline: Kbar must lie in [1, n]");
  if (local_k.empty()) throw ContractViolation("twist_pipeline: local community counts are required");

  TwistResult out;
  out.deltas = resolve_deltas(a, config);
  TwistConfig resolved = config;
  resolved.delta1 = out.deltas.delta1;
  resolved.delta2 = out.deltas.delta2;

  // Step 1: warm start and regularized power iterations
  const auto iterate_from = [&](WarmStart start) {
    const Factor u0 = start == WarmStart::kHosvd ? hosvd_init(a, 1, config.r) : warm_init_U(a, config.r);
    const Factor w0 = warm_init_W(a, u0, config.m, out.deltas.delta1);
    return power_iterate(a, resolved, u0, w0);
  };
  if (config.warm_start == WarmStart::kBest) {
    // a layer-sum start loses a direction when some class has few layers;
    // the iterates from that start then capture visibly less of the tensor
    EmbeddingPair from_sum = iterate_from(WarmStart::kLayerSum);
    EmbeddingPair from_hosvd = iterate_from(WarmStart::kHosvd);
    const double sum_obj = tucker_objective(a, from_sum.U, from_sum.W);
    const double hosvd_obj = tucker_objective(a, from_hosvd.U, from_hosvd.W);
    if (hosvd_obj > sum_obj * (1.0 + 1e-9)) {
      out.embedding = std::move(from_hosvd);
      out.warm_start_used = WarmStart::kHosvd;
    } else {
      out.embedding = std::move(from_sum);
    }
  } else {
    out.embedding = iterate_from(config.warm_start);
    out.warm_start_used = config.warm_start;
  }

  // Step 2: global communities
  const KmeansResult global = kmeans(out.embedding.U.matrix(), kbar, options.kmeans);
  if (global.fewer_clusters) out.warnings.push_back("global K-means found fewer distinct rows than Kbar");
  out.global = global.partition;

  // Step 3: layer classes
  const int m = static_cast<int>(config.m);
  if (options.layer_method == LayerClusterMethod::kSupnorm) {
    const double eps0 = options.epsilon0.value_or(default_epsilon0(L, config.m));
    out.layers = supnorm_cluster(out.embedding.W.matrix(), m, eps0).partition;
  } else {
    const KmeansResult layers = kmeans(out.embedding.W.matrix(), m, options.kmeans);
    if (layers.fewer_clusters) out.warnings.push_back("layer K-means found fewer distinct rows than m");
    out.layers = layers.partition;
  }

  // Step 4: local communities from the summed layers of each class
  if (local_k.size() != 1 && local_k.size() != static_cast<std::size_t>(m))
    throw ContractViolation("twist_pipeline: give one local community count per class, or a single count");
  out.locals.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m && options.local_communities; ++j) {
    const int kj = local_k.size() == 1 ? local_k.front() : local_k[static_cast<std::size_t>(j)];
    MatrixXd sum = MatrixXd::Zero(n, n);
    int members = 0;
    for (Eigen::Index l = 0; l < L; ++l)
      if (out.layers[static_cast<std::size_t>(l)] == j) {
        sum += a.slice(l);
        ++members;
      }
    if (members == 0) {
      out.warnings.push_back("layer class " + std::to_string(j + 1) + " received no layers; its local partition is empty");
      continue;
    }
    if (kj < 1 || kj > n) throw ContractViolation("twist_pipeline: local community count out of range");
    out.locals[static_cast<std::size_t>(j)] = spectral_clustering(sum, kj, options.kmeans);
  }
  return out;
}

}  // namespace twist
