#include "twist/mmsbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "twist/random.hpp"

namespace twist {

namespace {
constexpr double kRankCutoff = 1e-10;
constexpr double kRankAmbiguityFloor = 1e-12;
}  // namespace

MatrixXd MmsbmParams::Z(int j) const {
  MatrixXd z = MatrixXd::Zero(n, K.at(static_cast<std::size_t>(j)));
  const auto& member = memberships.at(static_cast<std::size_t>(j));
  for (Eigen::Index i = 0; i < n; ++i) z(i, member[static_cast<std::size_t>(i)]) = 1.0;
  return z;
}

MatrixXd MmsbmParams::expected_slice(int j) const {
  const MatrixXd z = Z(j);
  return z * B.at(static_cast<std::size_t>(j)) * z.transpose();
}

void MmsbmParams::validate() const {
  const std::size_t classes = K.size();
  if (classes == 0) throw ParameterError("MMSBM needs at least one class");
  if (memberships.size() != classes || B.size() != classes || pi.size() != classes)
    throw ParameterError("MMSBM: K, memberships, B and pi must all have one entry per class");
  if (n < 1) throw ParameterError("MMSBM: n must be >= 1");
  for (std::size_t j = 0; j < classes; ++j) {
    if (K[j] < 1) throw ParameterError("MMSBM: every class needs at least one community");
    if (memberships[j].size() != static_cast<std::size_t>(n))
      throw ParameterError("MMSBM: membership vector length must equal n");
    for (int c : memberships[j])
      if (c < 0 || c >= K[j]) throw ParameterError("MMSBM: community index out of range");
    const MatrixXd& b = B[j];
    if (b.rows() != K[j] || b.cols() != K[j]) throw ParameterError("MMSBM: B_j must be K_j x K_j");
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ParameterError("MMSBM: B_j must be symmetric");
    if (b.minCoeff() < 0.0 || b.maxCoeff() > 1.0) throw ParameterError("MMSBM: B_j entries must lie in [0, 1]");
    if (pi[j] < 0.0 || pi[j] > 1.0) throw ParameterError("MMSBM: pi entries must lie in [0, 1]");
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("MMSBM: pi must sum to 1");
}

double planted_p(Eigen::Index n, int K, double avg_degree, double out_in_ratio) {
  if (n < 1 || K < 1) throw ParameterError("planted_params: n and K must be positive");
  if (out_in_ratio < 0.0 || out_in_ratio > 1.0) throw ParameterError("planted_params: out-in ratio must lie in [0, 1]");
  if (avg_degree < 0.0) throw ParameterError("planted_params: average degree must be non-negative");
  const double spread = 1.0 + (K - 1) * out_in_ratio;
  const double p = avg_degree * K / (static_cast<double>(n) * spread);
  if (p > 1.0) {
    std::ostringstream msg;
    msg << "planted_params: average degree " << avg_degree << " needs p = " << p
        << " > 1; the largest feasible average degree is " << static_cast<double>(n) * spread / K;
    throw ParameterError(msg.str());
  }
  return p;
}

MmsbmParams planted_params(Eigen::Index n, int m, int K, double avg_degree, double out_in_ratio,
                           std::uint64_t seed) {
  if (m < 1) throw ParameterError("planted_params: m must be >= 1");
  const double p = planted_p(n, K, avg_degree, out_in_ratio);
  const double q = out_in_ratio * p;

  MatrixXd b = MatrixXd::Constant(K, K, q);
  b.diagonal().setConstant(p);

  MmsbmParams params;
  params.n = n;
  params.K.assign(static_cast<std::size_t>(m), K);
  params.B.assign(static_cast<std::size_t>(m), b);
  params.pi.assign(static_cast<std::size_t>(m), 1.0 / m);
  for (int j = 0; j < m; ++j) {
    Rng rng(seed, {key(Stream::kMembership), static_cast<std::uint64_t>(j)});
    std::vector<int> member(static_cast<std::size_t>(n));
    for (auto& c : member) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    params.memberships.push_back(std::move(member));
  }
  return params;
}

LayerLabels sample_labels(const MmsbmParams& params, Eigen::Index L, std::uint64_t seed) {
  params.validate();
  if (L < 1) throw ParameterError("sample_labels: L must be >= 1");
  Rng rng(seed, {key(Stream::kLayerLabels)});
  LayerLabels out;
  out.labels.reserve(static_cast<std::size_t>(L));
  for (Eigen::Index l = 0; l < L; ++l) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    int pick = -1;
    for (int j = 0; j < params.m(); ++j) {
      cumulative += params.pi[static_cast<std::size_t>(j)];
      if (u < cumulative && params.pi[static_cast<std::size_t>(j)] > 0.0) {
        pick = j;
        break;
      }
    }
    if (pick < 0) {
      // u landed in the rounding slack above the cumulative sum
      for (int j = params.m() - 1; j >= 0; --j)
        if (params.pi[static_cast<std::size_t>(j)] > 0.0) {
          pick = j;
          break;
        }
    }
    out.labels.push_back(pick);
  }
  return out;
}

Tensor3d sample_tensor(const MmsbmParams& params, const LayerLabels& labels, std::uint64_t seed, bool self_loops) {
  params.validate();
  const Eigen::Index n = params.n;
  const Eigen::Index L = labels.size();
  Tensor3d a(n, n, L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const int j = labels.labels[static_cast<std::size_t>(l)];
    if (j < 0 || j >= params.m()) throw ParameterError("sample_tensor: layer label out of range");
    const auto& member = params.memberships[static_cast<std::size_t>(j)];
    const MatrixXd& b = params.B[static_cast<std::size_t>(j)];
    Rng rng(seed, {key(Stream::kLayerEdges), static_cast<std::uint64_t>(l)});
    auto slice = a.slice(l);
    for (Eigen::Index i2 = 0; i2 < n; ++i2) {
      const int c2 = member[static_cast<std::size_t>(i2)];
      const Eigen::Index last = self_loops ? i2 + 1 : i2;
      for (Eigen::Index i1 = 0; i1 < last; ++i1) {
        const double p = b(member[static_cast<std::size_t>(i1)], c2);
        if (rng.uniform() < p) {
          slice(i1, i2) = 1.0;
          slice(i2, i1) = 1.0;
        }
      }
    }
  }
  return a;
}

Tensor3d probability_tensor(const MmsbmParams& params, const std::vector<int>& classes) {
  Eigen::Index total = 0;
  for (int j : classes) total += params.K.at(static_cast<std::size_t>(j));
  Tensor3d out(total, total, static_cast<Eigen::Index>(classes.size()));
  Eigen::Index offset = 0;
  for (std::size_t s = 0; s < classes.size(); ++s) {
    const int kj = params.K[static_cast<std::size_t>(classes[s])];
    out.slice(static_cast<Eigen::Index>(s)).block(offset, offset, kj, kj) = params.B[static_cast<std::size_t>(classes[s])];
    offset += kj;
  }
  return out;
}

MatrixXd label_matrix(const LayerLabels& labels, int m) {
  MatrixXd w = MatrixXd::Zero(labels.size(), m);
  for (Eigen::Index l = 0; l < labels.size(); ++l) {
    const int j = labels.labels[static_cast<std::size_t>(l)];
    if (j < 0 || j >= m) throw ParameterError("label_matrix: layer label out of range");
    w(l, j) = 1.0;
  }
  return w;
}

double signal_strength(const Tensor3d& t, const std::array<Eigen::Index, 3>& ranks) {
  double out = std::numeric_limits<double>::infinity();
  for (int mode = 1; mode <= 3; ++mode) {
    const MatrixXd unfolded = unfold(t, mode);
    Eigen::JacobiSVD<MatrixXd> svd(unfolded);
    const auto& sv = svd.singularValues();
    const Eigen::Index rank = ranks[static_cast<std::size_t>(mode - 1)];
    out = std::min(out, rank <= sv.size() ? sv(rank - 1) : 0.0);
  }
  return out;
}

OracleDecomposition oracle_decomposition(const MmsbmParams& params, const LayerLabels& labels) {
  params.validate();
  OracleDecomposition out;
  const int m = params.m();

  std::vector<Eigen::Index> counts(static_cast<std::size_t>(m), 0);
  for (int j : labels.labels) {
    if (j < 0 || j >= m) throw ParameterError("oracle_decomposition: layer label out of range");
    ++counts[static_cast<std::size_t>(j)];
  }
  std::vector<int> present_index(static_cast<std::size_t>(m), -1);
  for (int j = 0; j < m; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) {
      out.warnings.push_back("class " + std::to_string(j + 1) + " has no layers and is dropped from the oracle");
      continue;
    }
    present_index[static_cast<std::size_t>(j)] = static_cast<int>(out.classes.size());
    out.classes.push_back(j);
    out.layer_counts.push_back(counts[static_cast<std::size_t>(j)]);
  }
  if (out.classes.empty()) throw ParameterError("oracle_decomposition: no layers");
  const int present = static_cast<int>(out.classes.size());

  Eigen::Index kring = 0;
  for (int j : out.classes) kring += params.K[static_cast<std::size_t>(j)];
  out.Zbar.resize(params.n, kring);
  Eigen::Index offset = 0;
  for (int j : out.classes) {
    out.Zbar.middleCols(offset, params.K[static_cast<std::size_t>(j)]) = params.Z(j);
    offset += params.K[static_cast<std::size_t>(j)];
  }

  LayerLabels compact;
  compact.labels.reserve(labels.labels.size());
  for (int j : labels.labels) compact.labels.push_back(present_index[static_cast<std::size_t>(j)]);
  const MatrixXd w = label_matrix(compact, present);
  const Tensor3d b = probability_tensor(params, out.classes);
  out.expected_tensor = mode_product(mode_product(mode_product(b, out.Zbar, 1), out.Zbar, 2), w, 3);
  out.p_max = *std::max_element(out.expected_tensor.values().begin(), out.expected_tensor.values().end());

  Eigen::JacobiSVD<MatrixXd> svd(out.Zbar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double rel = sv(i) / sv(0);
    if (rel >= kRankCutoff) {
      ++r;
    } else if (rel >= kRankAmbiguityFloor) {
      throw NumericalError("oracle_decomposition: rank of the global membership matrix is numerically ambiguous");
    }
  }
  out.r = r;
  MatrixXd ubar = svd.matrixU().leftCols(r);
  // flip columns of U and R together so Zbar = U D R^T is preserved
  MatrixXd rbar = svd.matrixV().leftCols(r);
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::Index arg = 0;
    ubar.col(c).cwiseAbs().maxCoeff(&arg);
    if (ubar(arg, c) < 0) {
      ubar.col(c) *= -1.0;
      rbar.col(c) *= -1.0;
    }
  }
  out.Ubar = Factor(ubar);
  out.Rbar = rbar;
  out.Dbar = sv.head(r);

  VectorXd inv_sqrt(present), sqrt_counts(present);
  for (int s = 0; s < present; ++s) {
    sqrt_counts(s) = std::sqrt(static_cast<double>(out.layer_counts[static_cast<std::size_t>(s)]));
    inv_sqrt(s) = 1.0 / sqrt_counts(s);
  }
  out.Wbar = Factor(w * inv_sqrt.asDiagonal());

  const MatrixXd dr = out.Dbar.asDiagonal() * out.Rbar.transpose();
  out.core = mode_product(mode_product(mode_product(b, dr, 1), dr, 2), MatrixXd(sqrt_counts.asDiagonal()), 3);
  out.sigma_min_core = signal_strength(out.core, {r, r, present});
  const MatrixXd rt = out.Rbar.transpose();
  out.sigma_min_bbar = signal_strength(mode_product(mode_product(b, rt, 1), rt, 2), {r, r, present});

  out.delta1 = out.Ubar.max_row_norm();
  out.delta2 = out.Wbar.max_row_norm();
  return out;
}

Eigen::Index membership_rank(const MmsbmParams& params) {
  params.validate();
  Eigen::Index total = 0;
  for (int k : params.K) total += k;
  MatrixXd zbar(params.n, total);
  Eigen::Index offset = 0;
  for (int j = 0; j < params.m(); ++j) {
    zbar.middleCols(offset, params.K[static_cast<std::size_t>(j)]) = params.Z(j);
    offset += params.K[static_cast<std::size_t>(j)];
  }
  Eigen::JacobiSVD<MatrixXd> svd(zbar);
  const VectorXd& sv = svd.singularValues();
  return (sv.array() / sv(0) >= kRankCutoff).count();
}

Partition global_membership(const MmsbmParams& params) {
  params.validate();
  std::map<std::vector<int>, int> ids;
  std::vector<int> labels(static_cast<std::size_t>(params.n));
  std::vector<int> row(static_cast<std::size_t>(params.m()));
  for (Eigen::Index i = 0; i < params.n; ++i) {
    for (int j = 0; j < params.m(); ++j)
      row[static_cast<std::size_t>(j)] = params.memberships[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto [it, inserted] = ids.try_emplace(row, static_cast<int>(ids.size()));
    labels[static_cast<std::size_t>(i)] = it->second;
  }
  return Partition(std::move(labels), static_cast<int>(ids.size()));
}

Partition local_membership(const MmsbmParams& params, int j) {
  return Partition::from_labels(params.memberships.at(static_cast<std::size_t>(j)));
}

Partition layer_partition(const LayerLabels& labels) { return Partition::from_labels(labels.labels); }

}  // namespace twist
