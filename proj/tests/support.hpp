#pragma once

// Shared fixtures for the unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "twist/mmsbm.hpp"
#include "twist/random.hpp"
#include "twist/tensor.hpp"

namespace twist::testing {

inline Rng test_rng(std::uint64_t seed, std::uint64_t sub = 0) { return Rng(seed, {key(Stream::kTest), sub}); }

inline MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline MatrixXd random_orthogonal(Eigen::Index k, Rng& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(k, k, rng));
  return qr.householderQ() * MatrixXd::Identity(k, k);
}

inline Factor random_factor(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(rows, cols, rng));
  return Factor(qr.householderQ() * MatrixXd::Identity(rows, cols));
}

inline Tensor3d random_tensor(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3, Rng& rng) {
  std::normal_distribution<double> normal;
  Tensor3d t(n1, n2, n3);
  for (Eigen::Index k = 0; k < n3; ++k)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index i = 0; i < n1; ++i) t(i, j, k) = normal(rng);
  return t;
}

/// Plain triple-loop mode product, independent of the library's reshaping.
inline Tensor3d mode_product_oracle(const Tensor3d& t, const MatrixXd& m, int mode) {
  auto dims = t.dims();
  auto out_dims = dims;
  out_dims[static_cast<std::size_t>(mode - 1)] = m.rows();
  Tensor3d out(out_dims[0], out_dims[1], out_dims[2]);
  for (Eigen::Index a = 0; a < out_dims[0]; ++a)
    for (Eigen::Index b = 0; b < out_dims[1]; ++b)
      for (Eigen::Index c = 0; c < out_dims[2]; ++c) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < dims[static_cast<std::size_t>(mode - 1)]; ++i) {
          if (mode == 1) s += m(a, i) * t(i, b, c);
          if (mode == 2) s += m(b, i) * t(a, i, c);
          if (mode == 3) s += m(c, i) * t(a, b, i);
        }
        out(a, b, c) = s;
      }
  return out;
}

/// Expected tensor built slice by slice as Z_j B_j Z_j^T.
inline Tensor3d expected_by_slices(const MmsbmParams& params, const LayerLabels& labels) {
  Tensor3d t(params.n, params.n, labels.size());
  for (Eigen::Index l = 0; l < labels.size(); ++l)
    t.slice(l) = params.expected_slice(labels.labels[static_cast<std::size_t>(l)]);
  return t;
}

/// Balanced memberships: node i goes to community (i * K) / n, then shuffled.
inline std::vector<int> balanced_membership(Eigen::Index n, int K, Rng& rng) {
  std::vector<int> member(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) member[static_cast<std::size_t>(i)] = static_cast<int>(i * K / n);
  std::shuffle(member.begin(), member.end(), rng);
  return member;
}

/// Random symmetric B with entries in [0.05, 0.95] and a dominant diagonal,
/// so that it is comfortably nonsingular.
inline MatrixXd random_b(int K, Rng& rng) {
  MatrixXd b(K, K);
  for (int a = 0; a < K; ++a)
    for (int c = 0; c <= a; ++c) b(a, c) = b(c, a) = 0.05 + 0.3 * rng.uniform();
  for (int a = 0; a < K; ++a) b(a, a) = 0.6 + 0.35 * rng.uniform();
  return b;
}

/// Random MMSBM with balanced memberships; n in [nmin, nmax], m in [1, mmax], K_j in {2, 3}.
inline MmsbmParams random_params(Rng& rng, Eigen::Index nmin, Eigen::Index nmax, int mmax) {
  MmsbmParams p;
  p.n = nmin + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(nmax - nmin + 1)));
  const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(mmax)));
  for (int j = 0; j < m; ++j) {
    const int K = 2 + static_cast<int>(rng.below(2));
    p.K.push_back(K);
    p.memberships.push_back(balanced_membership(p.n, K, rng));
    p.B.push_back(random_b(K, rng));
    p.pi.push_back(1.0 / m);
  }
  return p;
}

/// Every class appears at least once: labels cycle 0..m-1 then shuffle.
inline LayerLabels covering_labels(int m, Eigen::Index L, Rng& rng) {
  LayerLabels out;
  for (Eigen::Index l = 0; l < L; ++l) out.labels.push_back(static_cast<int>(l % m));
  std::shuffle(out.labels.begin(), out.labels.end(), rng);
  return out;
}

/// The three-layer toy network with two classes: class A splits 30 nodes
/// 10/10/10, class B splits them 10/5/15, giving four global communities.
/// Layers 1 and 3 belong to class A, layer 2 to class B.
inline MmsbmParams toy_params() {
  MmsbmParams p;
  p.n = 30;
  p.K = {3, 3};
  std::vector<int> a(30);
  std::vector<int> b(30);
  for (int i = 0; i < 30; ++i) {
    a[static_cast<std::size_t>(i)] = i / 10;
    b[static_cast<std::size_t>(i)] = i < 10 ? 0 : (i < 15 ? 1 : 2);
  }
  p.memberships = {a, b};
  MatrixXd ba(3, 3);
  ba << 0.8, 0.1, 0.1, 0.1, 0.7, 0.1, 0.1, 0.1, 0.9;
  MatrixXd bb(3, 3);
  bb << 0.6, 0.2, 0.05, 0.2, 0.9, 0.1, 0.05, 0.1, 0.75;
  p.B = {ba, bb};
  p.pi = {2.0 / 3.0, 1.0 / 3.0};
  return p;
}

inline LayerLabels toy_labels() { return LayerLabels{{0, 1, 0}}; }

/// Two classes sharing one balanced two-community split: class 1 is
/// assortative (B = p I), class 2 disassortative (B = p (11^T - I)). With the
/// same number of layers in each class the summed layers have no community
/// signal at all, so the community structure lives only in the tensor.
inline MmsbmParams cancellation_params(Eigen::Index n, double avg_degree, Rng& rng) {
  const double p = 2.0 * avg_degree / static_cast<double>(n);
  MmsbmParams params;
  params.n = n;
  params.K = {2, 2};
  const auto member = balanced_membership(n, 2, rng);
  params.memberships = {member, member};
  MatrixXd assortative = p * MatrixXd::Identity(2, 2);
  MatrixXd disassortative(2, 2);
  disassortative << 0.0, p, p, 0.0;
  params.B = {assortative, disassortative};
  params.pi = {0.5, 0.5};
  return params;
}

inline LayerLabels alternating_labels(Eigen::Index L) {
  LayerLabels out;
  for (Eigen::Index l = 0; l < L; ++l) out.labels.push_back(static_cast<int>(l % 2));
  return out;
}

/// Applies node permutation perm (new index i holds old node perm[i]) to every slice.
inline Tensor3d permute_nodes(const Tensor3d& a, const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = a.dim(1);
  Tensor3d out(n, n, a.dim(3));
  for (Eigen::Index l = 0; l < a.dim(3); ++l)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        out(i, j, l) = a(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)], l);
  return out;
}

inline std::vector<Eigen::Index> random_permutation(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace twist::testing
