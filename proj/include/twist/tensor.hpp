#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "twist/errors.hpp"

namespace twist {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Dense order-3 array.
///
/// Element (i1, i2, i3) lives at linear offset i1 + n1*i2 + n1*n2*i3, so
/// frontal slices are contiguous column-major n1 x n2 blocks and the mode-1
/// unfolding is a plain reshape of the storage.
template <typename Scalar>
class Tensor3 {
 public:
  using Dims = std::array<Eigen::Index, 3>;
  using SliceMap = Eigen::Map<Matrix<Scalar>>;
  using ConstSliceMap = Eigen::Map<const Matrix<Scalar>>;

  Tensor3() : dims_{0, 0, 0} {}

  Tensor3(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3)
      : dims_{n1, n2, n3}, values_(static_cast<std::size_t>(n1 * n2 * n3), Scalar(0)) {
    if (n1 < 0 || n2 < 0 || n3 < 0) throw ContractViolation("Tensor3: negative dimension");
  }

  Tensor3(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3, std::vector<Scalar> values)
      : dims_{n1, n2, n3}, values_(std::move(values)) {
    if (n1 < 0 || n2 < 0 || n3 < 0) throw ContractViolation("Tensor3: negative dimension");
    if (values_.size() != static_cast<std::size_t>(n1 * n2 * n3))
      throw ContractViolation("Tensor3: value count does not match dimensions");
  }

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] Eigen::Index dim(int mode) const { return dims_[check_mode(mode) - 1]; }
  [[nodiscard]] Eigen::Index size() const { return dims_[0] * dims_[1] * dims_[2]; }

  [[nodiscard]] Scalar& operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3) {
    return values_[offset(i1, i2, i3)];
  }
  [[nodiscard]] Scalar operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3) const {
    return values_[offset(i1, i2, i3)];
  }

  [[nodiscard]] Scalar* data() { return values_.data(); }
  [[nodiscard]] const Scalar* data() const { return values_.data(); }
  [[nodiscard]] const std::vector<Scalar>& values() const { return values_; }

  /// Frontal slice l as an n1 x n2 view.
  [[nodiscard]] SliceMap slice(Eigen::Index l) {
    check_slice(l);
    return SliceMap(values_.data() + l * dims_[0] * dims_[1], dims_[0], dims_[1]);
  }
  [[nodiscard]] ConstSliceMap slice(Eigen::Index l) const {
    check_slice(l);
    return ConstSliceMap(values_.data() + l * dims_[0] * dims_[1], dims_[0], dims_[1]);
  }

  /// Storage viewed as (n1*n2) x n3; this is the transpose of the mode-3 unfolding.
  [[nodiscard]] ConstSliceMap as_slice_columns() const {
    return ConstSliceMap(values_.data(), dims_[0] * dims_[1], dims_[2]);
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.values_ == b.values_;
  }

  static int check_mode(int mode) {
    if (mode < 1 || mode > 3) throw ContractViolation("tensor mode must be 1, 2 or 3");
    return mode;
  }

 private:
  [[nodiscard]] std::size_t offset(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3) const {
    if (i1 < 0 || i1 >= dims_[0] || i2 < 0 || i2 >= dims_[1] || i3 < 0 || i3 >= dims_[2])
      throw ContractViolation("Tensor3: index out of range");
    return static_cast<std::size_t>(i1 + dims_[0] * (i2 + dims_[1] * i3));
  }
  void check_slice(Eigen::Index l) const {
    if (l < 0 || l >= dims_[2]) throw ContractViolation("Tensor3: slice index out of range");
  }

  Dims dims_;
  std::vector<Scalar> values_;
};

using Tensor3d = Tensor3<double>;

/// Mode-k matricization with Kolda-Bader column ordering.
///
/// mode 1: column i2 + n2*i3, mode 2: column i1 + n1*i3, mode 3: column i1 + n1*i2.
/// With this ordering unfold(G x1 A x2 B x3 C, 1) = A unfold(G,1) (C kron B)^T,
/// and cyclically (C kron A) for mode 2, (B kron A) for mode 3.
template <typename Scalar>
Matrix<Scalar> unfold(const Tensor3<Scalar>& t, int mode) {
  const auto [n1, n2, n3] = t.dims();
  switch (Tensor3<Scalar>::check_mode(mode)) {
    case 1:
      return Eigen::Map<const Matrix<Scalar>>(t.data(), n1, n2 * n3);
    case 2: {
      Matrix<Scalar> out(n2, n1 * n3);
      for (Eigen::Index i3 = 0; i3 < n3; ++i3)
        out.middleCols(n1 * i3, n1) = t.slice(i3).transpose();
      return out;
    }
    default:
      return t.as_slice_columns().transpose();
  }
}

/// Inverse of unfold: rebuilds a tensor of the given dims from its mode-k unfolding.
template <typename Scalar>
Tensor3<Scalar> fold(const Matrix<Scalar>& m, int mode, const typename Tensor3<Scalar>::Dims& dims) {
  const auto [n1, n2, n3] = dims;
  Tensor3<Scalar> t(n1, n2, n3);
  const int k = Tensor3<Scalar>::check_mode(mode);
  if (m.rows() != dims[k - 1] || m.cols() * m.rows() != n1 * n2 * n3)
    throw ContractViolation("fold: matrix shape does not match tensor dims");
  switch (k) {
    case 1:
      Eigen::Map<Matrix<Scalar>>(t.data(), n1, n2 * n3) = m;
      break;
    case 2:
      for (Eigen::Index i3 = 0; i3 < n3; ++i3) t.slice(i3) = m.middleCols(n1 * i3, n1).transpose();
      break;
    default:
      Eigen::Map<Matrix<Scalar>>(t.data(), n1 * n2, n3) = m.transpose();
  }
  return t;
}

/// t x_mode m: contracts mode `mode` of t against the columns of m.
template <typename Scalar, typename Derived>
Tensor3<Scalar> mode_product(const Tensor3<Scalar>& t, const Eigen::MatrixBase<Derived>& m, int mode) {
  const int k = Tensor3<Scalar>::check_mode(mode);
  const auto [n1, n2, n3] = t.dims();
  if (m.cols() != t.dims()[k - 1])
    throw ContractViolation("mode_product: matrix columns must equal the contracted dimension");
  const Eigen::Index rows = m.rows();
  switch (k) {
    case 1: {
      Tensor3<Scalar> out(rows, n2, n3);
      Eigen::Map<Matrix<Scalar>>(out.data(), rows, n2 * n3).noalias() =
          m * Eigen::Map<const Matrix<Scalar>>(t.data(), n1, n2 * n3);
      return out;
    }
    case 2: {
      Tensor3<Scalar> out(n1, rows, n3);
      for (Eigen::Index l = 0; l < n3; ++l) out.slice(l).noalias() = t.slice(l) * m.transpose();
      return out;
    }
    default: {
      Tensor3<Scalar> out(n1, n2, rows);
      Eigen::Map<Matrix<Scalar>>(out.data(), n1 * n2, rows).noalias() =
          t.as_slice_columns() * m.transpose();
      return out;
    }
  }
}

template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> kronecker(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  Matrix<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Sum of frontal slices, an n1 x n2 matrix.
template <typename Scalar>
Matrix<Scalar> slice_sum(const Tensor3<Scalar>& t) {
  Matrix<Scalar> out = Matrix<Scalar>::Zero(t.dims()[0], t.dims()[1]);
  for (Eigen::Index l = 0; l < t.dims()[2]; ++l) out += t.slice(l);
  return out;
}

template <typename Scalar>
Scalar max_abs_difference(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  if (a.dims() != b.dims()) throw ContractViolation("max_abs_difference: dims differ");
  Scalar out = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    out = std::max(out, std::abs(a.values()[i] - b.values()[i]));
  return out;
}

}  // namespace twist
