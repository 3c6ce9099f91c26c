#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "twist/errors.hpp"
#include "twist/tensor.hpp"

namespace twist {

template <typename Scalar>
constexpr Scalar orthonormality_tolerance() {
  if constexpr (sizeof(Scalar) >= 8) return Scalar(1e-10);
  return Scalar(1e-4);
}

/// Largest entry of |M^T M - I|.
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.cols() == 0) return Scalar(0);
  const Matrix<Scalar> gram = m.transpose() * m;
  return (gram - Matrix<Scalar>::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

/// A tall matrix with orthonormal columns; the invariant is checked on construction.
template <typename Scalar>
class OrthonormalFactor {
 public:
  OrthonormalFactor() = default;

  explicit OrthonormalFactor(Matrix<Scalar> m) : m_(std::move(m)) {
    if (m_.rows() < m_.cols()) throw ContractViolation("OrthonormalFactor: rows must be >= cols");
    if (orthonormality_error(m_) > orthonormality_tolerance<Scalar>())
      throw ContractViolation("OrthonormalFactor: columns are not orthonormal");
  }

  [[nodiscard]] const Matrix<Scalar>& matrix() const { return m_; }
  [[nodiscard]] Eigen::Index rows() const { return m_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return m_.cols(); }

  /// max_i ||e_i^T M||, the incoherence of the factor.
  [[nodiscard]] Scalar max_row_norm() const {
    return m_.rows() == 0 ? Scalar(0) : m_.rowwise().norm().maxCoeff();
  }

 private:
  Matrix<Scalar> m_;
};

using Factor = OrthonormalFactor<double>;

/// Flip column signs so the largest-magnitude entry of every column is positive
/// (lowest row index wins ties).
template <typename Scalar>
void canonicalize_signs(Matrix<Scalar>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index arg = 0;
    Scalar best = Scalar(-1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Scalar v = std::abs(m(i, j));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (m.rows() > 0 && m(arg, j) < 0) m.col(j) = -m.col(j);
  }
}

template <typename Scalar>
struct LeftSingular {
  Matrix<Scalar> vectors;  // rows x r
  Vector<Scalar> values;   // all min(rows, cols) singular values, descending
};

/// Leading r left singular pairs of m.
///
/// Wide inputs (cols > 2*rows) go through a Householder QR of m^T first so the
/// SVD runs on a rows x rows triangle; both routes are backward stable.
/// When sigma_r == sigma_{r+1} any basis of the tied subspace may be returned.
template <typename Derived>
LeftSingular<typename Derived::Scalar> left_singular(const Eigen::MatrixBase<Derived>& m, Eigen::Index r) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (r < 1 || r > k) throw ContractViolation("left_singular: rank out of range");

  LeftSingular<Scalar> out;
  if (m.cols() > 2 * m.rows()) {
    Eigen::HouseholderQR<Matrix<Scalar>> qr(m.transpose());
    const Matrix<Scalar> rt =
        qr.matrixQR().topRows(m.rows()).template triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    Eigen::BDCSVD<Matrix<Scalar>> svd(rt, Eigen::ComputeThinU);
    out.vectors = svd.matrixU().leftCols(r);
    out.values = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU);
    out.vectors = svd.matrixU().leftCols(r);
    out.values = svd.singularValues();
  }
  canonicalize_signs(out.vectors);
  return out;
}

template <typename Derived>
OrthonormalFactor<typename Derived::Scalar> top_left_singular_vectors(const Eigen::MatrixBase<Derived>& m,
                                                                      Eigen::Index r) {
  return OrthonormalFactor<typename Derived::Scalar>(left_singular(m, r).vectors);
}

/// Leading r eigenvectors of a symmetric matrix ordered by |eigenvalue|.
/// For symmetric input these span the same subspace as the top-r left singular vectors.
template <typename Derived>
OrthonormalFactor<typename Derived::Scalar> top_eigenvectors_by_magnitude(const Eigen::MatrixBase<Derived>& s,
                                                                          Eigen::Index r) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) throw ContractViolation("top_eigenvectors_by_magnitude: matrix must be square");
  if (r < 1 || r > s.rows()) throw ContractViolation("top_eigenvectors_by_magnitude: rank out of range");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(s);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const auto& values = eig.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(values(a)) > std::abs(values(b)); });
  Matrix<Scalar> out(s.rows(), r);
  for (Eigen::Index j = 0; j < r; ++j) out.col(j) = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  canonicalize_signs(out);
  return OrthonormalFactor<Scalar>(std::move(out));
}

template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  return svd.singularValues()(0);
}

/// d(a, b) = ||a - b O*|| in spectral norm, with O* the polar factor of b^T a.
template <typename Scalar>
Scalar subspace_distance(const OrthonormalFactor<Scalar>& a, const OrthonormalFactor<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ContractViolation("subspace_distance: factors must have the same shape");
  const Matrix<Scalar> cross = b.matrix().transpose() * a.matrix();
  Eigen::JacobiSVD<Matrix<Scalar>> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix<Scalar> rotation = svd.matrixU() * svd.matrixV().transpose();
  return spectral_norm(a.matrix() - b.matrix() * rotation);
}

}  // namespace twist
