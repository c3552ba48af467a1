#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "ris/types.hpp"

namespace ris {

// Relative singular-value threshold below which a matrix is declared rank
// deficient: sigma_min < kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-10;

// Moore-Penrose pseudo-inverse of a full-rank matrix (rank = min(rows, cols)).
// Throws RankDeficient when the smallest singular value falls below
// rank_tol times the largest.
template <typename Derived>
typename Derived::PlainObject pseudo_inverse(const Eigen::MatrixBase<Derived>& a,
                                             double rank_tol = kRankTolerance) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (a.rows() == 0 || a.cols() == 0) throw RankDeficient("pseudo_inverse: empty matrix");

  Eigen::JacobiSVD<Plain> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Real largest = sv(0);
  const Real smallest = sv(sv.size() - 1);
  if (!(largest > Real(0)) || !(smallest >= Real(rank_tol) * largest) || !std::isfinite(largest)) {
    throw RankDeficient("pseudo_inverse: matrix is not of full rank");
  }
  Plain inv_s = Plain::Zero(sv.size(), sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv_s(i, i) = Real(1) / sv(i);
  return svd.matrixV() * inv_s * svd.matrixU().adjoint();
}

// Largest singular value (spectral norm).
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real spectral_norm(
    const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(a);
  return svd.singularValues()(0);
}

// Squared column norms of the right inverse E^H (E E^H)^{-1} of a wide matrix E,
// i.e. the diagonal of (E E^H)^{-1}. Returns nullopt when E E^H is not
// numerically positive definite. Hot-loop variant used by the grid searches.
template <typename Derived>
std::optional<Vector<typename Eigen::NumTraits<typename Derived::Scalar>::Real>>
right_inverse_column_costs(const Eigen::MatrixBase<Derived>& e) {
  using Cplx = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Cplx>::Real;
  using Gram = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic>;
  const Gram gram = e * e.adjoint();
  Eigen::LLT<Gram> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;
  // rcond of the Gram matrix is the squared condition ratio of E.
  if (!(llt.rcond() > Real(kRankTolerance * kRankTolerance))) return std::nullopt;
  const Gram inv = llt.solve(Gram::Identity(gram.rows(), gram.cols()));
  Vector<Real> costs(inv.rows());
  for (Eigen::Index k = 0; k < inv.rows(); ++k) costs(k) = inv(k, k).real();
  return costs;
}

}  // namespace ris
