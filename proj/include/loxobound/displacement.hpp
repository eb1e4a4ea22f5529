#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "loxobound/errors.hpp"
#include "loxobound/freegroup.hpp"
#include "loxobound/relations.hpp"

namespace loxobound {

/// A strictly positive vector indexed by Psi (PsiTable order) summing to 1.
class SimplexPoint {
 public:
  /// Throws DomainError on a non-positive coordinate and InputError on a
  /// size mismatch or |sum - 1| > sum_tol.
  SimplexPoint(int rank, Eigen::VectorXd coords, double sum_tol = 1e-12);

  static SimplexPoint uniform(int rank);

  int rank() const noexcept { return rank_; }
  Eigen::Index size() const noexcept { return coords_.size(); }
  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_(static_cast<Eigen::Index>(i)); }

 private:
  int rank_;
  Eigen::VectorXd coords_;
};

/// Neumaier-compensated sum of x over the given positions.
template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::MatrixBase<Derived>& x, const std::vector<std::size_t>& positions) {
  using Scalar = typename Derived::Scalar;
  Scalar sum(0), carry(0);
  for (std::size_t p : positions) {
    const Scalar v = x(static_cast<Eigen::Index>(p));
    const Scalar t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

template <typename Scalar>
struct DisplacementValue {
  Scalar value;
  Scalar x_r;
  Scalar X_r;
  const Relation* relation;
};

/// f_r(x) = (1 - x_r)/x_r * (1 - X_r)/X_r with x_r = x(psi_r) and X_r the sum
/// of x over Psi_r.
template <typename Derived>
DisplacementValue<typename Derived::Scalar> displacement(const Eigen::MatrixBase<Derived>& x, const Relation& r) {
  using Scalar = typename Derived::Scalar;
  const Scalar xr = x(static_cast<Eigen::Index>(r.psi_index));
  const Scalar Xr = compensated_sum(x, r.psi_set);
  if (!(xr > Scalar(0)) || !(Xr > Scalar(0))) throw DomainError("displacement needs positive coordinates");
  return {(Scalar(1) - xr) / xr * (Scalar(1) - Xr) / Xr, xr, Xr, &r};
}

/// Gradient of f_r in R^Psi. Adding the e_{psi_r} term on top of the Psi_r sum
/// gives both case forms at once, since psi_r may or may not lie in Psi_r.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> displacement_gradient(const Eigen::MatrixBase<Derived>& x,
                                                                                const Relation& r) {
  using Scalar = typename Derived::Scalar;
  const auto d = displacement(x, r);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> g = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(x.size());
  const Scalar on_set = -(Scalar(1) - d.x_r) / (d.x_r * d.X_r * d.X_r);
  for (std::size_t p : r.psi_set) g(static_cast<Eigen::Index>(p)) = on_set;
  g(static_cast<Eigen::Index>(r.psi_index)) += -(Scalar(1) - d.X_r) / (d.x_r * d.x_r * d.X_r);
  return g;
}

/// f_r(x) for every relation, in list order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> displacement_values(const Eigen::MatrixBase<Derived>& x,
                                                                              const std::vector<Relation>& rs) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(rs.size()));
  for (std::size_t k = 0; k < rs.size(); ++k) out(static_cast<Eigen::Index>(k)) = displacement(x, rs[k]).value;
  return out;
}

DisplacementValue<double> displacement(const SimplexPoint& x, const Relation& r);
Eigen::VectorXd displacement_gradient(const SimplexPoint& x, const Relation& r);

struct MaxResult {
  double value = 0.0;
  /// Positions in the relation list within rel_tol (relative) of the max, ascending.
  std::vector<std::size_t> argmax;
};

MaxResult max_displacement(const Eigen::VectorXd& x, const std::vector<Relation>& rs, double rel_tol = 1e-9);
/// F(x): max over the F collection built for x's rank.
MaxResult max_F(const SimplexPoint& x, double rel_tol = 1e-9);
/// G(x): max over the G collection built for x's rank.
MaxResult max_G(const SimplexPoint& x, double rel_tol = 1e-9);

/// Common coordinate values (type 1, types 2/3/5, type 4) of the point y
/// at which every F displacement equals alpha.
struct TypeValues {
  double a;
  double b;
  double c;
};
TypeValues candidate_type_values(int rank, double alpha);

/// y with type-1 coordinates 1/((2n-1)alpha + 1), type-2/3/5 coordinates
/// (2n-1)(alpha-1)/((4n^2-4n-1)(2n-1)alpha^2 + (4n^2-2)alpha - (2n-1)) and
/// type-4 coordinates (2n-1)/((2n-1) + alpha). Sums to 1 exactly when alpha
/// is a root of the quartic. Throws InputError for alpha outside
/// ((2n-1)^2, (2n-1)^3).
SimplexPoint candidate_y(int rank, double alpha, double sum_tol = 1e-9);

/// Tangent direction u with u = 1 off type 4 and -(1 + 4(n-1)^2)/(2(n-1)) on
/// type 4; it decreases every displacement outside family 4b.
Eigen::VectorXd descent_direction(const PsiTable& psi);

/// x_r + X_r - x_r X_r < 3/4, the region where f_r is strictly convex.
template <typename Derived>
bool in_convexity_region(const Eigen::MatrixBase<Derived>& x, const Relation& r) {
  const auto d = displacement(x, r);
  return d.x_r + d.X_r - d.x_r * d.X_r < 0.75;
}

/// (tau x)(tau psi) = x(psi).
Eigen::VectorXd permute_point(const GeneratorPermutation& tau, const PsiTable& psi, const Eigen::VectorXd& x);

}  // namespace loxobound
