#include "loxobound/displacement.hpp"

#include <cmath>
#include <string>

namespace loxobound {

SimplexPoint::SimplexPoint(int rank, Eigen::VectorXd coords, double sum_tol) : rank_(rank), coords_(std::move(coords)) {
  const auto expected = static_cast<Eigen::Index>(psi_size_formula(rank));
  if (coords_.size() != expected)
    throw InputError("simplex point has " + std::to_string(coords_.size()) + " coordinates, expected " +
                     std::to_string(expected));
  for (Eigen::Index i = 0; i < coords_.size(); ++i)
    if (!(coords_(i) > 0.0) || !std::isfinite(coords_(i)))
      throw DomainError("simplex coordinate " + std::to_string(i) + " is not positive");
  std::vector<std::size_t> all(static_cast<std::size_t>(coords_.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double sum = compensated_sum(coords_, all);
  if (std::abs(sum - 1.0) > sum_tol) throw InputError("simplex coordinates sum to " + std::to_string(sum));
}

SimplexPoint SimplexPoint::uniform(int rank) {
  const auto m = static_cast<Eigen::Index>(psi_size_formula(rank));
  return SimplexPoint(rank, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

namespace {

void check_rank_match(const SimplexPoint& x, const Relation& r) {
  if (x.rank() != r.gamma.rank()) throw InputError("relation rank does not match point rank");
}

}  // namespace

DisplacementValue<double> displacement(const SimplexPoint& x, const Relation& r) {
  check_rank_match(x, r);
  return displacement(x.coords(), r);
}

Eigen::VectorXd displacement_gradient(const SimplexPoint& x, const Relation& r) {
  check_rank_match(x, r);
  return displacement_gradient(x.coords(), r);
}

MaxResult max_displacement(const Eigen::VectorXd& x, const std::vector<Relation>& rs, double rel_tol) {
  if (rs.empty()) throw InputError("max over an empty relation list");
  const Eigen::VectorXd values = displacement_values(x, rs);
  MaxResult out;
  out.value = values.maxCoeff();
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (values(k) >= out.value * (1.0 - rel_tol)) out.argmax.push_back(static_cast<std::size_t>(k));
  return out;
}

MaxResult max_F(const SimplexPoint& x, double rel_tol) {
  const PsiTable psi(x.rank());
  return max_displacement(x.coords(), build_F(psi), rel_tol);
}

MaxResult max_G(const SimplexPoint& x, double rel_tol) {
  const PsiTable psi(x.rank());
  return max_displacement(x.coords(), build_G(psi), rel_tol);
}

TypeValues candidate_type_values(int rank, double alpha) {
  if (rank < 2) throw InputError("rank must be >= 2");
  const double n = rank;
  const double m = 2 * n - 1;
  if (!(alpha > m * m && alpha < m * m * m))
    throw InputError("alpha = " + std::to_string(alpha) + " lies outside ((2n-1)^2, (2n-1)^3)");
  TypeValues v;
  v.a = 1.0 / (m * alpha + 1.0);
  v.b = m * (alpha - 1.0) / ((4 * n * n - 4 * n - 1) * m * alpha * alpha + (4 * n * n - 2) * alpha - m);
  v.c = m / (m + alpha);
  return v;
}

SimplexPoint candidate_y(int rank, double alpha, double sum_tol) {
  const TypeValues v = candidate_type_values(rank, alpha);
  const PsiTable psi(rank);
  Eigen::VectorXd y(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double value = v.b;
    if (psi[i].type == PsiType::T1) value = v.a;
    if (psi[i].type == PsiType::T4) value = v.c;
    y(static_cast<Eigen::Index>(i)) = value;
  }
  return SimplexPoint(rank, std::move(y), sum_tol);
}

Eigen::VectorXd descent_direction(const PsiTable& psi) {
  const double n1 = psi.rank() - 1;
  const double on_type4 = -(1.0 + 4.0 * n1 * n1) / (2.0 * n1);
  Eigen::VectorXd u(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i)
    u(static_cast<Eigen::Index>(i)) = psi[i].type == PsiType::T4 ? on_type4 : 1.0;
  return u;
}

Eigen::VectorXd permute_point(const GeneratorPermutation& tau, const PsiTable& psi, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(psi.size())) throw InputError("point size does not match Psi");
  const auto map = tau.psi_map(psi);
  Eigen::VectorXd out(x.size());
  for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(map[i])) = x(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace loxobound
