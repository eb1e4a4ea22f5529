#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "loxobound/displacement.hpp"

namespace loxobound {

/// Common coordinate values: a on type 1, b on types 2, 3, 5, c on type 4.
struct ReducedPoint {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// 2na + 8n(n-1)^2 b + 4n(n-1)c - 1.
double constraint_residual(int rank, const ReducedPoint& p);

/// Displacements of the three distinct F families at lift(p):
/// (family 1a, families 2b/3a/5a, family 4b).
/// Throws InputError when |constraint_residual| > constraint_tol.
std::array<double, 3> reduced_f(int rank, const ReducedPoint& p, double constraint_tol = 1e-9);

/// Fills type-1 coordinates with a, types 2/3/5 with b and type 4 with c.
SimplexPoint lift(int rank, const ReducedPoint& p, double sum_tol = 1e-9);

/// Solves the three equalization equations reduced_f(p) = (alpha, alpha, alpha)
/// one coordinate at a time. Throws InternalError when the result misses the
/// constraint or the equalization by more than 1e-9.
ReducedPoint closed_form_optimum(int rank, double alpha);

/// Compares the adopted type-1 value 1/(1 + (2n-1)alpha) with the variant
/// 1/((2n-1) + alpha). For each candidate a, b and c are re-solved from their
/// own equalization equations before measuring the constraint residual.
struct AStarComparison {
  double adopted = 0.0;
  double variant = 0.0;
  double adopted_equalization_residual = 0.0;
  double variant_equalization_residual = 0.0;
  double adopted_constraint_residual = 0.0;
  double variant_constraint_residual = 0.0;
};
AStarComparison compare_a_star(int rank, double alpha);

/// Objective f = (2n-1)(1-c)/c, constraints g1 <= 0, g2 <= 0, h = 1, and
/// their gradients in (a, b, c).
struct ReducedProblem {
  double f, g1, g2, h;
  Eigen::Vector3d grad_f, grad_g1, grad_g2, grad_h;
};
ReducedProblem reduced_problem(int rank, const ReducedPoint& p);

struct KktCertificate {
  ReducedPoint point;
  Eigen::Vector3d multipliers = Eigen::Vector3d::Zero();
  /// Max-norm of grad f + l1 grad g1 + l2 grad g2 + l3 grad h.
  double stationarity = 0.0;
  /// max(|l1 g1|, |l2 g2|).
  double complementarity = 0.0;
  /// max(|h - 1|, g1+, g2+).
  double feasibility = 0.0;
  /// Max of the three parts above.
  double residual = 0.0;

  bool inequality_multipliers_positive() const { return multipliers(0) > 0.0 && multipliers(1) > 0.0; }
  bool all_multipliers_positive() const { return (multipliers.array() > 0.0).all(); }
};

/// Solves the 3x3 stationarity system for (l1, l2, l3) at p and scores the
/// full KKT conditions there. Throws DomainError when the system is singular.
KktCertificate kkt_solve(int rank, const ReducedPoint& p);

/// p = (2(n-1), 0, -1): grad h . p = 0 and grad g_i . p < 0 at the optimum.
Eigen::Vector3d mfcq_witness(int rank);

struct Projection {
  Eigen::VectorXd x;
  /// Coordinates that landed on the floor.
  std::size_t floored = 0;
};

/// Euclidean projection onto {x >= floor, sum x = 1} by sorting.
Projection project_simplex(const Eigen::VectorXd& v, double floor = 1e-12);

enum class Collection { F, G };

struct MinimaxConfig {
  std::uint64_t seed = 42;
  int multistarts = 8;
  int iterations = 10000;
  int stages = 20;
  double initial_temperature = 1.0;
  double temperature_ratio = 0.5;
  double initial_step = 1e-3;
  double armijo = 1e-4;
  double floor = 1e-12;
  double stall_tolerance = 1e-4;
  Collection collection = Collection::F;
};

struct TracePoint {
  int iteration = 0;
  double temperature = 0.0;
  double smoothed = 0.0;
  double value = 0.0;
};

struct StartResult {
  int start = 0;
  Eigen::VectorXd x;
  double value = 0.0;
  std::vector<TracePoint> trace;
  std::size_t floor_events = 0;
  bool converged = false;
};

struct MinimaxResult {
  int rank = 0;
  MinimaxConfig config;
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t best_start = 0;
  bool converged = false;
  std::vector<StartResult> starts;
};

/// Minimizes max_r f_r over the simplex by annealed log-sum-exp smoothing of
/// log f_r (temperature initial_temperature * ratio^k at stage k) with
/// projected gradient steps and Armijo backtracking. Starts are Dirichlet(1)
/// draws from mt19937_64 seeded with (seed, start index); they run in
/// parallel and the lowest value wins, ties going to the lower index.
MinimaxResult minimize_max(int rank, const MinimaxConfig& config);

}  // namespace loxobound
