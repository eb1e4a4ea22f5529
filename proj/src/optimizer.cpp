#include "loxobound/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "loxobound/parallel.hpp"

namespace loxobound {
namespace {

void check_rank(int rank) {
  if (rank < 2) throw InputError("rank must be >= 2, got " + std::to_string(rank));
}

void check_open_unit(const ReducedPoint& p) {
  for (double v : {p.a, p.b, p.c})
    if (!(v > 0.0 && v < 1.0)) throw DomainError("reduced coordinates must lie in (0, 1)");
}

double b_from_equalization(int rank, double a, double alpha) {
  const double n = rank;
  const double A = 4 * n * (n - 1) - 1 + 2 * n * a;
  return 1.0 / (1.0 + alpha * A / (1.0 - 2 * n * a));
}

// log f_r for every relation and the log-sum-exp smoothing of their max.
class SmoothedMax {
 public:
  SmoothedMax(const PsiTable& psi, const std::vector<Relation>& rs)
      : members_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rs.size()), static_cast<Eigen::Index>(psi.size()))),
        own_(rs.size()) {
    for (std::size_t k = 0; k < rs.size(); ++k) {
      for (std::size_t p : rs[k].psi_set) members_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) = 1.0;
      own_[k] = static_cast<Eigen::Index>(rs[k].psi_index);
    }
  }

  Eigen::VectorXd log_values(const Eigen::VectorXd& x, Eigen::VectorXd* xr_out = nullptr,
                             Eigen::VectorXd* Xr_out = nullptr) const {
    const Eigen::VectorXd Xr = members_ * x;
    Eigen::VectorXd xr(Xr.size());
    for (Eigen::Index k = 0; k < xr.size(); ++k) xr(k) = x(own_[static_cast<std::size_t>(k)]);
    Eigen::VectorXd out = (-xr).array().log1p() - xr.array().log() + (-Xr).array().log1p() - Xr.array().log();
    if (xr_out) *xr_out = xr;
    if (Xr_out) *Xr_out = Xr;
    return out;
  }

  double max_value(const Eigen::VectorXd& x) const { return std::exp(log_values(x).maxCoeff()); }

  double evaluate(const Eigen::VectorXd& x, double t, Eigen::VectorXd* grad) const {
    Eigen::VectorXd xr, Xr;
    const Eigen::VectorXd lf = log_values(x, &xr, &Xr);
    const double top = lf.maxCoeff();
    const Eigen::ArrayXd e = ((lf.array() - top) / t).exp();
    const double total = e.sum();
    if (grad) {
      const Eigen::ArrayXd w = e / total;
      const Eigen::VectorXd on_set = (w * (-1.0 / (Xr.array() * (1.0 - Xr.array())))).matrix();
      *grad = members_.transpose() * on_set;
      const Eigen::ArrayXd on_own = w * (-1.0 / (xr.array() * (1.0 - xr.array())));
      for (Eigen::Index k = 0; k < on_own.size(); ++k) (*grad)(own_[static_cast<std::size_t>(k)]) += on_own(k);
    }
    return top + t * std::log(total);
  }

 private:
  Eigen::MatrixXd members_;
  std::vector<Eigen::Index> own_;
};

Eigen::VectorXd dirichlet_start(std::mt19937_64& rng, Eigen::Index m) {
  std::exponential_distribution<double> draw(1.0);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = draw(rng);
  return v / v.sum();
}

StartResult run_start(const SmoothedMax& objective, Eigen::Index m, int start, const MinimaxConfig& cfg) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(start)};
  std::mt19937_64 rng(seq);
  StartResult res;
  res.start = start;
  Projection proj = project_simplex(dirichlet_start(rng, m), cfg.floor);
  Eigen::VectorXd x = proj.x;
  res.floor_events += proj.floored;

  const int per_stage = std::max(1, cfg.iterations / cfg.stages);
  double temperature = cfg.initial_temperature;
  double previous = objective.max_value(x);
  double last_change = std::numeric_limits<double>::infinity();
  int iteration = 0;
  Eigen::VectorXd grad;
  for (int stage = 0; stage < cfg.stages; ++stage) {
    double step = cfg.initial_step;
    double smoothed = objective.evaluate(x, temperature, &grad);
    for (int it = 0; it < per_stage; ++it, ++iteration) {
      step *= 2.0;
      while (true) {
        proj = project_simplex(x - step * grad, cfg.floor);
        const double candidate = objective.evaluate(proj.x, temperature, nullptr);
        if (candidate <= smoothed - cfg.armijo * grad.dot(x - proj.x) || step < 1e-20) break;
        step *= 0.5;
      }
      res.floor_events += proj.floored;
      x = proj.x;
      smoothed = objective.evaluate(x, temperature, &grad);
    }
    const double value = objective.max_value(x);
    res.trace.push_back({iteration, temperature, smoothed, value});
    last_change = std::abs(previous - value) / value;
    previous = value;
    temperature *= cfg.temperature_ratio;
  }
  res.x = x;
  res.value = previous;
  res.converged = last_change <= cfg.stall_tolerance;
  return res;
}

}  // namespace

double constraint_residual(int rank, const ReducedPoint& p) {
  check_rank(rank);
  const double n = rank;
  return 2 * n * p.a + 8 * n * (n - 1) * (n - 1) * p.b + 4 * n * (n - 1) * p.c - 1.0;
}

std::array<double, 3> reduced_f(int rank, const ReducedPoint& p, double constraint_tol) {
  const double res = constraint_residual(rank, p);
  if (std::abs(res) > constraint_tol)
    throw InputError("reduced point violates the simplex constraint by " + std::to_string(res));
  check_open_unit(p);
  const double n = rank;
  const double m = 2 * n - 1;
  const double A = 4 * n * (n - 1) - 1 + 2 * n * p.a;
  return {(1 - p.a) / p.a / m, (1 - p.b) / p.b * (1 - 2 * n * p.a) / A, (1 - p.c) / p.c * m};
}

SimplexPoint lift(int rank, const ReducedPoint& p, double sum_tol) {
  const PsiTable psi(rank);
  Eigen::VectorXd x(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double v = p.b;
    if (psi[i].type == PsiType::T1) v = p.a;
    if (psi[i].type == PsiType::T4) v = p.c;
    x(static_cast<Eigen::Index>(i)) = v;
  }
  return SimplexPoint(rank, std::move(x), sum_tol);
}

ReducedPoint closed_form_optimum(int rank, double alpha) {
  check_rank(rank);
  const double m = 2.0 * rank - 1;
  ReducedPoint p;
  p.a = 1.0 / (1.0 + m * alpha);
  p.c = m / (m + alpha);
  p.b = b_from_equalization(rank, p.a, alpha);
  const double res = constraint_residual(rank, p);
  if (!(std::abs(res) <= 1e-9))
    throw InternalError("closed-form optimum misses the constraint by " + std::to_string(res) +
                        "; alpha is not a root of the quartic");
  for (double v : reduced_f(rank, p))
    if (!(std::abs(v - alpha) <= 1e-9 * alpha))
      throw InternalError("closed-form optimum fails equalization: " + std::to_string(v) + " vs " +
                          std::to_string(alpha));
  return p;
}

AStarComparison compare_a_star(int rank, double alpha) {
  check_rank(rank);
  const double m = 2.0 * rank - 1;
  auto score = [&](double a, double& equalization, double& constraint) {
    equalization = (1 - a) / a / m - alpha;
    ReducedPoint p{a, b_from_equalization(rank, a, alpha), m / (m + alpha)};
    constraint = constraint_residual(rank, p);
  };
  AStarComparison out;
  out.adopted = 1.0 / (1.0 + m * alpha);
  out.variant = 1.0 / (m + alpha);
  score(out.adopted, out.adopted_equalization_residual, out.adopted_constraint_residual);
  score(out.variant, out.variant_equalization_residual, out.variant_constraint_residual);
  return out;
}

ReducedProblem reduced_problem(int rank, const ReducedPoint& p) {
  check_rank(rank);
  check_open_unit(p);
  const double n = rank;
  const double m = 2 * n - 1;
  const double a = p.a, b = p.b, c = p.c;
  const double A = 4 * n * (n - 1) - 1 + 2 * n * a;
  const double q = (1 - 2 * n * a) / A;
  const double odds_b = (1 - b) / b;
  const double ratio_c = c / (1 - c);

  ReducedProblem out;
  out.f = m * (1 - c) / c;
  out.g1 = (1 - a) / a * ratio_c - m * m;
  out.g2 = q * odds_b * ratio_c - m;
  out.h = 2 * n * a + 8 * n * (n - 1) * (n - 1) * b + 4 * n * (n - 1) * c;
  out.grad_f = {0.0, 0.0, -m / (c * c)};
  out.grad_g1 = {-c / (a * a * (1 - c)), 0.0, (1 - a) / (a * (1 - c) * (1 - c))};
  out.grad_g2 = {-8 * n * n * (n - 1) / (A * A) * odds_b * ratio_c, -q * ratio_c / (b * b),
                 q * odds_b / ((1 - c) * (1 - c))};
  out.grad_h = {2 * n, 8 * n * (n - 1) * (n - 1), 4 * n * (n - 1)};
  return out;
}

KktCertificate kkt_solve(int rank, const ReducedPoint& p) {
  const ReducedProblem rp = reduced_problem(rank, p);
  Eigen::Matrix3d J;
  J.col(0) = rp.grad_g1;
  J.col(1) = rp.grad_g2;
  J.col(2) = rp.grad_h;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
  if (!lu.isInvertible())
    throw DomainError("KKT stationarity system is singular (rank " + std::to_string(lu.rank()) + ")");

  KktCertificate cert;
  cert.point = p;
  cert.multipliers = lu.solve(-rp.grad_f);
  cert.stationarity = (rp.grad_f + J * cert.multipliers).lpNorm<Eigen::Infinity>();
  cert.complementarity = std::max(std::abs(cert.multipliers(0) * rp.g1), std::abs(cert.multipliers(1) * rp.g2));
  cert.feasibility = std::max({std::abs(rp.h - 1.0), std::max(rp.g1, 0.0), std::max(rp.g2, 0.0)});
  cert.residual = std::max({cert.stationarity, cert.complementarity, cert.feasibility});
  return cert;
}

Eigen::Vector3d mfcq_witness(int rank) {
  check_rank(rank);
  return {2.0 * (rank - 1), 0.0, -1.0};
}

Projection project_simplex(const Eigen::VectorXd& v, double floor) {
  const Eigen::Index m = v.size();
  if (m == 0) throw InputError("cannot project an empty vector");
  if (!(floor >= 0.0) || floor * static_cast<double>(m) >= 1.0) throw InputError("floor too large for the dimension");
  const double budget = 1.0 - floor * static_cast<double>(m);
  const Eigen::VectorXd w = v.array() - floor;

  std::vector<double> sorted(w.data(), w.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - budget) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }

  Projection out;
  out.x.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double shifted = w(i) - theta;
    if (shifted <= 0.0) ++out.floored;
    out.x(i) = std::max(shifted, 0.0) + floor;
  }
  return out;
}

MinimaxResult minimize_max(int rank, const MinimaxConfig& config) {
  check_rank(rank);
  if (config.multistarts < 1) throw InputError("multistarts must be >= 1");
  if (config.stages < 1 || config.iterations < config.stages)
    throw InputError("iterations must be >= stages >= 1");
  if (!(config.initial_temperature > 0.0) || !(config.temperature_ratio > 0.0 && config.temperature_ratio < 1.0))
    throw InputError("temperature schedule must start positive and shrink");

  const PsiTable psi(rank);
  const auto relations = config.collection == Collection::F ? build_F(psi) : build_G(psi);
  const SmoothedMax objective(psi, relations);
  const auto m = static_cast<Eigen::Index>(psi.size());

  MinimaxResult out;
  out.rank = rank;
  out.config = config;
  out.starts.resize(static_cast<std::size_t>(config.multistarts));
  parallel_for(out.starts.size(), [&](std::size_t s) {
    out.starts[s] = run_start(objective, m, static_cast<int>(s), config);
  });

  for (std::size_t s = 1; s < out.starts.size(); ++s)
    if (out.starts[s].value < out.starts[out.best_start].value) out.best_start = s;
  const StartResult& best = out.starts[out.best_start];
  out.x = best.x;
  out.value = max_displacement(best.x, relations, 1e-9).value;
  out.converged = best.converged;
  return out;
}

}  // namespace loxobound
