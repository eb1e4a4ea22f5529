#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "loxobound/errors.hpp"
#include "loxobound/optimizer.hpp"
#include "loxobound/quartic.hpp"

using namespace loxobound;

namespace {

/// A random reduced point on the constraint: a and c drawn, b solved for.
ReducedPoint random_reduced(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (;;) {
    const double k = n * (n - 1.0);
    const double a = u(rng) / (4.0 * n);
    const double c = u(rng) / (8.0 * k);
    const double b = (1.0 - 2.0 * n * a - 4.0 * k * c) / (8.0 * k * (n - 1.0));
    if (b > 0.0) return {a, b, c};
  }
}

/// Euclidean projection onto {x >= floor, sum x = 1} by enumerating every
/// set of coordinates held at the floor.
Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& v, double floor) {
  const int m = static_cast<int>(v.size());
  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m) - 1; ++mask) {
    const int fixed = __builtin_popcount(static_cast<unsigned>(mask));
    double free_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (!(mask & (1 << i))) free_sum += v(i);
    const double mu = (free_sum - (1.0 - floor * fixed)) / (m - fixed);
    Eigen::VectorXd x(m);
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      x(i) = (mask & (1 << i)) ? floor : v(i) - mu;
      if (x(i) < floor - 1e-15) ok = false;
    }
    if (!ok) continue;
    const double d = (x - v).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("reduced displacements agree with the lifted point") {
  std::mt19937_64 rng(41);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const auto F = build_F(psi);
    for (int k = 0; k < 100; ++k) {
      const ReducedPoint p = random_reduced(rng, n);
      CHECK(std::abs(constraint_residual(n, p)) < 1e-12);
      const auto f = reduced_f(n, p);
      const SimplexPoint x = lift(n, p);
      for (const auto& r : F) {
        const double full = displacement(x, r).value;
        double expected = f[1];
        if (r.family == Family::R1a) expected = f[0];
        if (r.family == Family::R4b) expected = f[2];
        CHECK(full == doctest::Approx(expected).epsilon(1e-12));
        if (r.family == Family::R1a) CHECK(displacement(x, r).X_r == doctest::Approx((2.0 * n - 1) / (2.0 * n)));
      }
      CHECK(max_F(x).value == doctest::Approx(*std::max_element(f.begin(), f.end())).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform reduced point") {
  const ReducedPoint u{1.0 / 28, 1.0 / 28, 1.0 / 28};
  const auto f = reduced_f(2, u);
  CHECK(f[0] == doctest::Approx(9.0));
  CHECK(f[2] == doctest::Approx(81.0));
  CHECK((lift(2, u).coords() - SimplexPoint::uniform(2).coords()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(reduced_f(2, ReducedPoint{0.1, 0.1, 0.1}), InputError);
}

TEST_CASE("closed-form optimum") {
  for (int n = 2; n <= 6; ++n) {
    const double a = alpha(n).value;
    const ReducedPoint p = closed_form_optimum(n, a);
    CHECK(std::abs(constraint_residual(n, p)) < 1e-9);
    for (double v : reduced_f(n, p)) CHECK(std::abs(v / a - 1.0) < 1e-9);
    const double m = 2.0 * n - 1;
    CHECK(p.a == doctest::Approx(1.0 / (1.0 + m * a)).epsilon(1e-12));
    CHECK(p.c == doctest::Approx(m / (m + a)).epsilon(1e-12));
    CHECK((lift(n, p).coords() - candidate_y(n, a).coords()).cwiseAbs().maxCoeff() < 1e-9);
  }
  const double a2 = alpha(2).value;
  const ReducedPoint p2 = closed_form_optimum(2, a2);
  CHECK(p2.c == doctest::Approx(0.10767).epsilon(1e-4));
  CHECK(p2.a == doctest::Approx(0.013227).epsilon(1e-4));
}

TEST_CASE("a* comparison separates the two candidates") {
  for (int n : {2, 3, 4}) {
    const AStarComparison cmp = compare_a_star(n, alpha(n).value);
    CHECK(std::abs(cmp.adopted_constraint_residual) < 1e-9);
    CHECK(std::abs(cmp.variant_constraint_residual) > 1e-3);
  }
}

TEST_CASE("reduced problem gradients against central differences") {
  std::mt19937_64 rng(43);
  for (int n : {2, 3}) {
    for (int k = 0; k < 50; ++k) {
      const ReducedPoint p = random_reduced(rng, n);
      const ReducedProblem rp = reduced_problem(n, p);
      const double base[3] = {p.a, p.b, p.c};
      for (int d = 0; d < 3; ++d) {
        const double h = 1e-6 * base[d];
        ReducedPoint lo = p, hi = p;
        (d == 0 ? lo.a : d == 1 ? lo.b : lo.c) -= h;
        (d == 0 ? hi.a : d == 1 ? hi.b : hi.c) += h;
        const ReducedProblem up = reduced_problem(n, hi);
        const ReducedProblem dn = reduced_problem(n, lo);
        const auto near = [&](double numeric, double analytic) {
          return std::abs(numeric - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic));
        };
        CHECK(near((up.f - dn.f) / (2 * h), rp.grad_f(d)));
        CHECK(near((up.g1 - dn.g1) / (2 * h), rp.grad_g1(d)));
        CHECK(near((up.g2 - dn.g2) / (2 * h), rp.grad_g2(d)));
        CHECK(near((up.h - dn.h) / (2 * h), rp.grad_h(d)));
      }
    }
  }
}

TEST_CASE("KKT certificate at the optimum") {
  for (int n : {2, 3}) {
    const ReducedPoint p = closed_form_optimum(n, alpha(n).value);
    const KktCertificate kkt = kkt_solve(n, p);
    CHECK(kkt.residual < 1e-8);
    CHECK(kkt.all_multipliers_positive());
    const ReducedProblem rp = reduced_problem(n, p);
    const Eigen::Vector3d w = mfcq_witness(n);
    CHECK(std::abs(rp.grad_h.dot(w)) < 1e-12);
    CHECK(rp.grad_g1.dot(w) < 0.0);
    CHECK(rp.grad_g2.dot(w) < 0.0);
  }
  const KktCertificate k2 = kkt_solve(2, closed_form_optimum(2, alpha(2).value));
  CHECK(k2.multipliers(0) == doctest::Approx(0.14375).epsilon(1e-3));
  CHECK(k2.multipliers(1) == doctest::Approx(0.78654).epsilon(1e-3));
  CHECK(k2.multipliers(2) == doctest::Approx(27.608).epsilon(1e-3));
}

TEST_CASE("KKT residual grows away from the optimum") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int n : {2, 3}) {
    const ReducedPoint p = closed_form_optimum(n, alpha(n).value);
    const Eigen::Vector3d grad_h = reduced_problem(n, p).grad_h;
    for (int k = 0; k < 20; ++k) {
      Eigen::Vector3d d(g(rng) * p.a, g(rng) * p.b, g(rng) * p.c);
      d -= grad_h * (grad_h.dot(d) / grad_h.squaredNorm());
      d *= 1e-2 / (d.cwiseQuotient(Eigen::Vector3d(p.a, p.b, p.c))).cwiseAbs().maxCoeff();
      const ReducedPoint q{p.a + d(0), p.b + d(1), p.c + d(2)};
      CHECK(kkt_solve(n, q).residual > 1e-4);
    }
  }
}

TEST_CASE("simplex projection") {
  Eigen::VectorXd feasible = Eigen::VectorXd::Constant(28, 1.0 / 28);
  feasible(0) += 0.01;
  feasible(1) -= 0.01;
  CHECK((project_simplex(feasible).x - feasible).cwiseAbs().maxCoeff() < 1e-15);
  const Projection uni = project_simplex(Eigen::VectorXd::Constant(28, 5.0));
  CHECK((uni.x.array() - 1.0 / 28).abs().maxCoeff() < 1e-14);

  Eigen::VectorXd spike = Eigen::VectorXd::Zero(28);
  spike(0) = 2.0;
  const Projection ps = project_simplex(spike);
  CHECK(ps.x(0) == doctest::Approx(1.0 - 27e-12));
  CHECK(ps.floored == 27);
  CHECK((project_simplex(ps.x).x - ps.x).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(53);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = g(rng);
    if (k == 0) v << 2.0, 0.0, 0.0, 0.0, 0.0;
    const Eigen::VectorXd expected = brute_force_projection(v, 1e-12);
    const Projection got = project_simplex(v);
    CHECK((got.x - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((project_simplex(got.x).x - got.x).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("numerical minimax at rank 2") {
  const double a = alpha(2).value;
  MinimaxConfig cfg;
  cfg.multistarts = 4;
  const MinimaxResult r = minimize_max(2, cfg);
  CHECK(std::abs(r.value - a) / a < 1e-4);
  CHECK((r.x - candidate_y(2, a).coords()).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(r.converged);
  CHECK(r.starts.size() == 4);
  for (const auto& s : r.starts) CHECK(s.trace.size() == static_cast<std::size_t>(cfg.stages));

  const PsiTable psi(2);
  const auto F = build_F(psi);
  const Eigen::VectorXd values = displacement_values(r.x, F);
  CHECK(values.minCoeff() >= values.maxCoeff() * (1 - 1e-3));
  for (const auto& rel : F)
    if (rel.family == Family::R4b) CHECK(in_convexity_region(r.x, rel));

  const MinimaxResult again = minimize_max(2, cfg);
  CHECK(again.x == r.x);
  CHECK(again.value == r.value);
  CHECK(again.best_start == r.best_start);

  cfg.collection = Collection::G;
  const MinimaxResult rg = minimize_max(2, cfg);
  CHECK(std::abs(rg.value - a) / a < 1e-4);
}

TEST_CASE("minimax rejects bad configurations") {
  MinimaxConfig cfg;
  cfg.multistarts = 0;
  CHECK_THROWS_AS(minimize_max(2, cfg), InputError);
  CHECK_THROWS_AS(minimize_max(1, MinimaxConfig{}), InputError);
}
