#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "loxobound/displacement.hpp"
#include "loxobound/errors.hpp"
#include "loxobound/hyperbolic.hpp"
#include "loxobound/quartic.hpp"
#include "oracles.hpp"

using namespace loxobound;

using oracle::direct_f;
using oracle::random_interior;
using oracle::random_tangent;

TEST_CASE("uniform point at rank 2") {
  const PsiTable psi(2);
  const SimplexPoint u = SimplexPoint::uniform(2);
  for (const auto& r : build_G(psi)) {
    const auto d = displacement(u, r);
    if (r.family == Family::R4b) {
      CHECK(d.x_r == doctest::Approx(1.0 / 28));
      CHECK(d.X_r == doctest::Approx(7.0 / 28));
      CHECK(d.value == doctest::Approx(81.0).epsilon(1e-12));
    }
    if (r.family == Family::R1a) {
      CHECK(d.X_r == doctest::Approx(21.0 / 28));
      CHECK(d.value == doctest::Approx(9.0).epsilon(1e-12));
    }
  }
  const MaxResult F = max_F(u);
  CHECK(F.value == doctest::Approx(81.0));
  const auto Frel = build_F(psi);
  CHECK(F.argmax.size() == 8);
  for (std::size_t k : F.argmax) CHECK(Frel[k].family == Family::R4b);
}

TEST_CASE("simplex point validation") {
  CHECK_THROWS_AS(SimplexPoint(2, Eigen::VectorXd::Constant(27, 1.0 / 27)), InputError);
  CHECK_THROWS_AS(SimplexPoint(2, Eigen::VectorXd::Constant(28, 1.0 / 27)), InputError);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(28, 1.0 / 27);
  z(0) = 0.0;
  CHECK_THROWS_AS(SimplexPoint(2, z), DomainError);
}

TEST_CASE("displacement matches the definition and its value identity") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const auto G = build_G(psi);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd x = random_interior(rng, psi.size());
      for (const auto& r : G) {
        const auto d = displacement(x, r);
        CHECK(d.value == doctest::Approx(direct_f(x, r)).epsilon(1e-10));
        CHECK(d.value == doctest::Approx((1 - d.x_r) * (1 - d.X_r) / (d.x_r * d.X_r)).epsilon(1e-12));
        CHECK(0.5 * std::log(d.value) == doctest::Approx(disp_lower_bound(d.x_r, 1.0 - d.X_r)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("candidate point equalizes F and bounds G") {
  for (int n = 2; n <= 6; ++n) {
    const double a = alpha(n).value;
    const SimplexPoint y = candidate_y(n, a);
    CHECK(std::abs(y.coords().sum() - 1.0) < 1e-9);
    const PsiTable psi(n);
    for (const auto& r : build_F(psi)) CHECK(std::abs(displacement(y, r).value / a - 1.0) < 1e-9);
    for (const auto& r : build_G(psi)) CHECK(displacement(y, r).value <= a * (1 + 1e-9));
    CHECK(max_F(y).value == doctest::Approx(a).epsilon(1e-9));
    CHECK(max_G(y).value == doctest::Approx(a).epsilon(1e-9));
    CHECK(max_F(y).argmax.size() == psi.size());
  }
  const double a2 = alpha(2).value;
  const SimplexPoint y2 = candidate_y(2, a2);
  const PsiTable psi(2);
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (psi[i].type == PsiType::T4) CHECK(y2[i] == doctest::Approx(3.0 / (3.0 + a2)));
  CHECK(3.0 / (3.0 + a2) == doctest::Approx(0.10767).epsilon(1e-4));
  CHECK_THROWS_AS(candidate_y(2, 8.0), InputError);
  CHECK_THROWS_AS(candidate_y(2, 28.0), InputError);
}

TEST_CASE("F <= G and F > 1 at random points") {
  std::mt19937_64 rng(5);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const auto F = build_F(psi);
    const auto G = build_G(psi);
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd x = random_interior(rng, psi.size());
      const double f = max_displacement(x, F).value;
      CHECK(f <= max_displacement(x, G).value);
      CHECK(f > 1.0);
    }
  }
}

TEST_CASE("gradients agree with tangent central differences") {
  std::mt19937_64 rng(17);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const auto G = build_G(psi);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = random_interior(rng, psi.size());
      for (const auto& r : G) {
        const Eigen::VectorXd g = displacement_gradient(x, r);
        const Eigen::VectorXd u = random_tangent(rng, x.size());
        const double h = 1e-4 * x.minCoeff();
        const double fd = (direct_f(x + h * u, r) - direct_f(x - h * u, r)) / (2 * h);
        const double an = g.dot(u);
        worst = std::max(worst, std::abs(fd - an) / g.norm());
        for (std::size_t i = 0; i < psi.size(); ++i)
          if (i != r.psi_index && !r.in_psi_set(i)) CHECK(g(static_cast<Eigen::Index>(i)) == 0.0);
      }
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("descent direction decreases every non-4b F displacement") {
  std::mt19937_64 rng(23);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const Eigen::VectorXd u = descent_direction(psi);
    CHECK(std::abs(u.sum()) < 1e-12);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = random_interior(rng, psi.size());
      for (const auto& r : build_F(psi)) {
        if (r.family == Family::R4b) continue;
        CHECK(displacement_gradient(x, r).dot(u) < 0.0);
      }
    }
  }
}

TEST_CASE("type-1a displacement dominates its type-1b partner") {
  std::mt19937_64 rng(29);
  const PsiTable psi(2);
  const auto G = build_G(psi);
  std::vector<Eigen::VectorXd> points;
  for (int k = 0; k < 1000; ++k) points.push_back(random_interior(rng, psi.size()));
  for (const auto& r : G) {
    if (r.family != Family::R1b) continue;
    const bool found = std::any_of(G.begin(), G.end(), [&](const Relation& s) {
      if (s.family != Family::R1a) return false;
      return std::all_of(points.begin(), points.end(),
                         [&](const Eigen::VectorXd& x) { return direct_f(x, s) >= direct_f(x, r); });
    });
    CHECK(found);
  }
}

TEST_CASE("Hessian restricted to tangent planes is PSD inside the convexity region") {
  std::mt19937_64 rng(31);
  const PsiTable psi(2);
  const auto G = build_G(psi);
  int tested = 0;
  for (int k = 0; k < 4000 && tested < 100; ++k) {
    const Eigen::VectorXd x = random_interior(rng, psi.size());
    const Relation& r = G[static_cast<std::size_t>(k) % G.size()];
    if (!in_convexity_region(x, r)) continue;
    ++tested;
    const Eigen::VectorXd u = random_tangent(rng, x.size());
    const Eigen::VectorXd v = random_tangent(rng, x.size());
    const double xr = x(static_cast<Eigen::Index>(r.psi_index));
    double X = 0.0;
    for (std::size_t i : r.psi_set) X += x(static_cast<Eigen::Index>(i));
    // Second derivative of (1/x_r - 1)(1/X_r - 1) along the line x + s w.
    const auto second = [&](const Eigen::VectorXd& w) {
      const double a = w(static_cast<Eigen::Index>(r.psi_index));
      double b = 0.0;
      for (std::size_t i : r.psi_set) b += w(static_cast<Eigen::Index>(i));
      return 2 * a * a / (xr * xr * xr) * (1 / X - 1) + 2 * a * b / (xr * xr * X * X) +
             2 * b * b / (X * X * X) * (1 / xr - 1);
    };
    Eigen::Matrix2d H;
    H(0, 0) = second(u);
    H(1, 1) = second(v);
    H(0, 1) = H(1, 0) = (second(u + v) - second(u - v)) / 4;
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(H).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-12 * H.norm());
  }
  CHECK(tested == 100);
}

TEST_CASE("generator permutations permute displacement values") {
  std::mt19937_64 rng(37);
  for (int n : {2, 3}) {
    const PsiTable psi(n);
    const auto F = build_F(psi);
    const auto G = build_G(psi);
    std::uniform_int_distribution<int> gen(1, n);
    std::bernoulli_distribution flip(0.5);
    for (int k = 0; k < 50; ++k) {
      const int a = gen(rng);
      int b = gen(rng);
      const Letter lb = (flip(rng) ? 1 : -1) * b;
      const auto tau = GeneratorPermutation::swap(n, a, lb);
      const Eigen::VectorXd x = random_interior(rng, psi.size());
      const Eigen::VectorXd tx = permute_point(tau, psi, x);
      CHECK(max_displacement(tx, F).value == doctest::Approx(max_displacement(x, F).value).epsilon(1e-12));
      auto before = displacement_values(x, G);
      auto after = displacement_values(tx, G);
      std::sort(before.begin(), before.end());
      std::sort(after.begin(), after.end());
      CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-9 * before.maxCoeff());
    }
  }
}

TEST_CASE("compensated sum") {
  Eigen::VectorXd x(4);
  x << 1e16, 1.0, -1e16, 1.0;
  CHECK(compensated_sum(x, {0, 1, 2, 3}) == 2.0);
}
