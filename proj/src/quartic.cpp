#include "loxobound/quartic.hpp"

#include <algorithm>
#include <cmath>

#include "loxobound/errors.hpp"

namespace loxobound {
namespace {

void check_rank(int rank) {
  if (rank < 2) throw InputError("rank must be >= 2, got " + std::to_string(rank));
}

mpz_class ipow(const mpz_class& base, unsigned e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

mpq_class ratio(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

int sgn(const mpq_class& v) { return ::sgn(v); }

mpq_class to_rational(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InputError("tolerance must be a positive finite number");
  return mpq_class(tol);
}

}  // namespace

Quartic coefficients(int rank) {
  check_rank(rank);
  const mpz_class n = rank;
  const auto p = [&](unsigned e) { return ipow(n, e); };
  Quartic q;
  q.rank = rank;
  q.coeffs[0] = 8 * p(3) - 12 * p(2) + 2 * n + 1;
  q.coeffs[1] = -64 * p(6) + 192 * p(5) - 192 * p(4) + 64 * p(3) + 4 * p(2) + 2 * n - 4;
  q.coeffs[2] = -96 * p(5) + 224 * p(4) - 168 * p(3) + 52 * p(2) - 18 * n + 6;
  q.coeffs[3] = 32 * p(5) - 112 * p(4) + 128 * p(3) - 68 * p(2) + 22 * n - 4;
  q.coeffs[4] = 16 * p(4) - 32 * p(3) + 24 * p(2) - 8 * n + 1;
  return q;
}

mpq_class eval_exact(const Quartic& q, const mpq_class& lambda) {
  mpq_class acc = q.coeffs[0];
  for (std::size_t k = 1; k < q.coeffs.size(); ++k) acc = acc * lambda + q.coeffs[k];
  return acc;
}

mpq_class Quartic::operator()(const mpq_class& lambda) const { return eval_exact(*this, lambda); }

double Quartic::operator()(double lambda) const {
  double acc = coeffs[0].get_d();
  for (std::size_t k = 1; k < coeffs.size(); ++k) acc = acc * lambda + coeffs[k].get_d();
  return acc;
}

RootBracket refine_root(const Quartic& q, mpq_class lo, mpq_class hi, const mpq_class& tol) {
  if (tol <= 0) throw InputError("tolerance must be positive");
  if (lo > hi) std::swap(lo, hi);
  const int s_lo = sgn(eval_exact(q, lo));
  const int s_hi = sgn(eval_exact(q, hi));
  if (s_lo == 0 || s_hi == 0 || s_lo == s_hi)
    throw InternalError("no sign change on [" + lo.get_str() + ", " + hi.get_str() + "]");

  RootBracket out;
  out.rank = q.rank;
  while (hi - lo > tol) {
    mpq_class mid = (lo + hi) / 2;
    const int s_mid = sgn(eval_exact(q, mid));
    if (s_mid == 0) {
      lo = hi = mid;
      out.exact = true;
      break;
    }
    if (s_mid == s_lo)
      lo = mid;
    else
      hi = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.value = mpq_class((lo + hi) / 2).get_d();
  return out;
}

RootBracket alpha(int rank, double tol) {
  check_rank(rank);
  const mpz_class m = 2 * rank - 1;
  return refine_root(coefficients(rank), mpq_class(m * m), mpq_class(m * m * m), to_rational(tol));
}

std::array<RootBracket, 4> all_roots(int rank, double tol) {
  check_rank(rank);
  const mpq_class t = to_rational(tol);
  const Quartic q = coefficients(rank);
  const mpz_class m = 2 * rank - 1;
  const std::array<mpq_class, 5> probes = {mpq_class(-2), ratio(-1, rank), ratio(-1, m),
                                           mpq_class(1), mpq_class(m * m)};
  std::array<RootBracket, 4> out;
  for (std::size_t k = 0; k < 3; ++k) out[k] = refine_root(q, probes[k], probes[k + 1], t);
  out[3] = refine_root(q, probes[4], mpq_class(m * m * m), t);
  return out;
}

double half_log(double alpha) { return 0.5 * std::log(alpha); }

double trace_bound(double alpha) {
  const double s = std::sinh(0.25 * std::log(alpha));
  return 2.0 * s * s;
}

bool SignTableReport::signs_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SignRow& r) { return r.sign_ok(); });
}

bool SignTableReport::printed_forms_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SignRow& r) { return r.printed_form_ok(); });
}

bool SignTableReport::corrected_forms_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SignRow& r) { return r.corrected_form_ok(); });
}

SignTableReport sign_table(int rank) {
  check_rank(rank);
  const Quartic q = coefficients(rank);
  const mpz_class n = rank;
  const mpz_class m = 2 * n - 1;
  const auto p = [&](unsigned e) { return ipow(n, e); };

  SignTableReport rep;
  rep.rank = rank;
  auto fill = [&](std::size_t k, std::string label, mpq_class lambda, int expected, mpq_class printed,
                  mpq_class corrected) {
    SignRow& row = rep.rows[k];
    row.label = std::move(label);
    row.lambda = std::move(lambda);
    row.value = eval_exact(q, row.lambda);
    row.expected_sign = expected;
    row.sign = sgn(row.value);
    row.printed_form = std::move(printed);
    row.corrected_form = std::move(corrected);
  };

  const mpz_class quintic = 256 * p(5) - 608 * p(4) + 424 * p(3) - 36 * p(2) + 18 * n;
  fill(0, "-2", mpq_class(-2), +1, mpq_class((2 * n - 3) * (quintic - 17)), mpq_class((2 * n - 3) * (quintic - 27)));

  const mpz_class octic = 16 * p(8) - 48 * p(7) + 72 * p(6) - 84 * p(5) + 33 * p(4) + 10 * p(3) + 8 * p(2) - 6 * n - 1;
  const mpq_class at_minus_inv_n = ratio(-octic, p(4));
  fill(1, "-1/n", ratio(-1, rank), -1, at_minus_inv_n, at_minus_inv_n);

  fill(2, "-1/(2n-1)", ratio(-1, m), +1, ratio(32 * p(4) * (n - 1), m * m),
       ratio(32 * p(4) * (n - 1), m * m * m));

  const mpz_class at_one = -64 * p(4) * (n - 1) * (n - 1);
  fill(3, "1", mpq_class(1), -1, mpq_class(at_one), mpq_class(at_one));

  const mpz_class cubic = 2 * p(2) - 3 * n + 1;
  const mpz_class at_square = -128 * p(4) * cubic * cubic * cubic * (4 * p(2) - 8 * n + 5);
  fill(4, "(2n-1)^2", mpq_class(m * m), -1, mpq_class(at_square), mpq_class(at_square));

  const mpz_class septic = 32 * p(7) - 80 * p(6) + 56 * p(5) + 4 * p(4) - 22 * p(3) + 16 * p(2) - 5 * n + 1;
  const mpz_class at_cube = 16 * ipow(m, 4) * (n - 1) * (n - 1) * septic;
  fill(5, "(2n-1)^3", mpq_class(m * m * m), +1, mpq_class(at_cube), mpq_class(at_cube));

  return rep;
}

}  // namespace loxobound
