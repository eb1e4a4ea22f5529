#pragma once

#include <gmpxx.h>

#include <array>
#include <string>

namespace loxobound {

/// The quartic P(lambda) = c4 lambda^4 + c3 lambda^3 + c2 lambda^2 + c1 lambda + c0
/// whose largest root is alpha_n.
struct Quartic {
  int rank = 0;
  /// (c4, c3, c2, c1, c0)
  std::array<mpz_class, 5> coeffs;

  mpq_class operator()(const mpq_class& lambda) const;
  double operator()(double lambda) const;
};

/// Exact coefficients for rank n >= 2; integer arithmetic only.
Quartic coefficients(int rank);

/// Horner evaluation in exact rationals.
mpq_class eval_exact(const Quartic& q, const mpq_class& lambda);

/// A root of a quartic bracketed by an exact sign change on [lo, hi].
struct RootBracket {
  int rank = 0;
  mpq_class lo;
  mpq_class hi;
  double value = 0.0;
  /// True when bisection landed on an exact rational root (then lo == hi).
  bool exact = false;

  mpq_class width() const { return hi - lo; }
};

/// Bisects [lo, hi] in exact arithmetic until hi - lo <= tol. The endpoints
/// must have opposite signs; throws InternalError otherwise.
RootBracket refine_root(const Quartic& q, mpq_class lo, mpq_class hi, const mpq_class& tol);

/// alpha_n: the unique root above (2n-1)^2, bracketed within ((2n-1)^2, (2n-1)^3).
RootBracket alpha(int rank, double tol = 1e-12);

/// All four real roots, three inside (-2, 1) and one above (2n-1)^2, in
/// increasing order.
std::array<RootBracket, 4> all_roots(int rank, double tol = 1e-12);

/// 1/2 log alpha_n, the displacement bound.
double half_log(double alpha);
/// 2 sinh^2(1/4 log alpha_n), the trace-inequality bound.
double trace_bound(double alpha);

struct SignRow {
  std::string label;
  mpq_class lambda;
  mpq_class value;
  int expected_sign = 0;
  int sign = 0;
  /// The tabulated closed form, verbatim.
  mpq_class printed_form;
  /// The closed form re-derived by exact symbolic substitution.
  mpq_class corrected_form;

  bool sign_ok() const { return sign == expected_sign; }
  bool printed_form_ok() const { return printed_form == value; }
  bool corrected_form_ok() const { return corrected_form == value; }
};

/// Exact values at the six probe points -2, -1/n, -1/(2n-1), 1, (2n-1)^2, (2n-1)^3.
struct SignTableReport {
  int rank = 0;
  std::array<SignRow, 6> rows;

  bool signs_ok() const;
  bool printed_forms_ok() const;
  bool corrected_forms_ok() const;
};

SignTableReport sign_table(int rank);

}  // namespace loxobound
