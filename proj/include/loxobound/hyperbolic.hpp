#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "loxobound/errors.hpp"
#include "loxobound/freegroup.hpp"

namespace loxobound {

/// An element of PSL(2, C): a unit-determinant complex 2x2 matrix stored as
/// the canonical member of {M, -M}, the one whose first nonzero entry in
/// (a, b, c, d) order has argument in [0, pi).
template <typename Scalar>
class Moebius {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, 2, 2>;

  /// Throws InputError when |det - 1| > det_tol.
  explicit Moebius(const Matrix& m, Scalar det_tol = Scalar(1e-12)) : m_(m) {
    const Complex det = m_.determinant();
    if (!(std::abs(det - Complex(1)) <= det_tol))
      throw InputError("matrix determinant " + std::to_string(std::real(det)) + "+" + std::to_string(std::imag(det)) +
                       "i is not 1");
    canonicalize();
  }

  Moebius(Complex a, Complex b, Complex c, Complex d, Scalar det_tol = Scalar(1e-12))
      : Moebius(make(a, b, c, d), det_tol) {}

  /// Rescales by a square root of the determinant; throws InputError on a
  /// singular matrix.
  static Moebius normalized(const Matrix& m) {
    const Complex det = m.determinant();
    if (det == Complex(0)) throw InputError("singular matrix has no Moebius normalization");
    return Moebius(Matrix(m / std::sqrt(det)), Scalar(1e-9));
  }

  static Moebius identity() { return Moebius(Matrix::Identity()); }
  static Moebius diagonal(Complex u) { return Moebius(u, Complex(0), Complex(0), Complex(1) / u); }

  const Matrix& matrix() const noexcept { return m_; }
  Complex a() const { return m_(0, 0); }
  Complex b() const { return m_(0, 1); }
  Complex c() const { return m_(1, 0); }
  Complex d() const { return m_(1, 1); }
  Complex trace() const { return m_.trace(); }

  Moebius inverse() const { return Moebius(d(), -b(), -c(), a(), Scalar(1e-9)); }

  friend Moebius operator*(const Moebius& x, const Moebius& y) { return Moebius(Matrix(x.m_ * y.m_), Scalar(1e-9)); }

  friend bool operator==(const Moebius& x, const Moebius& y) { return x.m_ == y.m_; }

 private:
  static Matrix make(Complex a, Complex b, Complex c, Complex d) {
    Matrix m;
    m << a, b, c, d;
    return m;
  }

  void canonicalize() {
    for (int k = 0; k < 4; ++k) {
      const Complex e = m_(k / 2, k % 2);
      if (e == Complex(0)) continue;
      const Scalar arg = std::arg(e);
      if (arg < Scalar(0) || arg >= std::numbers::pi_v<Scalar>) m_ = -m_;
      return;
    }
  }

  Matrix m_;
};

using Moebiusd = Moebius<double>;

/// A point (z, t) of the upper half-space, z = x + iy, t > 0.
template <typename Scalar>
struct H3Point {
  std::complex<Scalar> z;
  Scalar t;

  H3Point(std::complex<Scalar> z_, Scalar t_) : z(z_), t(t_) {
    if (!(t > Scalar(0)) || !std::isfinite(t)) throw DomainError("upper half-space height must be positive");
  }
  H3Point(Scalar x, Scalar y, Scalar t_) : H3Point(std::complex<Scalar>(x, y), t_) {}
};

using H3Pointd = H3Point<double>;

/// A point of C u {infinity}; infinity is an explicit state.
template <typename Scalar>
struct BoundaryPoint {
  bool infinite = false;
  std::complex<Scalar> z{};

  static BoundaryPoint infinity() { return {true, {}}; }
  static BoundaryPoint finite(std::complex<Scalar> v) { return {false, v}; }

  friend bool operator==(const BoundaryPoint& p, const BoundaryPoint& q) {
    return p.infinite == q.infinite && (p.infinite || p.z == q.z);
  }
};

template <typename Scalar>
bool approx_equal(const BoundaryPoint<Scalar>& p, const BoundaryPoint<Scalar>& q, Scalar tol) {
  if (p.infinite || q.infinite) return p.infinite == q.infinite;
  return std::abs(p.z - q.z) <= tol * std::max(Scalar(1), std::abs(p.z));
}

/// The geodesic with the given (distinct) boundary endpoints.
template <typename Scalar>
struct GeodesicLine {
  BoundaryPoint<Scalar> p;
  BoundaryPoint<Scalar> q;

  GeodesicLine(BoundaryPoint<Scalar> p_, BoundaryPoint<Scalar> q_) : p(p_), q(q_) {
    if (p == q) throw InputError("geodesic endpoints must be distinct");
  }
  GeodesicLine(std::complex<Scalar> p_, std::complex<Scalar> q_)
      : GeodesicLine(BoundaryPoint<Scalar>::finite(p_), BoundaryPoint<Scalar>::finite(q_)) {}
};

using GeodesicLined = GeodesicLine<double>;

enum class IsometryClass { Identity, Elliptic, Parabolic, Loxodromic, Indeterminate };

std::string to_string(IsometryClass c);

/// Loxodromic iff trace^2 is off the real segment [0, 4]. Inputs within
/// `band` of the segment but not on it, or within `band` of 4 on it, are
/// reported as Indeterminate.
template <typename Scalar>
IsometryClass classify(const Moebius<Scalar>& M, Scalar band = Scalar(1e-9)) {
  const std::complex<Scalar> tr2 = M.trace() * M.trace();
  const Scalar re = std::real(tr2);
  const Scalar outside = re < Scalar(0) ? -re : (re > Scalar(4) ? re - Scalar(4) : Scalar(0));
  const Scalar dist = std::hypot(std::imag(tr2), outside);
  if (dist > band) return IsometryClass::Loxodromic;
  if (dist > Scalar(0)) return IsometryClass::Indeterminate;
  if (re == Scalar(4)) {
    const bool diagonal_scalar = M.b() == std::complex<Scalar>(0) && M.c() == std::complex<Scalar>(0) && M.a() == M.d();
    return diagonal_scalar ? IsometryClass::Identity : IsometryClass::Parabolic;
  }
  if (Scalar(4) - re <= band) return IsometryClass::Indeterminate;
  return IsometryClass::Elliptic;
}

template <typename Scalar>
struct TranslationInvariants {
  /// Eigenvalue with |u| > 1.
  std::complex<Scalar> u;
  /// Translation length 2 log|u|.
  Scalar T;
  /// arg u reduced to (-pi/2, pi/2]; u is defined up to sign.
  Scalar theta;
};

/// Throws DomainError unless M is loxodromic.
template <typename Scalar>
TranslationInvariants<Scalar> translation_invariants(const Moebius<Scalar>& M) {
  using Complex = std::complex<Scalar>;
  if (classify(M) != IsometryClass::Loxodromic) throw DomainError("translation invariants need a loxodromic element");
  const Complex tr = M.trace();
  const Complex root = std::sqrt(tr * tr - Scalar(4));
  Complex u = (tr + root) / Scalar(2);
  const Complex other = (tr - root) / Scalar(2);
  if (std::abs(other) > std::abs(u)) u = other;
  Scalar theta = std::arg(u);
  if (theta > std::numbers::pi_v<Scalar> / 2) theta -= std::numbers::pi_v<Scalar>;
  if (theta <= -std::numbers::pi_v<Scalar> / 2) theta += std::numbers::pi_v<Scalar>;
  return {u, Scalar(2) * std::log(std::abs(u)), theta};
}

/// Boundary action z -> (az + b)/(cz + d).
template <typename Scalar>
BoundaryPoint<Scalar> apply(const Moebius<Scalar>& M, const BoundaryPoint<Scalar>& p) {
  using Complex = std::complex<Scalar>;
  if (p.infinite) {
    if (M.c() == Complex(0)) return BoundaryPoint<Scalar>::infinity();
    return BoundaryPoint<Scalar>::finite(M.a() / M.c());
  }
  const Complex den = M.c() * p.z + M.d();
  if (den == Complex(0)) return BoundaryPoint<Scalar>::infinity();
  return BoundaryPoint<Scalar>::finite((M.a() * p.z + M.b()) / den);
}

/// Poincare extension to the upper half-space.
template <typename Scalar>
H3Point<Scalar> apply(const Moebius<Scalar>& M, const H3Point<Scalar>& p) {
  using Complex = std::complex<Scalar>;
  const Complex czd = M.c() * p.z + M.d();
  const Scalar t2 = p.t * p.t;
  const Scalar den = std::norm(czd) + std::norm(M.c()) * t2;
  const Complex z = ((M.a() * p.z + M.b()) * std::conj(czd) + M.a() * std::conj(M.c()) * t2) / den;
  return H3Point<Scalar>(z, p.t / den);
}

template <typename Scalar>
GeodesicLine<Scalar> apply(const Moebius<Scalar>& M, const GeodesicLine<Scalar>& L) {
  return GeodesicLine<Scalar>(apply(M, L.p), apply(M, L.q));
}

/// Hyperbolic distance 2 asinh(|p - q| / (2 sqrt(t_p t_q))).
template <typename Scalar>
Scalar dist(const H3Point<Scalar>& p, const H3Point<Scalar>& q) {
  const Scalar chord = std::sqrt(std::norm(p.z - q.z) + (p.t - q.t) * (p.t - q.t));
  return Scalar(2) * std::asinh(chord / (Scalar(2) * std::sqrt(p.t * q.t)));
}

/// d_M(z) = rho(z, Mz).
template <typename Scalar>
Scalar displacement(const Moebius<Scalar>& M, const H3Point<Scalar>& p) {
  return dist(p, apply(M, p));
}

/// The axis of a loxodromic element. Throws DomainError for any other class.
template <typename Scalar>
GeodesicLine<Scalar> fixed_points(const Moebius<Scalar>& M) {
  using Complex = std::complex<Scalar>;
  using BP = BoundaryPoint<Scalar>;
  if (classify(M) != IsometryClass::Loxodromic) throw DomainError("fixed-point axis needs a loxodromic element");
  const Complex a = M.a(), b = M.b(), c = M.c(), d = M.d();
  if (c == Complex(0)) return GeodesicLine<Scalar>(BP::infinity(), BP::finite(b / (d - a)));
  // c z^2 + (d - a) z - b = 0, choosing the root pair that avoids cancellation.
  const Complex beta = d - a;
  const Complex root = std::sqrt(beta * beta + Scalar(4) * b * c);
  const Complex q1 = Scalar(-0.5) * (beta + root);
  const Complex q2 = Scalar(-0.5) * (beta - root);
  const Complex q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
  return GeodesicLine<Scalar>(BP::finite(q / c), BP::finite(-b / q));
}

/// A unit-determinant map sending p to 0 and q to infinity.
template <typename Scalar>
Moebius<Scalar> normalizer(const BoundaryPoint<Scalar>& p, const BoundaryPoint<Scalar>& q) {
  using Complex = std::complex<Scalar>;
  using Matrix = typename Moebius<Scalar>::Matrix;
  Matrix m;
  if (q.infinite)
    m << Complex(1), -p.z, Complex(0), Complex(1);
  else if (p.infinite)
    m << Complex(0), Complex(1), Complex(1), -q.z;
  else
    m << Complex(1), -p.z, Complex(1), -q.z;
  return Moebius<Scalar>::normalized(m);
}

/// Distance from p to the geodesic L, computed after moving L to (0, infinity).
template <typename Scalar>
Scalar dist_point_geodesic(const H3Point<Scalar>& p, const GeodesicLine<Scalar>& L) {
  const H3Point<Scalar> q = apply(normalizer(L.p, L.q), p);
  return std::asinh(std::abs(q.z) / q.t);
}

template <typename Scalar>
struct CommonPerpendicular {
  H3Point<Scalar> midpoint;
  Scalar separation;
  /// The normalizing map sends the lines to (-1, 1) and (-w, w) with |w| > 1.
  std::complex<Scalar> w;
  Moebius<Scalar> normalizer;
};

/// Throws DomainError when the lines share an endpoint.
template <typename Scalar>
CommonPerpendicular<Scalar> common_perpendicular(const GeodesicLine<Scalar>& L1, const GeodesicLine<Scalar>& L2) {
  using Complex = std::complex<Scalar>;
  using Matrix = typename Moebius<Scalar>::Matrix;
  for (const auto& x : {L1.p, L1.q})
    for (const auto& y : {L2.p, L2.q})
      if (x == y) throw DomainError("geodesics share an endpoint");

  const Moebius<Scalar> m1 = normalizer(L1.p, L1.q);
  const BoundaryPoint<Scalar> P = apply(m1, L2.p);
  const BoundaryPoint<Scalar> Q = apply(m1, L2.q);
  if (P.infinite || Q.infinite || P.z == Complex(0) || Q.z == Complex(0))
    throw DomainError("geodesics share an endpoint");

  const Complex s = std::sqrt(P.z * Q.z);
  Matrix scale;
  scale << Complex(1), Complex(0), Complex(0), s;
  Matrix cayley;
  cayley << Complex(1), Complex(1), Complex(-1), Complex(1);
  Moebius<Scalar> N = Moebius<Scalar>::normalized(cayley) * Moebius<Scalar>::normalized(scale) * m1;

  const Complex r = P.z / s;
  Complex w = (Complex(1) + r) / (Complex(1) - r);
  if (std::abs(w) < Scalar(1)) {
    Matrix flip;
    flip << Complex(0), Complex(0, 1), Complex(0, 1), Complex(0);
    N = Moebius<Scalar>(flip) * N;
    w = Complex(1) / w;
  }
  const Scalar separation = std::log(std::abs(w));
  const H3Point<Scalar> mid = apply(N.inverse(), H3Point<Scalar>(Complex(0), std::sqrt(std::abs(w))));
  return {mid, separation, w, N};
}

/// The root of bc = (1 - w)^2 / (4w) with |w| > 1. Throws DomainError when
/// both roots lie on the unit circle (bc real in [-1, 0]).
template <typename Scalar>
std::complex<Scalar> solve_w(std::complex<Scalar> bc) {
  using Complex = std::complex<Scalar>;
  const Complex root = Scalar(2) * std::sqrt(bc * (Complex(1) + bc));
  Complex w = Complex(1) + Scalar(2) * bc + root;
  if (std::abs(w) < Scalar(1)) w = Complex(1) + Scalar(2) * bc - root;
  if (!(std::abs(w) > Scalar(1))) throw DomainError("no solution w with |w| > 1");
  return w;
}

/// |tr^2 g - 4| + |tr(g h g^-1 h^-1) - 2|.
template <typename Scalar>
Scalar jorgensen_lhs(const Moebius<Scalar>& g, const Moebius<Scalar>& h) {
  const auto tr = g.trace();
  // Raw products: the commutator is sign-independent, its canonical form is not.
  using Matrix = typename Moebius<Scalar>::Matrix;
  const auto adjugate = [](const Moebius<Scalar>& m) {
    Matrix out;
    out << m.d(), -m.b(), -m.c(), m.a();
    return out;
  };
  const Matrix commutator = g.matrix() * h.matrix() * adjugate(g) * adjugate(h);
  return std::abs(tr * tr - Scalar(4)) + std::abs(commutator.trace() - Scalar(2));
}

/// 2 sinh^2(1/4 log alpha_n).
double bound_rhs(int rank);

/// 1/2 log(b(1 - a)/(a(1 - b))). Needs a > 0, b < 1 with a, b in [0, 1].
double disp_lower_bound(double a, double b);

/// The element of the group generated by `generators` spelled by w.
Moebiusd evaluate_word(const std::vector<Moebiusd>& generators, const Word& w);

/// Isometric circle |cz + d| = 1 of a map with c != 0.
struct Circle {
  std::complex<double> center;
  double radius;
};

/// Pairwise disjoint closed isometric circles of every generator and its
/// inverse certify a Schottky group: free, discrete and purely loxodromic.
struct SchottkyCertificate {
  bool verified = false;
  std::string reason;
  std::vector<Circle> circles;
  /// Smallest center distance minus radius sum over all circle pairs.
  double min_gap = 0.0;
};

SchottkyCertificate schottky_certificate(const std::vector<Moebiusd>& generators);

struct WordDisplacement {
  Word word;
  double displacement;
  IsometryClass kind;
};

/// Max displacement of z over Gamma_* - {1} against the bound 1/2 log alpha_n.
struct DisplacementTheoremReport {
  int rank = 0;
  double alpha = 0.0;
  double bound = 0.0;
  double max_displacement = 0.0;
  double margin = 0.0;
  SchottkyCertificate certificate;
  bool all_loxodromic = false;
  /// The bound is asserted only when the certificate and loxodromy checks pass.
  bool hypothesis_verified = false;
  bool holds = false;
  std::vector<WordDisplacement> displacements;
};

/// Gamma_* - {1}: xi_i^t and xi_i^t xi_j^s xi_i^-t.
std::vector<Word> gamma_star(int rank);

DisplacementTheoremReport check_displacement_theorem(const std::vector<Moebiusd>& generators, const H3Pointd& z,
                                                     double tol = 1e-9);

/// Hypotheses and conclusion of the two-generator trace inequality for the
/// ordered pair (xi_i, xi_j) of a generating set, 0-based indices.
struct TracePairReport {
  int i = 0;
  int j = 0;
  H3Pointd z1{0.0, 0.0, 1.0};
  H3Pointd z2{0.0, 0.0, 1.0};
  double max_phi_displacement_z2 = 0.0;
  double conj_displacement_z1 = 0.0;
  double conj_displacement_z2 = 0.0;
  bool hypothesis_i = false;
  bool hypothesis_ii = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

TracePairReport trace_pair_report(const std::vector<Moebiusd>& generators, int i, int j, double alpha);

/// Reads a JSON array of matrices, each [[re, im], [re, im], [re, im], [re, im]]
/// for (a, b, c, d). Throws InputError on malformed input or |det - 1| > det_tol.
std::vector<Moebiusd> parse_matrices(const std::string& json_text, double det_tol = 1e-9);
std::vector<Moebiusd> load_matrices(const std::string& path, double det_tol = 1e-9);

}  // namespace loxobound
