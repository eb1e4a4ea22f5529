#include "loxobound/hyperbolic.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "loxobound/quartic.hpp"

namespace loxobound {

std::string to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::Identity: return "identity";
    case IsometryClass::Elliptic: return "elliptic";
    case IsometryClass::Parabolic: return "parabolic";
    case IsometryClass::Loxodromic: return "loxodromic";
    case IsometryClass::Indeterminate: return "indeterminate";
  }
  throw InternalError("unknown isometry class");
}

double bound_rhs(int rank) { return trace_bound(alpha(rank).value); }

double disp_lower_bound(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) throw DomainError("displacement bound needs a, b in [0, 1]");
  if (a == 0.0 || b == 1.0) throw DomainError("displacement bound needs a > 0 and b < 1");
  return 0.5 * std::log(b * (1.0 - a) / (a * (1.0 - b)));
}

Moebiusd evaluate_word(const std::vector<Moebiusd>& generators, const Word& w) {
  if (static_cast<std::size_t>(w.rank()) != generators.size())
    throw InputError("word rank does not match the number of generators");
  Moebiusd out = Moebiusd::identity();
  for (Letter l : w.letters()) {
    const Moebiusd& g = generators[static_cast<std::size_t>(std::abs(l) - 1)];
    out = out * (l > 0 ? g : g.inverse());
  }
  return out;
}

SchottkyCertificate schottky_certificate(const std::vector<Moebiusd>& generators) {
  SchottkyCertificate cert;
  if (generators.empty()) {
    cert.reason = "no generators";
    return cert;
  }
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const Moebiusd& g = generators[k];
    if (g.c() == std::complex<double>(0)) {
      cert.reason = "generator " + std::to_string(k + 1) + " fixes infinity; isometric circles undefined";
      cert.circles.clear();
      return cert;
    }
    const double radius = 1.0 / std::abs(g.c());
    cert.circles.push_back({-g.d() / g.c(), radius});
    cert.circles.push_back({g.a() / g.c(), radius});
  }
  cert.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < cert.circles.size(); ++p)
    for (std::size_t q = p + 1; q < cert.circles.size(); ++q) {
      const Circle& x = cert.circles[p];
      const Circle& y = cert.circles[q];
      cert.min_gap = std::min(cert.min_gap, std::abs(x.center - y.center) - x.radius - y.radius);
    }
  cert.verified = cert.min_gap > 0.0;
  cert.reason = cert.verified ? "isometric circles pairwise disjoint" : "isometric circles intersect";
  return cert;
}

std::vector<Word> gamma_star(int rank) {
  if (rank < 1) throw InputError("rank must be positive");
  std::vector<Word> out;
  for (int i = 1; i <= rank; ++i)
    for (int t : {1, -1}) {
      out.push_back(Word::generator(rank, i, t));
      for (int j = 1; j <= rank; ++j) {
        if (j == i) continue;
        for (int s : {1, -1}) out.push_back(Word::reduce(rank, {t * i, s * j, -t * i}));
      }
    }
  return out;
}

DisplacementTheoremReport check_displacement_theorem(const std::vector<Moebiusd>& generators, const H3Pointd& z,
                                                     double tol) {
  const int rank = static_cast<int>(generators.size());
  if (rank < 2) throw InputError("the displacement bound needs at least two generators");
  DisplacementTheoremReport report;
  report.rank = rank;
  report.alpha = alpha(rank).value;
  report.bound = half_log(report.alpha);
  report.certificate = schottky_certificate(generators);
  report.all_loxodromic = true;
  report.max_displacement = 0.0;
  for (const Word& w : gamma_star(rank)) {
    const Moebiusd g = evaluate_word(generators, w);
    const IsometryClass kind = classify(g);
    if (kind != IsometryClass::Loxodromic) report.all_loxodromic = false;
    const double d = displacement(g, z);
    report.max_displacement = std::max(report.max_displacement, d);
    report.displacements.push_back({w, d, kind});
  }
  report.margin = report.max_displacement - report.bound;
  report.hypothesis_verified = report.certificate.verified && report.all_loxodromic;
  report.holds = report.max_displacement >= report.bound - tol;
  return report;
}

TracePairReport trace_pair_report(const std::vector<Moebiusd>& generators, int i, int j, double alpha_value) {
  const int rank = static_cast<int>(generators.size());
  if (i < 0 || j < 0 || i >= rank || j >= rank || i == j) throw InputError("pair indices must be distinct generators");
  const Moebiusd& xi = generators[static_cast<std::size_t>(i)];
  const Moebiusd& xj = generators[static_cast<std::size_t>(j)];
  const Moebiusd back = xj.inverse() * xi * xj;
  const Moebiusd forth = xj * xi * xj.inverse();

  const GeodesicLined axis = fixed_points(xi);
  TracePairReport report;
  report.i = i;
  report.j = j;
  report.z2 = common_perpendicular(axis, fixed_points(back)).midpoint;
  report.z1 = common_perpendicular(axis, fixed_points(forth)).midpoint;

  const double bound = half_log(alpha_value);
  const Letter gi = i + 1;
  const Letter gj = j + 1;
  for (const Word& w : gamma_star(rank)) {
    const auto l = w.letters();
    if (w.length() == 1 && std::abs(l[0]) == gi) continue;
    if (w.length() == 3 && std::abs(l[0]) == gj && std::abs(l[1]) == gi) continue;
    report.max_phi_displacement_z2 = std::max(report.max_phi_displacement_z2,
                                              displacement(evaluate_word(generators, w), report.z2));
  }
  report.conj_displacement_z2 = displacement(forth, report.z2);
  report.conj_displacement_z1 = displacement(forth, report.z1);
  report.hypothesis_i = report.max_phi_displacement_z2 < bound;
  report.hypothesis_ii = report.conj_displacement_z2 <= report.conj_displacement_z1;
  report.lhs = jorgensen_lhs(xi, xj);
  report.rhs = trace_bound(alpha_value);
  report.margin = report.lhs - report.rhs;
  return report;
}

namespace {

std::complex<double> parse_entry(const nlohmann::json& e) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    throw InputError("matrix entry must be [re, im]");
  return {e[0].get<double>(), e[1].get<double>()};
}

}  // namespace

std::vector<Moebiusd> parse_matrices(const std::string& json_text, double det_tol) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("matrix file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InputError("matrix file must hold a JSON array");
  std::vector<Moebiusd> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& m = doc[k];
    if (!m.is_array() || m.size() != 4) throw InputError("matrix " + std::to_string(k + 1) + " must have 4 entries");
    try {
      out.emplace_back(parse_entry(m[0]), parse_entry(m[1]), parse_entry(m[2]), parse_entry(m[3]), det_tol);
    } catch (const InputError& e) {
      throw InputError("matrix " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Moebiusd> load_matrices(const std::string& path, double det_tol) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrices(buf.str(), det_tol);
}

}  // namespace loxobound
