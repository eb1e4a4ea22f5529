#include "loxobound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "loxobound/displacement.hpp"
#include "loxobound/errors.hpp"
#include "loxobound/freegroup.hpp"
#include "loxobound/hyperbolic.hpp"
#include "loxobound/optimizer.hpp"
#include "loxobound/quartic.hpp"
#include "loxobound/relations.hpp"

namespace loxobound {

using Json = nlohmann::ordered_json;

void RunConfig::validate() const {
  if (n_lo < 2) throw InputError("rank must be >= 2");
  if (n_hi < n_lo) throw InputError("empty rank range");
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  if (multistarts < 1) throw InputError("multistarts must be >= 1");
  if (ball_length != 0 && ball_length < 4) throw InputError("ball length must be >= 4");
}

std::pair<int, int> parse_n_range(const std::string& text) {
  const auto parse_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw InputError("bad rank range '" + text + "'");
    }
    if (used != s.size()) throw InputError("bad rank range '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  const int lo = parse_int(text.substr(0, dots));
  const int hi = dots == std::string::npos ? lo : parse_int(text.substr(dots + 2));
  if (lo < 2 || hi < lo) throw InputError("rank range '" + text + "' needs 2 <= a <= b");
  return {lo, hi};
}

namespace {

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  throw InternalError("unknown output format");
}

Json config_json(const std::string& command, const RunConfig& c) {
  Json j;
  j["command"] = command;
  j["n_range"] = {c.n_lo, c.n_hi};
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["multistarts"] = c.multistarts;
  j["ball_length"] = c.ball_length;
  j["format"] = format_name(c.format);
  j["matrices"] = c.matrices;
  j["inject_fault"] = c.inject_fault;
  return j;
}

Json report_header(const std::string& command, const RunConfig& c) {
  Json doc;
  doc["version"] = LOXOBOUND_VERSION;
  doc["config"] = config_json(command, c);
  return doc;
}

std::string csv_cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

/// Header from the first row's keys, then one line per row.
std::string render_csv(const Json& rows) {
  std::ostringstream os;
  if (rows.empty()) return "";
  bool first = true;
  for (const auto& [key, value] : rows[0].items()) {
    os << (first ? "" : ",") << key;
    first = false;
  }
  os << '\n';
  for (const auto& row : rows) {
    first = true;
    for (const auto& [key, value] : row.items()) {
      os << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

Json mpz_json(const mpz_class& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

CommandResult render(const RunConfig& config, const Json& doc, const Json& rows, const std::string& text,
                     int exit_code) {
  CommandResult result;
  result.exit_code = exit_code;
  switch (config.format) {
    case OutputFormat::Json: result.output = doc.dump(2) + "\n"; break;
    case OutputFormat::Csv: result.output = render_csv(rows); break;
    case OutputFormat::Text: result.output = text; break;
  }
  return result;
}

int ball_length_for(const RunConfig& config, int rank) {
  return config.ball_length != 0 ? config.ball_length : default_ball_length(rank);
}

struct GradientSuite {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;
};

/// Directional derivatives of every relation's f_r against central
/// differences along random sum-zero directions.
GradientSuite gradient_suite(const PsiTable& psi, const std::vector<Relation>& rs, std::uint64_t seed, int points,
                             double rel_tol) {
  GradientSuite suite;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(psi.size());
  for (int p = 0; p < points; ++p) {
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = 1.0 + unit(rng);
    x /= x.sum();
    const double h = 1e-4 * x.minCoeff();
    for (const Relation& r : rs) {
      Eigen::VectorXd u(m);
      for (Eigen::Index i = 0; i < m; ++i) u(i) = normal(rng);
      u.array() -= u.mean();
      u.normalize();
      const Eigen::VectorXd g = displacement_gradient(x, r);
      const double analytic = g.dot(u);
      const Eigen::VectorXd xp = x + h * u;
      const Eigen::VectorXd xm = x - h * u;
      const double numeric = (displacement(xp, r).value - displacement(xm, r).value) / (2.0 * h);
      const double scale = std::max(std::abs(analytic), 1e-3 * g.norm());
      const double err = std::abs(numeric - analytic) / scale;
      suite.worst = std::max(suite.worst, err);
      ++suite.checked;
      if (err > rel_tol) ++suite.failures;
    }
  }
  return suite;
}

}  // namespace

CommandResult cmd_alpha(const RunConfig& config) {
  config.validate();
  Json doc = report_header("alpha", config);
  Json rows = Json::array();
  Json brackets = Json::array();
  std::ostringstream text;
  text << "n  alpha            half_log_alpha  trace_bound  bracket_width\n";
  bool ok = true;
  for (int n = config.n_lo; n <= config.n_hi; ++n) {
    const Quartic q = coefficients(n);
    const RootBracket b = alpha(n, config.tol);
    const double lo = b.lo.get_d();
    const double hi = b.hi.get_d();
    const double m = 2.0 * n - 1.0;
    const bool inside = b.lo > mpq_class(m * m) && b.hi < mpq_class(m * m * m) && lo <= b.value && b.value <= hi;
    ok = ok && inside;
    Json row;
    row["n"] = n;
    const char* names[] = {"c4", "c3", "c2", "c1", "c0"};
    for (int k = 0; k < 5; ++k) row[names[k]] = mpz_json(q.coeffs[static_cast<std::size_t>(k)]);
    row["lo"] = lo;
    row["hi"] = hi;
    row["alpha"] = b.value;
    row["half_log_alpha"] = half_log(b.value);
    row["trace_bound"] = trace_bound(b.value);
    rows.push_back(row);
    mpq_class width = b.width();
    brackets.push_back(
        {{"n", n}, {"lo", b.lo.get_str()}, {"hi", b.hi.get_str()}, {"width", width.get_d()}, {"inside", inside}});
    text << std::left << std::setw(3) << n << std::setw(17) << fixed(b.value, 10) << std::setw(16)
         << fixed(half_log(b.value), 4) << std::setw(13) << fixed(trace_bound(b.value), 4) << sci(width.get_d())
         << "\n";
  }
  doc["rows"] = rows;
  doc["exact_brackets"] = brackets;
  doc["passed"] = ok;
  return render(config, doc, rows, text.str(), ok ? kExitSuccess : kExitVerificationFailure);
}

CommandResult cmd_verify(const RunConfig& config) {
  config.validate();
  Json doc = report_header("verify", config);
  Json rows = Json::array();
  std::ostringstream text;
  bool all_ok = true;
  const auto record = [&](int n, const std::string& check, bool passed, const std::string& detail) {
    rows.push_back({{"n", n}, {"check", check}, {"passed", passed}, {"detail", detail}});
    text << (passed ? "PASS " : "FAIL ") << "n=" << n << " " << check << ": " << detail << "\n";
    all_ok = all_ok && passed;
  };

  for (int n = config.n_lo; n <= config.n_hi; ++n) {
    const PsiTable psi(n);
    const std::size_t psi_expected = psi_size_formula(n);
    record(n, "psi_size", psi.size() == psi_expected,
           std::to_string(psi.size()) + " vs formula " + std::to_string(psi_expected));
    record(n, "psi_type_counts", psi.type_counts() == psi_type_count_formula(n), "per-type counts against formula");

    const std::vector<Relation> F = build_F(psi);
    record(n, "F_size", F.size() == psi.size(), std::to_string(F.size()) + " vs |Psi| " + std::to_string(psi.size()));

    std::vector<Relation> G = build_G(psi);
    const auto family_expected = family_count_formula(n);
    std::array<std::size_t, 10> family_actual{};
    for (const Relation& r : G) ++family_actual[static_cast<std::size_t>(r.family)];
    record(n, "G_family_counts", family_actual == family_expected, "per-family counts against formula");
    record(n, "G_size", G.size() == g_size_row_sum(n),
           std::to_string(G.size()) + " vs row sum " + std::to_string(g_size_row_sum(n)));
    record(n, "G_bottom_row", g_size_bottom_row(n) == g_size_row_sum(n),
           "bottom-row total " + std::to_string(g_size_bottom_row(n)) + " vs row sum " +
               std::to_string(g_size_row_sum(n)));

    const int L = ball_length_for(config, n);
    const std::vector<Word> ball = enumerate_ball(n, L);
    record(n, "ball_size", ball.size() == ball_size_formula(n, L),
           std::to_string(ball.size()) + " words of length <= " + std::to_string(L));

    if (config.inject_fault && !G.empty() && !G.front().psi_set.empty()) G.front().psi_set.erase(G.front().psi_set.begin());
    const auto reports = verify_relations(G, psi, L);
    std::size_t failed = 0, forward = 0, backward = 0;
    std::string first_failure;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      forward += reports[k].forward_checked;
      backward += reports[k].backward_checked;
      if (!reports[k].passed()) {
        if (failed == 0) {
          first_failure = "; first failure: " + std::string(family_name(G[k].family)) + " gamma=" +
                          to_string(G[k].gamma) + " psi=" + to_string(G[k].psi.word);
          if (!reports[k].samples.empty())
            first_failure += " direction " + std::to_string(reports[k].samples.front().direction) + " at " +
                             to_string(reports[k].samples.front().word);
        }
        ++failed;
      }
    }
    record(n, "relations", failed == 0,
           std::to_string(G.size() - failed) + "/" + std::to_string(G.size()) + " pass at L=" + std::to_string(L) +
               " (" + std::to_string(forward) + " forward, " + std::to_string(backward) + " backward words)" +
               first_failure);

    const GradientSuite grad = gradient_suite(psi, build_G(psi), config.seed, 10, 1e-5);
    record(n, "gradients", grad.failures == 0,
           std::to_string(grad.checked) + " directional derivatives, worst relative error " + sci(grad.worst));
  }
  doc["rows"] = rows;
  doc["passed"] = all_ok;
  text << (all_ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return render(config, doc, rows, text.str(), all_ok ? kExitSuccess : kExitVerificationFailure);
}

CommandResult cmd_optimize(const RunConfig& config) {
  config.validate();
  Json doc = report_header("optimize", config);
  Json rows = Json::array();
  Json details = Json::array();
  std::ostringstream text;
  bool all_ok = true;

  for (int n = config.n_lo; n <= config.n_hi; ++n) {
    const double a = alpha(n, config.tol).value;
    const double value_tol = n == 2 ? 1e-4 : 1e-3;
    const ReducedPoint p = closed_form_optimum(n, a);
    const auto f = reduced_f(n, p);
    double equalization = 0.0;
    for (double v : f) equalization = std::max(equalization, std::abs(v - a) / a);
    const KktCertificate kkt = kkt_solve(n, p);
    const AStarComparison cmp = compare_a_star(n, a);
    const SimplexPoint y = candidate_y(n, a);
    const double closed_vs_candidate = (lift(n, p).coords() - y.coords()).cwiseAbs().maxCoeff();
    const bool kkt_ok = kkt.residual < 1e-8 && kkt.all_multipliers_positive();
    all_ok = all_ok && kkt_ok;

    Json detail;
    detail["n"] = n;
    detail["alpha"] = a;
    detail["closed_form"] = {{"a", p.a}, {"b", p.b}, {"c", p.c}};
    detail["equalization_residual"] = equalization;
    detail["constraint_residual"] = constraint_residual(n, p);
    detail["closed_form_vs_candidate_y"] = closed_vs_candidate;
    detail["kkt"] = {{"multipliers", {kkt.multipliers(0), kkt.multipliers(1), kkt.multipliers(2)}},
                     {"stationarity", kkt.stationarity},
                     {"complementarity", kkt.complementarity},
                     {"feasibility", kkt.feasibility},
                     {"residual", kkt.residual},
                     {"passed", kkt_ok}};
    detail["a_star"] = {{"adopted", cmp.adopted},
                        {"adopted_constraint_residual", cmp.adopted_constraint_residual},
                        {"variant", cmp.variant},
                        {"variant_constraint_residual", cmp.variant_constraint_residual}};

    text << "n=" << n << " alpha=" << fixed(a, 10) << "\n";
    text << "  closed form a=" << p.a << " b=" << p.b << " c=" << p.c << "; equalization residual "
         << sci(equalization) << ", constraint residual " << sci(std::abs(constraint_residual(n, p))) << "\n";
    text << "  a* check: 1/(1+(2n-1)alpha)=" << cmp.adopted << " leaves constraint residual "
         << sci(std::abs(cmp.adopted_constraint_residual)) << "; 1/((2n-1)+alpha)=" << cmp.variant
         << " leaves " << sci(std::abs(cmp.variant_constraint_residual)) << "\n";
    text << "  KKT multipliers (" << kkt.multipliers(0) << ", " << kkt.multipliers(1) << ", " << kkt.multipliers(2)
         << "), residual " << sci(kkt.residual) << (kkt_ok ? " PASS" : " FAIL") << "\n";

    Json runs = Json::array();
    for (Collection collection : {Collection::F, Collection::G}) {
      MinimaxConfig mc;
      mc.seed = config.seed;
      mc.multistarts = config.multistarts;
      mc.collection = collection;
      const MinimaxResult r = minimize_max(n, mc);
      const double rel = std::abs(r.value - a) / a;
      const double deviation = (r.x - y.coords()).cwiseAbs().maxCoeff();
      const bool ok = rel <= value_tol && deviation <= 1e-3;
      all_ok = all_ok && ok;
      const std::string name = collection == Collection::F ? "F" : "G";
      Json row;
      row["n"] = n;
      row["collection"] = name;
      row["alpha"] = a;
      row["minimax_value"] = r.value;
      row["relative_error"] = rel;
      row["max_deviation_from_candidate"] = deviation;
      row["best_start"] = r.best_start;
      row["converged"] = r.converged;
      row["kkt_residual"] = kkt.residual;
      row["passed"] = ok && kkt_ok;
      rows.push_back(row);
      Json starts = Json::array();
      for (const StartResult& s : r.starts) {
        Json trajectory = Json::array();
        for (const TracePoint& t : s.trace)
          trajectory.push_back({{"iteration", t.iteration}, {"temperature", t.temperature}, {"value", t.value}});
        starts.push_back({{"start", s.start}, {"value", s.value}, {"converged", s.converged},
                          {"floor_events", s.floor_events}, {"trajectory", trajectory}});
      }
      runs.push_back({{"collection", name}, {"value", r.value}, {"relative_error", rel},
                      {"max_deviation_from_candidate", deviation}, {"converged", r.converged}, {"passed", ok},
                      {"starts", starts}});
      text << "  minimax " << name << ": value=" << fixed(r.value, 10) << " relative error " << sci(rel)
           << ", max deviation from candidate " << sci(deviation) << (ok ? " PASS" : " FAIL") << "\n";
    }
    detail["minimax"] = runs;
    details.push_back(detail);
  }
  doc["rows"] = rows;
  doc["details"] = details;
  doc["passed"] = all_ok;
  text << (all_ok ? "optimize: cross-check passed\n" : "optimize: FAILED\n");
  return render(config, doc, rows, text.str(), all_ok ? kExitSuccess : kExitVerificationFailure);
}

CommandResult cmd_check_matrices(const RunConfig& config) {
  if (config.matrices.empty()) throw InputError("check-matrices needs --matrices <path>");
  const std::vector<Moebiusd> generators = load_matrices(config.matrices);
  if (generators.size() < 2) throw InputError("matrix file must hold at least two generators");
  Json doc = report_header("check-matrices", config);
  const H3Pointd z(0.0, 0.0, 1.0);
  const DisplacementTheoremReport report = check_displacement_theorem(generators, z);

  Json rows = Json::array();
  for (const auto& wd : report.displacements)
    rows.push_back({{"word", to_string(wd.word)}, {"class", to_string(wd.kind)}, {"displacement", wd.displacement}});

  bool failure = report.hypothesis_verified && !report.holds;
  Json pairs = Json::array();
  std::ostringstream pair_text;
  const int rank = static_cast<int>(generators.size());
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) {
      if (i == j) continue;
      Json pj = {{"i", i + 1}, {"j", j + 1}};
      try {
        const TracePairReport tp = trace_pair_report(generators, i, j, report.alpha);
        const bool asserted = report.hypothesis_verified && tp.hypothesis_i && tp.hypothesis_ii;
        pj["hypothesis_i"] = tp.hypothesis_i;
        pj["hypothesis_ii"] = tp.hypothesis_ii;
        pj["lhs"] = tp.lhs;
        pj["rhs"] = tp.rhs;
        pj["margin"] = tp.margin;
        pj["asserted"] = asserted;
        if (asserted && tp.margin < 0.0) failure = true;
        pair_text << "  pair (" << i + 1 << "," << j + 1 << "): lhs=" << fixed(tp.lhs, 6) << " rhs=" << fixed(tp.rhs, 6)
                  << " margin=" << fixed(tp.margin, 6) << " hypotheses " << (tp.hypothesis_i ? "i" : "-")
                  << (tp.hypothesis_ii ? "ii" : "-") << (asserted ? " asserted" : " not asserted") << "\n";
      } catch (const DomainError& e) {
        pj["error"] = e.what();
        pair_text << "  pair (" << i + 1 << "," << j + 1 << "): " << e.what() << "\n";
      }
      pairs.push_back(pj);
    }

  const bool warning = !report.hypothesis_verified;
  doc["point"] = {0.0, 0.0, 1.0};
  doc["certificate"] = {{"verified", report.certificate.verified},
                        {"reason", report.certificate.reason},
                        {"min_gap", report.certificate.verified || !report.certificate.circles.empty()
                                        ? Json(report.certificate.min_gap)
                                        : Json(nullptr)}};
  doc["all_loxodromic"] = report.all_loxodromic;
  doc["hypothesis_verified"] = report.hypothesis_verified;
  doc["warning"] = warning ? Json("hypothesis unverified") : Json(nullptr);
  doc["bound"] = report.bound;
  doc["max_displacement"] = report.max_displacement;
  doc["margin"] = report.margin;
  doc["holds"] = report.holds;
  doc["displacements"] = rows;
  doc["trace_pairs"] = pairs;
  doc["passed"] = !failure;

  std::ostringstream text;
  if (warning) text << "WARNING: hypothesis unverified (" << report.certificate.reason << "); bound not asserted\n";
  text << "Schottky certificate: " << (report.certificate.verified ? "verified" : "not verified") << " ("
       << report.certificate.reason << ")\n";
  text << "max displacement at (0,0,1) over " << report.displacements.size()
       << " words: " << fixed(report.max_displacement, 6) << ", bound " << fixed(report.bound, 6) << ", margin "
       << fixed(report.margin, 6) << "\n";
  text << pair_text.str();
  text << (failure ? "check-matrices: FAILED\n" : "check-matrices: done\n");
  return render(config, doc, rows, text.str(), failure ? kExitVerificationFailure : kExitSuccess);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Displacement and trace bounds for free purely loxodromic Kleinian groups"};
  app.set_version_flag("--version", std::string(LOXOBOUND_VERSION));
  app.require_subcommand(1);

  RunConfig config;
  int n = 0;
  std::string n_range;
  std::string format = "text";

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", n, "Rank n >= 2");
    sub->add_option("--n-range", n_range, "Rank range a..b");
    sub->add_option("--tol", config.tol, "Bracket width for alpha");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", config.out, "Write the report to this path");
  };
  CLI::App* alpha_cmd = app.add_subcommand("alpha", "Quartic roots and derived bounds");
  add_common(alpha_cmd);
  CLI::App* verify_cmd = app.add_subcommand("verify", "Counts, relation identities and gradient checks");
  add_common(verify_cmd);
  verify_cmd->add_option("--ball-length", config.ball_length, "Word length for relation verification (>= 4)");
  verify_cmd->add_option("--seed", config.seed, "Seed for the gradient suite");
  verify_cmd->add_flag("--inject-fault", config.inject_fault, "Corrupt one relation (negative control)");
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Closed-form optimum, KKT and minimax cross-check");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--seed", config.seed, "Multistart seed");
  optimize_cmd->add_option("--multistarts", config.multistarts, "Number of random starts");
  CLI::App* matrices_cmd = app.add_subcommand("check-matrices", "Evaluate the bounds on concrete generators");
  add_common(matrices_cmd);
  matrices_cmd->add_option("--matrices", config.matrices, "JSON file of generator matrices")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForVersion&) {
    out << LOXOBOUND_VERSION << "\n";
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  }

  CommandResult result;
  try {
    if (!n_range.empty()) {
      std::tie(config.n_lo, config.n_hi) = parse_n_range(n_range);
      if (n != 0) throw InputError("give --n or --n-range, not both");
    } else if (n != 0) {
      config.n_lo = config.n_hi = n;
    }
    config.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Text;
    if (alpha_cmd->parsed())
      result = cmd_alpha(config);
    else if (verify_cmd->parsed())
      result = cmd_verify(config);
    else if (optimize_cmd->parsed())
      result = cmd_optimize(config);
    else
      result = cmd_check_matrices(config);
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsageError;
  }

  if (config.out.empty()) {
    out << result.output;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      err << "usage error: cannot write " << config.out << "\n";
      return kExitUsageError;
    }
    file << result.output;
  }
  if (result.exit_code == kExitVerificationFailure) err << "verification failed\n";
  return result.exit_code;
}

}  // namespace loxobound
