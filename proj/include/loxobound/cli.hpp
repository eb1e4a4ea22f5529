#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

namespace loxobound {

enum class OutputFormat { Json, Csv, Text };

/// Process exit codes.
enum ExitCode : int { kExitSuccess = 0, kExitVerificationFailure = 1, kExitUsageError = 2 };

struct RunConfig {
  int n_lo = 2;
  int n_hi = 2;
  double tol = 1e-12;
  std::uint64_t seed = 42;
  int multistarts = 8;
  /// 0 selects the per-rank default ball length.
  int ball_length = 0;
  OutputFormat format = OutputFormat::Text;
  std::string out;
  std::string matrices;
  /// Drops one member of the first relation's Psi_r before verification.
  bool inject_fault = false;

  /// Throws InputError unless 2 <= n_lo <= n_hi, tol > 0, multistarts >= 1
  /// and ball_length is 0 or at least 4.
  void validate() const;
};

/// Parses "a..b" (or a single integer) into [lo, hi]; throws InputError
/// unless 2 <= lo <= hi.
std::pair<int, int> parse_n_range(const std::string& text);

struct CommandResult {
  int exit_code = kExitSuccess;
  std::string output;
};

/// Per rank: quartic coefficients, alpha bracket, 1/2 log alpha and
/// 2 sinh^2(1/4 log alpha). CSV columns:
/// n,c4,c3,c2,c1,c0,lo,hi,alpha,half_log_alpha,trace_bound
CommandResult cmd_alpha(const RunConfig& config);

/// Counts, relation verification on the word ball and the finite-difference
/// gradient suite. Exit 0 iff every check passes.
CommandResult cmd_verify(const RunConfig& config);

/// Closed-form optimum, KKT certificate and the numerical minimax cross-check.
CommandResult cmd_optimize(const RunConfig& config);

/// Schottky certificate, displacement scan over Gamma_* and trace-inequality
/// margins for a matrix file. An unverified hypothesis exits 0 with a warning.
CommandResult cmd_check_matrices(const RunConfig& config);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loxobound
