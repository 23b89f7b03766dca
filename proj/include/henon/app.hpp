#pragma once

// Command-line front end: configuration, the five subcommands and their
// JSON/CSV artifacts.
//
// Exit codes: 0 ok, 1 configuration error, 2 numerical failure,
// 3 non-convergence.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/spectral.hpp"

namespace henon::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitNotConverged = 3;

inline constexpr int kSchemaVersion = 1;

/// λ as given on the command line: a number, or auto(c) = c·λ₁, auto(c,k) = c·λ_k.
struct LambdaSpec {
  bool relative = false;
  double value = 0.0;  ///< absolute λ, or the factor c
  int k = 1;

  static LambdaSpec parse(const std::string& text);
  double resolve(const Spectrum& spectrum) const;
  std::string str() const;
};

struct RunConfig {
  std::string command;

  int dim = 5;
  std::string lambda = "auto(1.1)";
  double alpha = 0.0;
  int nr = 256;
  int ntheta = 64;
  int k_eigs = 8;

  double tol_c = 1e-9;
  double tol_g = 1e-6;
  int max_iter = 20000;
  int stall_window = 200;
  std::string init = "instanton";  ///< instanton | random
  std::uint64_t seed = 1;
  double seed_eps = 0.05;
  bool require_m_positive = false;
  int morse_k = 0;  ///< 0: m + 3

  std::vector<double> eps_grid{0.04, 0.02, 0.01};
  double margin = 0.0;

  std::string scan_param = "lambda";  ///< lambda (as multiples of λ₁) | alpha
  double scan_from = 0.5;
  double scan_to = 1.5;
  int scan_points = 5;
  int workers = 1;

  std::string field;  ///< diag input CSV
  std::string output_dir = ".";
  std::string format = "json";  ///< json | csv for the eigen table
  bool write_eigenfields = false;
  bool timestamp = true;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Parses argv (flags override a `--config` key = value file) and runs the
/// chosen subcommand. Errors are reported on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_eigen(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_instanton(const RunConfig& cfg, std::ostream& out);
int cmd_scan(const RunConfig& cfg, std::ostream& out);
int cmd_diag(const RunConfig& cfg, std::ostream& out);

/// Wraps `content` as {schema, timestamp?, content, content_hash}. The hash
/// covers content only, so reruns differ at most in the timestamp.
nlohmann::json make_report(const std::string& kind, nlohmann::json content, bool timestamp);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string content_hash(const nlohmann::json& content);

void write_json(const std::string& path, const nlohmann::json& report);

}  // namespace henon::app
