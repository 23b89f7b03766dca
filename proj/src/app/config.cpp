#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <regex>
#include <sstream>

#include "henon/app.hpp"
#include "henon/error.hpp"

namespace henon::app {

LambdaSpec LambdaSpec::parse(const std::string& text) {
  static const std::regex re(R"(\s*auto\(\s*([^,\s)]+)\s*(?:,\s*([0-9]+)\s*)?\)\s*)");
  LambdaSpec s;
  std::smatch m;
  try {
    std::size_t used = 0;
    if (std::regex_match(text, m, re)) {
      s.relative = true;
      s.value = std::stod(m[1].str(), &used);
      if (used != m[1].str().size()) throw std::invalid_argument("trailing");
      if (m[2].matched) s.k = std::stoi(m[2].str());
    } else {
      s.value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
    }
  } catch (const std::exception&) {
    throw ConfigError("lambda must be a number, auto(c) or auto(c,k): '" + text + "'");
  }
  if (!std::isfinite(s.value) || s.value < 0.0) throw ConfigError("lambda must be finite and >= 0");
  if (s.k < 1) throw ConfigError("auto(c,k) needs k >= 1");
  return s;
}

double LambdaSpec::resolve(const Spectrum& spectrum) const {
  if (!relative) return value;
  if (k > static_cast<int>(spectrum.eigvals.size())) {
    throw ConfigError("auto(c," + std::to_string(k) + ") needs at least " + std::to_string(k) +
                      " eigenvalues (raise k_eigs)");
  }
  return value * spectrum.eigvals[k - 1];
}

std::string LambdaSpec::str() const {
  std::ostringstream os;
  os.precision(17);
  if (relative) {
    os << "auto(" << value;
    if (k != 1) os << "," << k;
    os << ")";
  } else {
    os << value;
  }
  return os.str();
}

void RunConfig::validate() const {
  if (dim < 3) throw ConfigError("dim must be >= 3");
  LambdaSpec::parse(lambda);
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be finite and >= 0");
  if (nr < 8) throw ConfigError("nr must be >= 8");
  if (ntheta < 4 || ntheta % 2 != 0) throw ConfigError("ntheta must be even and >= 4");
  if (k_eigs < 1) throw ConfigError("k_eigs must be >= 1");
  if (!(tol_c > 0.0) || !(tol_g > 0.0)) throw ConfigError("tolerances must be positive");
  if (max_iter < 1 || stall_window < 1) throw ConfigError("max_iter and stall_window must be >= 1");
  if (init != "instanton" && init != "random") throw ConfigError("init must be instanton or random");
  if (!(seed_eps > 0.0)) throw ConfigError("seed_eps must be positive");
  if (morse_k < 0) throw ConfigError("morse_k must be >= 0");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  }
  if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
  if (scan_param != "lambda" && scan_param != "alpha") {
    throw ConfigError("scan_param must be lambda or alpha");
  }
  if (!std::isfinite(scan_from) || !std::isfinite(scan_to)) throw ConfigError("scan range must be finite");
  if (scan_points < 0) throw ConfigError("scan_points must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
}

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"dim", dim},
          {"lambda", lambda},
          {"alpha", alpha},
          {"nr", nr},
          {"ntheta", ntheta},
          {"k_eigs", k_eigs},
          {"tol_c", tol_c},
          {"tol_g", tol_g},
          {"max_iter", max_iter},
          {"stall_window", stall_window},
          {"init", init},
          {"seed", seed},
          {"seed_eps", seed_eps},
          {"require_m_positive", require_m_positive},
          {"morse_k", morse_k},
          {"eps_grid", eps_grid},
          {"margin", margin},
          {"scan_param", scan_param},
          {"scan_from", scan_from},
          {"scan_to", scan_to},
          {"scan_points", scan_points},
          {"workers", workers},
          {"field", field},
          {"output_dir", output_dir},
          {"format", format},
          {"write_eigenfields", write_eigenfields}};
}

namespace {

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--dim", c.dim, "Space dimension N (>= 3)");
  app.add_option("--lambda", c.lambda, "lambda: number, auto(c) or auto(c,k)");
  app.add_option("--alpha", c.alpha, "Henon exponent alpha >= 0");
  app.add_option("--nr", c.nr, "Radial nodes");
  app.add_option("--ntheta", c.ntheta, "Angular nodes (even)");
  app.add_option("-k,--k_eigs", c.k_eigs, "Eigenpairs to compute");
  app.add_option("--tol_c", c.tol_c, "Constraint residual tolerance");
  app.add_option("--tol_g", c.tol_g, "Relative H-gradient tolerance");
  app.add_option("--max_iter", c.max_iter, "Outer iteration cap");
  app.add_option("--stall_window", c.stall_window, "Iterations without decrease before stopping");
  app.add_option("--init", c.init, "Initial guess: instanton | random");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--seed_eps", c.seed_eps, "Instanton concentration of the initial guess");
  app.add_flag("--require_m_positive", c.require_m_positive, "Reject lambda below lambda_1");
  app.add_option("--morse_k", c.morse_k, "Hessian eigenvalues for the Morse count (0: m + 3)");
  app.add_option("--eps_grid", c.eps_grid, "Instanton eps values")->delimiter(',');
  app.add_option("--margin", c.margin, "Threshold margin");
  app.add_option("--scan_param", c.scan_param, "lambda (multiples of lambda_1) | alpha");
  app.add_option("--scan_from", c.scan_from, "Scan start");
  app.add_option("--scan_to", c.scan_to, "Scan end");
  app.add_option("--scan_points", c.scan_points, "Scan points");
  app.add_option("--workers", c.workers, "Concurrent scan points");
  app.add_option("--field", c.field, "Field CSV for diag");
  app.add_option("-o,--output_dir", c.output_dir, "Directory for reports");
  app.add_option("--format", c.format, "json | csv (eigen table)");
  app.add_flag("--write_eigenfields", c.write_eigenfields, "Write eigenfield CSVs");
  app.add_flag("!--no_timestamp", c.timestamp, "Omit the timestamp field");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Ground states of the Henon-Brezis-Nirenberg problem on the unit ball"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key = value configuration file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  add_options(app, cfg);
  app.require_subcommand(1, 1);
  for (const char* name : {"eigen", "solve", "instanton", "scan", "diag"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("eigen")->description("Lowest Dirichlet eigenpairs");
  app.get_subcommand("solve")->description("Ground state on the generalized Nehari manifold");
  app.get_subcommand("instanton")->description("Instanton sweep and the energy threshold check");
  app.get_subcommand("scan")->description("lambda- or alpha-sweep of solve");
  app.get_subcommand("diag")->description("Sign, Morse and symmetry diagnostics of a field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    cfg.validate();
    if (cfg.command == "eigen") return cmd_eigen(cfg, out);
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "instanton") return cmd_instanton(cfg, out);
    if (cfg.command == "scan") return cmd_scan(cfg, out);
    return cmd_diag(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace henon::app
