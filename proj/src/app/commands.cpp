#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "henon/app.hpp"
#include "henon/diagnostics.hpp"
#include "henon/error.hpp"
#include "henon/field_io.hpp"
#include "henon/instanton.hpp"
#include "henon/nehari.hpp"
#include "henon/problem.hpp"
#include "serialize.hpp"

namespace henon::app {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

struct Setup {
  Problem base;
  Spectrum spectrum;
  Problem problem;
  SubspaceSplit split;
};

// Spectrum, resolved λ and the Z ⊕ Y split. The eigenvalue count grows until
// some eigenvalue lies above λ.
Setup setup(const RunConfig& cfg, int nr, int ntheta) {
  const LambdaSpec ls = LambdaSpec::parse(cfg.lambda);
  Problem base = Problem::build(ProblemSpec::make(cfg.dim, 0.0, cfg.alpha), nr, ntheta);
  const int cap = static_cast<int>(base.grid->interior_size() / 2);
  int k = std::max(cfg.k_eigs, ls.relative ? ls.k + 1 : 1);
  for (;;) {
    Spectrum sp = dirichlet_spectrum(base.op, std::min(k, cap));
    const double lambda = ls.resolve(sp);
    Problem p = base.with_spec(ProblemSpec::make(cfg.dim, lambda, cfg.alpha));
    try {
      SubspaceSplit split = split_space(p.spec, sp);
      return Setup{std::move(base), std::move(sp), std::move(p), std::move(split)};
    } catch (const SpectrumTooShort&) {
      if (k >= cap) throw;
      k *= 2;
    }
  }
}

json resolved_config(const RunConfig& cfg, const Setup& s) {
  json c = cfg.to_json();
  c["lambda_resolved"] = s.problem.spec.lambda;
  c["nr"] = s.base.grid->nr();
  c["ntheta"] = s.base.grid->ntheta();
  return c;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig sc;
  sc.tol_c = cfg.tol_c;
  sc.tol_g = cfg.tol_g;
  sc.max_iter = cfg.max_iter;
  sc.stall_window = cfg.stall_window;
  sc.init = cfg.init == "random" ? InitialGuess::Random : InitialGuess::Instanton;
  sc.seed = cfg.seed;
  sc.seed_eps = cfg.seed_eps;
  return sc;
}

int morse_count(const RunConfig& cfg, int m) { return cfg.morse_k > 0 ? cfg.morse_k : m + 3; }

// Morse data, or the reason it could not be computed.
json try_morse(const Field& u, const Problem& p, int k, std::optional<int>* index) {
  try {
    const MorseResult mr = morse_index(u, p, k);
    if (index) *index = mr.index;
    return morse_json(mr);
  } catch (const Error& e) {
    return json{{"error", e.what()}};
  }
}

}  // namespace

int cmd_eigen(const RunConfig& cfg, std::ostream& out) {
  const Problem p = Problem::build(ProblemSpec::make(cfg.dim, 0.0, cfg.alpha), cfg.nr, cfg.ntheta);
  const Spectrum sp = dirichlet_spectrum(p.op, cfg.k_eigs);

  if (cfg.format == "csv") {
    auto f = open_out(out_path(cfg, "eigen.csv"));
    f << "index,eigenvalue,angular_mode,radial_index\n";
    for (std::size_t j = 0; j < sp.eigvals.size(); ++j) {
      f << j + 1 << "," << num(sp.eigvals[j]) << "," << sp.angular_mode[j] << ","
        << sp.radial_index[j] << "\n";
    }
  } else {
    json c{{"config", cfg.to_json()}, {"grid", grid_json(*p.grid)}, {"spectrum", spectrum_json(sp)}};
    write_json(out_path(cfg, "eigen.json"), make_report("eigen", std::move(c), cfg.timestamp));
  }
  if (cfg.write_eigenfields) {
    for (std::size_t j = 0; j < sp.eigfields.size(); ++j) {
      write_field_csv(out_path(cfg, "eigenfield_" + std::to_string(j + 1) + ".csv"), sp.eigfields[j]);
    }
  }
  for (std::size_t j = 0; j < sp.eigvals.size(); ++j) {
    out << "lambda_" << j + 1 << " = " << num(sp.eigvals[j]) << "\n";
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Setup s = setup(cfg, cfg.nr, cfg.ntheta);
  if (cfg.require_m_positive && s.split.m == 0) {
    throw ConfigError("lambda = " + num(s.problem.spec.lambda) + " is below lambda_1 (m = 0)");
  }
  GroundStateReport rep = minimize_over_Y(s.split, s.problem, solver_config(cfg));
  const double threshold = compactness_threshold(cfg.dim);
  const Field& e1 = s.spectrum.eigfields.front();

  json c;
  c["config"] = resolved_config(cfg, s);
  c["grid"] = grid_json(*s.base.grid);
  c["split"] = split_json(s.split);
  if (rep.converged) {
    std::optional<int> idx;
    c["morse"] = try_morse(rep.u, s.problem, morse_count(cfg, s.split.m), &idx);
    rep.morse_index = idx;
    c["symmetry"] = symmetry_json(polarization_invariants(rep.u, s.problem, e1));
  }
  c["sign"] = sign_json(sign_change(rep.u, s.problem.weights, &e1));
  c["ground_state"] = ground_state_json(rep);
  c["threshold"] = {{"value", threshold},
                    {"sobolev_constant", sobolev_constant(cfg.dim)},
                    {"below", rep.level_c < threshold},
                    {"margin_fraction", (threshold - rep.level_c) / threshold}};

  write_field_csv(out_path(cfg, "solution.csv"), rep.u);
  write_json(out_path(cfg, "solve.json"), make_report("solve", std::move(c), cfg.timestamp));
  out << "m = " << s.split.m << ", lambda = " << num(s.problem.spec.lambda) << "\n"
      << "level_c = " << num(rep.level_c) << " (threshold " << num(threshold) << ")\n"
      << "status = " << rep.status << " after " << rep.iterations << " iterations\n";
  return rep.converged ? kExitOk : kExitNotConverged;
}

int cmd_instanton(const RunConfig& cfg, std::ostream& out) {
  if (cfg.eps_grid.empty()) throw ConfigError("eps grid is empty");
  for (double e : cfg.eps_grid) InstantonParams::with_default_ell(e);
  const Setup s = setup(cfg, cfg.nr, cfg.ntheta);
  const ThresholdVerdict v = verify_threshold(s.split, s.problem, cfg.eps_grid, cfg.margin);
  const SweepFit fit = fit_sweep(v.reports, cfg.dim);

  auto f = open_out(out_path(cfg, "instanton_sweep.csv"));
  f << "eps,ell,dirichlet,mass,critical_alpha,critical_0,rayleigh,fiber_max,threshold\n";
  for (const auto& r : v.reports) {
    f << num(r.params.eps) << "," << num(r.params.ell) << "," << num(r.dirichlet) << ","
      << num(r.mass) << "," << num(r.critical_alpha) << "," << num(r.critical_0) << ","
      << num(r.rayleigh) << "," << (r.projection_ok ? num(r.fiber_max) : "nan") << ","
      << num(r.threshold) << "\n";
  }

  json reports = json::array();
  for (const auto& r : v.reports) reports.push_back(instanton_json(r));
  const auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json c{{"config", resolved_config(cfg, s)},
         {"grid", grid_json(*s.base.grid)},
         {"split", split_json(s.split)},
         {"sobolev_constant", sobolev_constant(cfg.dim)},
         {"threshold", v.threshold},
         {"verdict",
          {{"holds", v.holds},
           {"witness_eps", opt(v.witness_eps)},
           {"margin", v.margin},
           {"projection_failures", v.failures}}},
         {"fit",
          {{"deficit_slope", opt(fit.deficit_slope)},
           {"mass_slope", opt(fit.mass_slope)},
           {"fitted", cfg.dim != 4}}},
         {"reports", std::move(reports)}};
  write_json(out_path(cfg, "instanton.json"), make_report("instanton", std::move(c), cfg.timestamp));

  out << "threshold (1/N) S^{N/2} = " << num(v.threshold) << "\n"
      << "verdict = " << (v.holds ? "holds" : "not shown");
  if (v.witness_eps) out << " (witness eps = " << num(*v.witness_eps) << ")";
  out << "\n";
  return v.failures == static_cast<int>(v.reports.size()) ? kExitNumerical : kExitOk;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.scan_points < 1) throw ConfigError("scan range has no points");
  RunConfig first = cfg;
  first.lambda = "0";
  const Setup s = setup(first, cfg.nr, cfg.ntheta);
  const double lambda1 = s.spectrum.eigvals.front();
  const LambdaSpec fixed = LambdaSpec::parse(cfg.lambda);

  struct Row {
    double value = 0.0, lambda = 0.0, alpha = 0.0;
    int m = -1;
    double level_c = std::nan("");
    bool converged = false;
    std::optional<int> morse;
    std::optional<bool> sign;
    std::string status;
  };
  const int n = cfg.scan_points;
  std::vector<Row> rows(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    rows[i].value = cfg.scan_from + t * (cfg.scan_to - cfg.scan_from);
    if (cfg.scan_param == "lambda") {
      rows[i].lambda = rows[i].value * lambda1;
      rows[i].alpha = cfg.alpha;
    } else {
      rows[i].lambda = fixed.resolve(s.spectrum);
      rows[i].alpha = rows[i].value;
    }
  }

  const SolverConfig sc = solver_config(cfg);
  const auto work = [&](Row& row) {
    try {
      const Problem p = s.base.with_spec(ProblemSpec::make(cfg.dim, row.lambda, row.alpha));
      const SubspaceSplit split = split_space(p.spec, s.spectrum);
      row.m = split.m;
      const GroundStateReport rep = minimize_over_Y(split, p, sc);
      row.level_c = rep.level_c;
      row.converged = rep.converged;
      row.sign = rep.changes_sign;
      row.status = rep.status;
      if (rep.converged) {
        try {
          row.morse = morse_index(rep.u, p, morse_count(cfg, split.m)).index;
        } catch (const Error&) {
        }
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  };
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) work(rows[i]);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min(cfg.workers, n); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const double threshold = compactness_threshold(cfg.dim);
  auto f = open_out(out_path(cfg, "scan.csv"));
  f << (cfg.scan_param == "lambda" ? "lambda_factor" : "alpha_value") << ",lambda,alpha,m,level_c,threshold,converged,morse,sign_change,status\n";
  json jrows = json::array();
  int converged = 0;
  for (const Row& r : rows) {
    converged += r.converged;
    f << num(r.value) << "," << num(r.lambda) << "," << num(r.alpha) << "," << r.m << ","
      << num(r.level_c) << "," << num(threshold) << "," << (r.converged ? 1 : 0) << ","
      << (r.morse ? std::to_string(*r.morse) : "") << ","
      << (r.sign ? (*r.sign ? "1" : "0") : "") << ",\"" << r.status << "\"\n";
    jrows.push_back({{"value", r.value},
                     {"lambda", r.lambda},
                     {"alpha", r.alpha},
                     {"m", r.m},
                     {"level_c", r.level_c},
                     {"converged", r.converged},
                     {"morse", r.morse ? json(*r.morse) : json(nullptr)},
                     {"sign_change", r.sign ? json(*r.sign) : json(nullptr)},
                     {"status", r.status}});
  }
  json c{{"config", cfg.to_json()},
         {"grid", grid_json(*s.base.grid)},
         {"lambda_1", lambda1},
         {"threshold", threshold},
         {"rows", std::move(jrows)}};
  write_json(out_path(cfg, "scan.json"), make_report("scan", std::move(c), cfg.timestamp));
  out << converged << " of " << n << " points converged\n";
  return converged > 0 ? kExitOk : kExitNotConverged;
}

int cmd_diag(const RunConfig& cfg, std::ostream& out) {
  if (cfg.field.empty()) throw ConfigError("diag needs --field");
  const CsvShape shape = probe_field_csv(cfg.field);
  const Setup s = setup(cfg, shape.nr, shape.ntheta);
  const Field u = read_field_csv(cfg.field, s.base.grid);
  const Field& e1 = s.spectrum.eigfields.front();
  const Problem& p = s.problem;

  const EnergyBreakdown e = energy(u, p);
  json c{{"config", resolved_config(cfg, s)},
         {"grid", grid_json(*s.base.grid)},
         {"split", split_json(s.split)},
         {"phi", e.phi},
         {"grad_norm", h_norm(h_gradient(u, p), p)},
         {"grad_scale", std::max(1.0, h_norm(u, p))},
         {"constraint_residual", constraint_F(u, s.split, p).residual()},
         {"sign", sign_json(sign_change(u, p.weights, &e1))},
         {"morse", try_morse(u, p, morse_count(cfg, s.split.m), nullptr)},
         {"symmetry", symmetry_json(polarization_invariants(u, p, e1))}};
  write_json(out_path(cfg, "diag.json"), make_report("diag", std::move(c), cfg.timestamp));
  out << "phi = " << num(e.phi) << "\n";
  return kExitOk;
}

}  // namespace henon::app
