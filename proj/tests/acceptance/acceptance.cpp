// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <json.hpp>

#include "../oracles.hpp"
#include "../support.hpp"
#include "henon/app.hpp"
#include "henon/diagnostics.hpp"
#include "henon/functional.hpp"
#include "henon/instanton.hpp"
#include "henon/nehari.hpp"

using namespace henon;
using henon::test::rel_err;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Sobolev constant from its definition in terms of the Aubin-Talenti bubble
// U(x) = (1 + |x|²)^{-(N-2)/2}: S = ∫|∇U|² / (∫U^{2*})^{(N-2)/N}, both integrals
// in closed form through Beta functions.
double sobolev_from_bubble(int n) {
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  const auto beta = [](double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); };
  // ∫_0^∞ r^{N+1} (1+r²)^{-N} dr and ∫_0^∞ r^{N-1} (1+r²)^{-N} dr
  const double grad = (n - 2.0) * (n - 2.0) * area * 0.5 * beta(0.5 * n + 1.0, 0.5 * n - 1.0);
  const double crit = area * 0.5 * beta(0.5 * n, 0.5 * n);
  return grad / std::pow(crit, (n - 2.0) / n);
}

struct Run {
  int m = 0;
  double alpha = 0.0;
  double factor = 0.0;
  GroundStateReport rep;
  const test::Fixture* fx = nullptr;
  double secs = 0.0;
};

Run make_run(int m, double alpha, double factor) {
  Run r;
  r.m = m;
  r.alpha = alpha;
  r.factor = factor;
  return r;
}

}  // namespace

int main() {
  const int nr = 256;
  const int nt = 64;

  // 1. Dirichlet eigenvalues against Bessel zeros
  {
    const auto t0 = Clock::now();
    const Problem base = Problem::build(ProblemSpec::make(3, 0.0, 0.0), nr, nt);
    const Spectrum sp = dirichlet_spectrum(base.op, 4);
    const double secs = seconds_since(t0);
    const double l1 = std::pow(boost::math::cyl_bessel_j_zero(0.5, 1), 2);
    const double l2 = std::pow(boost::math::cyl_bessel_j_zero(1.5, 1), 2);
    const double e1 = rel_err(sp.eigvals[0], l1);
    const double e2 = rel_err(sp.eigvals[1], l2);
    verdict(1, e1 <= 5e-3 && e2 <= 1e-2 && secs <= 30.0,
            fmt("lambda1=%.6f (ref %.6f, rel %.2e) lambda2=%.6f (ref %.6f, rel %.2e) %.2fs",
                sp.eigvals[0], l1, e1, sp.eigvals[1], l2, e2, secs));
  }

  // 2. one-dimensional fiber maximum vs golden section
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(0.1, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double a = ud(rng);
      const double b = ud(rng);
      const int n = 4 + k % 3;
      const double q = 2.0 * n / (n - 2.0);
      const auto g = [&](double t) { return 0.5 * a * t * t - b * std::pow(t, q) / q; };
      // g vanishes again at t0 = (qa/2b)^{1/(q-2)}; the maximum lies in (0, t0)
      const double tz = std::pow(q * a / (2.0 * b), 1.0 / (q - 2.0));
      worst = std::max(worst, rel_err(calculus_max(a, b, n).value, oracle::golden_section_max(g, 0.0, tz)));
    }
    const double secs = seconds_since(t0);
    verdict(2, worst <= 1e-8 && secs <= 1.0, fmt("max rel err %.2e over 100 draws, %.3fs", worst, secs));
  }

  // 3. gradient and Hessian against finite differences
  {
    const test::Fixture& f = test::fixture(5, 1.1, 0.05, 64, 16);
    std::mt19937_64 rng(33);
    const double h = 1e-5;
    double worst_g = 0.0;
    double worst_h = 0.0;
    for (int k = 0; k < 20; ++k) {
      Field u = random_smooth_field(f.p.grid, rng);
      u *= 1.5 / u.max_abs();
      Field v = random_smooth_field(f.p.grid, rng);
      v *= 1.0 / v.max_abs();
      const double fd = (energy(u + h * v, f.p).phi - energy(u - h * v, f.p).phi) / (2.0 * h);
      worst_g = std::max(worst_g, rel_err(h_inner(h_gradient(u, f.p), v, f.p.weights), fd));
      const Field dg = (1.0 / (2.0 * h)) * (h_gradient(u + h * v, f.p) - h_gradient(u - h * v, f.p));
      const Field hv = hessian_apply(u, v, f.p);
      worst_h = std::max(worst_h, h_norm(hv - dg, f.p) / h_norm(hv, f.p));
    }
    verdict(3, worst_g <= 1e-5 && worst_h <= 1e-4,
            fmt("gradient rel err %.2e, Hessian rel err %.2e over 20 pairs", worst_g, worst_h));
  }

  // 4. m = 0 projection vs the closed-form scaling
  {
    const test::Fixture& f = test::fixture(5, 0.5, 0.0, nr, nt);
    std::mt19937_64 rng(44);
    const double q = f.p.crit_exp();
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      Field v = random_smooth_field(f.p.grid, rng, 6, 6);
      v *= 1.0 / h_norm(v, f.p);
      const double a = h_inner(v, v, f.p.weights) - f.p.spec.lambda * l2_inner(v, v, f.p.weights);
      double b = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) b += f.p.weights.w[i] * std::pow(std::abs(v[i]), q);
      const NehariPoint pt = project_to_nehari(v, f.split, f.p);
      worst = std::max(worst, rel_err(pt.f, std::pow(a / b, 1.0 / (q - 2.0))));
    }
    verdict(4, f.split.m == 0 && worst <= 1e-10,
            fmt("m=%d, max rel err in t* %.2e over 50 directions", f.split.m, worst));
  }

  // 5. m = 1 projection vs a brute-force 2D fiber search
  {
    const test::Fixture& f = test::fixture(5, 1.1, 0.0, 128, 32);
    std::mt19937_64 rng(55);
    const Field& e1 = f.spectrum.eigfields[0];
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Field v0 = random_smooth_field(f.p.grid, rng, 6, 6);
      const NehariPoint pt = project_to_nehari(v0, f.split, f.p);
      const auto ref = oracle::brute_force_fiber_max(pt.v, e1, f.p, 3.0 * pt.f,
                                                     3.0 * std::abs(pt.g_coords[0]) + pt.f);
      worst = std::max(worst, rel_err(pt.phi, ref.phi));
    }
    verdict(5, f.split.m == 1 && worst <= 1e-6,
            fmt("m=%d, max rel err in phi %.2e over 5 directions (128x32)", f.split.m, worst));
  }

  // ground states shared by 6, 7, 9, 10, 11
  std::vector<Run> runs;
  for (double a : {0.0, 0.05}) runs.push_back(make_run(0, a, 0.5));
  for (double a : {0.0, 0.05, 0.1}) runs.push_back(make_run(1, a, 1.1));
  for (Run& r : runs) {
    r.fx = &test::fixture(5, r.factor, r.alpha, nr, nt);
    const auto t0 = Clock::now();
    r.rep = minimize_over_Y(r.fx->split, r.fx->p, SolverConfig{});
    r.secs = seconds_since(t0);
    std::printf("  solve lambda=%.1f*lambda1 alpha=%.2f: m=%d c=%.8f converged=%d iters=%d %.2fs\n",
                r.factor, r.alpha, r.rep.m, r.rep.level_c, r.rep.converged ? 1 : 0, r.rep.iterations,
                r.secs);
  }

  // 6. natural constraint: the full gradient vanishes
  {
    bool ok = true;
    double worst = 0.0;
    for (const Run& r : runs) {
      const Field g = h_gradient(r.rep.u, r.fx->p);
      const double scale = std::max(1.0, h_norm(r.rep.u, r.fx->p));
      const double rel = h_norm(g, r.fx->p) / scale;
      worst = std::max(worst, rel);
      ok = ok && r.rep.converged && r.rep.m == r.m && rel <= 1e-6;
    }
    verdict(6, ok, fmt("max ||grad phi||_H / scale %.2e over %zu runs (m in {0,1})", worst, runs.size()));
  }

  // 7. level below the compactness threshold
  {
    const double s = sobolev_from_bubble(5);
    const double thr = std::pow(s, 2.5) / 5.0;
    bool ok = rel_err(s, sobolev_constant(5)) <= 1e-12;
    std::ostringstream os;
    os << fmt("S=%.6f threshold=%.6f", s, thr);
    for (const Run& r : runs) {
      if (r.m != 1) continue;
      const double margin = (thr - r.rep.level_c) / thr;
      ok = ok && r.rep.converged && margin >= 0.01 && r.secs <= 600.0;
      os << fmt(" | alpha=%.2f c=%.6f margin=%.1f%%", r.alpha, r.rep.level_c, 100.0 * margin);
    }
    verdict(7, ok, os.str());
  }

  // 8. instanton asymptotics
  {
    const test::Fixture& f = test::fixture(5, 1.1, 0.0, nr, nt);
    const std::vector<double> eps{0.04, 0.02, 0.01};
    const double s = sobolev_from_bubble(5);
    std::vector<double> deficit, mass, rayleigh;
    for (double e : eps) {
      const InstantonReport r = instanton_report(InstantonParams::with_default_ell(e), f.split, f.p);
      rayleigh.push_back(r.rayleigh);
      deficit.push_back(s - r.rayleigh);
      mass.push_back(r.mass);
    }
    const auto ds = loglog_slope(eps, deficit);
    const auto ms = loglog_slope(eps, mass);
    const double finest = rel_err(rayleigh.back(), s);
    const bool ok = finest <= 0.02 && ds && std::abs(*ds - 2.0) <= 0.2 && ms && std::abs(*ms - 2.0) <= 0.2;
    verdict(8, ok,
            fmt("Rayleigh %.4f/%.4f/%.4f (S=%.4f, finest-eps rel %.2e) deficit slope %.3f mass slope %.3f",
                rayleigh[0], rayleigh[1], rayleigh[2], s, finest, ds.value_or(NAN), ms.value_or(NAN)));
  }

  // 9. sign change above lambda_1
  {
    bool ok = true;
    std::ostringstream os;
    for (const Run& r : runs) {
      if (!(r.fx->p.spec.lambda > r.fx->spectrum.eigvals[0])) continue;
      const SignChange sc = sign_change(r.rep.u, r.fx->p.weights);
      ok = ok && r.rep.converged && sc.changes_sign;
      os << fmt(" | alpha=%.2f min=%.3e max=%.3e", r.alpha, sc.min, sc.max);
    }
    verdict(9, ok, os.str().substr(3));
  }

  // 10. symmetric-class Morse index m + 1
  {
    bool ok = true;
    std::ostringstream os;
    for (const Run& r : runs) {
      const MorseResult mr = morse_index(r.rep.u, r.fx->p, r.m + 3);
      ok = ok && mr.index == r.m + 1 && !mr.ambiguous;
      os << fmt(" | m=%d alpha=%.2f index=%d lowest=%.4f next=%.4f", r.m, r.alpha, mr.index,
                mr.hessian_eigs[0], mr.hessian_eigs[static_cast<std::size_t>(mr.index)]);
    }
    verdict(10, ok, os.str().substr(3));
  }

  // 11. polarization invariance for m = 1
  {
    bool ok = true;
    std::ostringstream os;
    for (const Run& r : runs) {
      if (r.m != 1) continue;
      const SymmetryReport sr = polarization_invariants(r.rep.u, r.fx->p, r.fx->spectrum.eigfields[0]);
      ok = ok && sr.max_relative_gap() <= 1e-10 && sr.energy.relative() <= 1e-10 && sr.field_gap <= 1e-4 &&
           sr.theta_monotone_defect <= 1e-4;
      os << fmt(" | alpha=%.2f gap=%.1e phi=%.1e field=%.1e mono=%.1e", r.alpha, sr.max_relative_gap(),
                sr.energy.relative(), sr.field_gap, sr.theta_monotone_defect);
    }
    verdict(11, ok, os.str().substr(3));
  }

  // 12. determinism of the solve command
  {
    const auto dir = std::filesystem::temp_directory_path() / "henon_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string out_dir = dir.string();
    const auto solve_once = [&]() {
      const char* argv[] = {"henon", "solve", "--alpha", "0.05", "--init", "random", "--seed", "9",
                            "-o", out_dir.c_str()};
      std::ostringstream out, err;
      const int code = app::run(10, argv, out, err);
      std::ifstream in(dir / "solve.json");
      nlohmann::json j = nlohmann::json::parse(in);
      j.erase("timestamp");
      std::ifstream csv(dir / "solution.csv");
      std::stringstream body;
      body << csv.rdbuf();
      return std::make_tuple(code, j.dump(), body.str());
    };
    const auto [c1, j1, s1] = solve_once();
    const auto [c2, j2, s2] = solve_once();
    std::filesystem::remove_all(dir);
    verdict(12, c1 == 0 && c2 == 0 && j1 == j2 && s1 == s2,
            fmt("exit codes %d/%d, report %s, field CSV %s", c1, c2, j1 == j2 ? "identical" : "differs",
                s1 == s2 ? "identical" : "differs"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
