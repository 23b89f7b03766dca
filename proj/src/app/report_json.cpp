#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "henon/app.hpp"
#include "henon/error.hpp"
#include "serialize.hpp"

namespace henon::app {

using nlohmann::json;

std::string content_hash(const json& content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : content.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json make_report(const std::string& kind, json content, bool timestamp) {
  json r;
  r["schema"] = kSchemaVersion;
  r["kind"] = kind;
  r["content_hash"] = content_hash(content);
  r["content"] = std::move(content);
  if (timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    r["timestamp"] = buf;
  }
  return r;
}

void write_json(const std::string& path, const json& report) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << report.dump(2) << "\n";
}

json grid_json(const Grid& g) {
  return {{"dim", g.dim()}, {"nr", g.nr()}, {"ntheta", g.ntheta()}, {"dr", g.dr()},
          {"dtheta", g.dtheta()}, {"unknowns", g.interior_size()}};
}

json spectrum_json(const Spectrum& s) {
  return {{"eigenvalues", s.eigvals},
          {"angular_mode", s.angular_mode},
          {"radial_index", s.radial_index},
          {"max_residual", s.max_residual}};
}

json split_json(const SubspaceSplit& s) {
  return {{"m", s.m}, {"lambda", s.lambda}, {"z_eigenvalues", s.z_eigvals},
          {"next_eigenvalue", s.next_eigval}};
}

json ground_state_json(const GroundStateReport& r) {
  json j{{"level_c", r.level_c},
         {"f", r.f},
         {"g_coords", r.g_coords},
         {"grad_norm", r.grad_norm},
         {"grad_scale", r.grad_scale},
         {"constraint_residual", r.constraint_residual},
         {"changes_sign", r.changes_sign},
         {"theta_monotone_defect", r.theta_monotone_defect},
         {"reflected", r.reflected},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"status", r.status},
         {"m", r.m},
         {"energy_history", r.energy_history}};
  j["morse_index"] = r.morse_index ? json(*r.morse_index) : json(nullptr);
  return j;
}

json morse_json(const MorseResult& m) {
  return {{"symmetric_class_morse_index", m.index},
          {"hessian_eigenvalues", m.hessian_eigs},
          {"eps_morse", m.eps_morse},
          {"ambiguous", m.ambiguous},
          {"lanczos_steps", m.lanczos_steps}};
}

namespace {
json gap_json(const InvarianceGap& g) {
  return {{"before", g.before}, {"after", g.after}, {"gap", g.gap()}, {"relative", g.relative()}};
}
}  // namespace

json symmetry_json(const SymmetryReport& r) {
  return {{"halfspace", "equatorial (x.p >= 0)"},
          {"theta_monotone_defect", r.theta_monotone_defect},
          {"polarization_energy_gap", gap_json(r.energy)},
          {"invariance_gaps",
           {{"dirichlet", gap_json(r.dirichlet)},
            {"l2", gap_json(r.l2)},
            {"l_crit", gap_json(r.lcrit)},
            {"u_e1", gap_json(r.e1)},
            {"nonlinear_e1", gap_json(r.nl_e1)}}},
          {"max_relative_gap", r.max_relative_gap()},
          {"field_gap", r.field_gap}};
}

json sign_json(const SignChange& s) {
  json j{{"changes_sign", s.changes_sign}, {"min", s.min}, {"max", s.max}};
  j["u_e1"] = s.e1_projection ? json(*s.e1_projection) : json(nullptr);
  return j;
}

json instanton_json(const InstantonReport& r) {
  return {{"eps", r.params.eps},
          {"ell", r.params.ell},
          {"lambda", r.lambda},
          {"alpha", r.alpha},
          {"dirichlet", r.dirichlet},
          {"mass", r.mass},
          {"critical_alpha", r.critical_alpha},
          {"critical_0", r.critical_0},
          {"rayleigh", r.rayleigh},
          {"grid_dirichlet", r.grid_dirichlet},
          {"grid_mass", r.grid_mass},
          {"grid_critical", r.grid_critical},
          {"fiber_max", r.projection_ok ? json(r.fiber_max) : json(nullptr)},
          {"threshold", r.threshold},
          {"below_threshold", r.below_threshold},
          {"radially_resolved", r.radially_resolved},
          {"angularly_resolved", r.angularly_resolved},
          {"projection_ok", r.projection_ok},
          {"failure", r.failure}};
}

}  // namespace henon::app
