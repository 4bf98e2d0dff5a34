#include "layerspec/cli/run.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "layerspec/cli/catalog.hpp"
#include "layerspec/layer/layer.hpp"
#include "layerspec/num/kernels.hpp"
#include "layerspec/spectrum/spectrum.hpp"
#include "layerspec/surface/hypotheses.hpp"
#include "layerspec/surface/totals.hpp"
#include "layerspec/varform/certify.hpp"

namespace layerspec::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json number_value(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

class Stopwatch {
 public:
  explicit Stopwatch(json& sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      sink_[name] = seconds_since(t0);
    } else {
      auto r = f();
      sink_[name] = seconds_since(t0);
      return r;
    }
  }
  static double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

 private:
  json& sink_;
};

struct Context {
  const CatalogEntry* entry = nullptr;
  Params params;
  BuiltSurface surface;
};

Context build_surface(const RunConfig& cfg) {
  const std::string name = cfg.text("surface.name");
  if (name.empty()) throw Error(ErrorKind::config, "surface.name is required for this command");
  Context ctx;
  ctx.entry = &find_surface(name);
  ctx.params = ctx.entry->defaults;
  for (const auto& [k, v] : cfg.surface_params()) {
    if (!ctx.entry->defaults.count(k)) {
      throw Error(ErrorKind::config, "surface '" + name + "' has no parameter '" + k + "'");
    }
    ctx.params[k] = v;
  }
  ctx.surface = ctx.entry->build(ctx.params);
  return ctx;
}

layer::LayerSpec build_layer(const Context& ctx, const RunConfig& cfg, bool force) {
  layer::LayerOptions o;
  o.force = force;
  return layer::LayerSpec(ctx.surface.chart, cfg.number("layer.a"), o);
}

json surface_json(const Context& ctx) {
  json j;
  j["name"] = ctx.entry->name;
  j["construction"] = to_string(ctx.entry->construction);
  j["provenance"] = ctx.entry->provenance;
  j["description"] = ctx.entry->description;
  json p = json::object();
  for (const auto& [k, v] : ctx.params) p[k] = exact(v);
  j["parameters"] = p;
  const auto& chart = *ctx.surface.chart;
  j["chart"] = {{"name", chart.name()},
                {"provenance", surface::to_string(chart.provenance())},
                {"s_max", exact(chart.s_max())},
                {"axisymmetric", chart.axisymmetric()}};
  json kinks = json::array();
  for (double k : chart.kinks()) kinks.push_back(exact(k));
  j["chart"]["kinks"] = kinks;
  j["chart"]["warnings"] = chart.warnings();
  return j;
}

json layer_json(const layer::LayerSpec& L) {
  const auto& rho = L.curvature_radius();
  json j{{"a", exact(L.a())},
         {"d", exact(L.d())},
         {"kappa1_sq", exact(L.threshold())},
         {"rho_m", {{"raw", measured(rho.raw, 0.0)}, {"safe", measured(rho.safe, 0.0)}, {"sampled", true}}},
         {"omega1", {{"pass", L.omega1()}}},
         {"warnings", L.warnings()}};
  if (L.omega1()) {
    const auto [cm, cp] = layer::c_bounds(L);
    j["c_minus"] = exact(cm);
    j["c_plus"] = exact(cp);
  } else {
    j["c_minus"] = j["c_plus"] = "undefined (a >= rho_m)";
  }
  return j;
}

json estimate_json(const surface::TotalCurvatureEstimate& e) {
  json partials = json::array();
  for (std::size_t i = 0; i < e.radii.size(); ++i) {
    partials.push_back({{"radius", exact(e.radii[i])}, {"partial", measured(e.partials[i], e.quadrature_error)}});
  }
  return {{"value", number_value(e.value)}, {"error", number_value(e.error)}, {"divergent", e.divergent},
          {"tail", measured(e.tail, e.error)}, {"ratio", measured(e.ratio, 0.0)},
          {"quadrature_error", exact(e.quadrature_error)}, {"partials", partials}};
}

json verdict_json(surface::Verdict v) {
  return {{"verdict", surface::to_string(v)}, {"pass", v == surface::Verdict::pass}};
}

double eff_s_max(double requested, const surface::PolarChart& chart) {
  return requested > 0.0 ? std::min(requested, chart.s_max()) : chart.s_max();
}

void add_partials(CsvTable& t, const std::string& q, const surface::TotalCurvatureEstimate& e) {
  for (std::size_t i = 0; i < e.radii.size(); ++i) t.rows.push_back({q, cell(e.radii[i]), cell(e.partials[i])});
}

// ---------------------------------------------------------------- commands

void run_describe(const RunConfig& cfg, bool force, RunOutput& out) {
  const auto ctx = build_surface(cfg);
  const auto L = build_layer(ctx, cfg, force);
  out.report["surface"] = surface_json(ctx);
  out.report["layer"] = layer_json(L);
  const auto& chart = *ctx.surface.chart;
  const double s_lo = cfg.number("describe.s_min");
  const double s_hi = std::min(cfg.number("describe.s_max"), chart.s_max());
  const int ns = cfg.integer("describe.s_samples");
  const int nt = chart.axisymmetric() ? 1 : cfg.integer("describe.theta_samples");
  if (!(s_lo > 0.0 && s_hi > s_lo && ns >= 2 && nt >= 1)) {
    throw Error(ErrorKind::config, "describe needs 0 < s_min < s_max and at least 2 radii");
  }
  CsvTable t{"samples", {"s", "theta", "r", "K", "M", "k1", "k2"}, {}};
  for (int i = 0; i < ns; ++i) {
    const double s = s_lo * std::pow(s_hi / s_lo, double(i) / (ns - 1));
    for (int j = 0; j < nt; ++j) {
      const double th = 2.0 * std::numbers::pi * j / nt;
      const auto cs = chart.sample(s, th);
      t.rows.push_back({cell(s), cell(th), cell(cs.r), cell(cs.K), cell(cs.M), cell(cs.k1), cell(cs.k2)});
    }
  }
  out.report["samples"] = {{"radii", exact(ns)}, {"angles", exact(nt)}, {"table", "describe_samples.csv"}};
  out.tables.push_back(std::move(t));
  out.summary.push_back(ctx.entry->name + ": kappa1^2 = " + cell(L.threshold()) + ", rho_m = " +
                        cell(L.curvature_radius().safe));
}

void run_check(const RunConfig& cfg, bool force, RunOutput& out, Stopwatch& sw) {
  const auto ctx = build_surface(cfg);
  out.report["surface"] = surface_json(ctx);
  const auto& chart = *ctx.surface.chart;
  const auto radii = surface::geometric_schedule(cfg.number("check.s0"), eff_s_max(cfg.number("check.s_max"), chart));
  const auto rep = sw.time("hypotheses", [&] { return surface::hypotheses_report(chart, radii); });
  json h;
  h["sigma0"] = verdict_json(rep.sigma0);
  h["sigma1"] = verdict_json(rep.sigma1);
  h["sigma1"]["total_abs_gauss"] = estimate_json(rep.sigma1_abs_gauss);
  h["sigma2"] = verdict_json(rep.sigma2);
  h["sigma2"]["total_grad_mean_sq"] = estimate_json(rep.sigma2_grad_mean);
  h["growth_constant"] = measured(rep.growth_constant, 0.0);
  h["notes"] = rep.notes;
  out.report["hypotheses"] = h;
  CsvTable annuli{"annuli", {"s_inner", "s_outer", "sup_abs_K", "sup_abs_M"}, {}};
  for (const auto& a : rep.sigma0_annuli) {
    annuli.rows.push_back({cell(a.s_inner), cell(a.s_outer), cell(a.sup_abs_K), cell(a.sup_abs_M)});
  }
  out.tables.push_back(std::move(annuli));

  // The layer hypotheses come last so a failing <Omega1> still reports the surface.
  const auto L = build_layer(ctx, cfg, force);
  out.report["layer"] = layer_json(L);
  if (cfg.boolean("check.omega0_scan")) {
    const auto scan = sw.time("omega0_scan", [&] { return layer::omega0_scan(L); });
    out.report["omega0_scan"] = {{"collision_detected", scan.collision_detected},
                                 {"points", exact(double(scan.points))},
                                 {"min_det_factor", measured(scan.min_det_factor, 0.0)},
                                 {"note", scan.note},
                                 {"heuristic", true}};
  }
  out.summary.push_back(std::string("sigma0 ") + surface::to_string(rep.sigma0) + ", sigma1 " +
                        surface::to_string(rep.sigma1) + ", sigma2 " + surface::to_string(rep.sigma2) +
                        ", omega1 " + (L.omega1() ? "pass" : "fail (forced)"));
}

void run_totals(const RunConfig& cfg, RunOutput& out, Stopwatch& sw) {
  const auto ctx = build_surface(cfg);
  out.report["surface"] = surface_json(ctx);
  const auto& chart = *ctx.surface.chart;
  const auto radii = surface::geometric_schedule(cfg.number("totals.s0"), eff_s_max(cfg.number("totals.s_max"), chart));
  surface::TotalsOptions o;
  o.rel_tol = cfg.number("totals.rel_tol");
  o.angular_tol = cfg.number("totals.angular_tol");
  const auto K = sw.time("total_gauss", [&] { return surface::total_gauss(chart, radii, o); });
  const auto M = sw.time("total_mean_sq", [&] { return surface::total_mean_sq(chart, radii, o); });
  out.report["total_gauss"] = estimate_json(K);
  out.report["total_mean_sq"] = estimate_json(M);
  if (ctx.surface.profile && !K.divergent) {
    try {
      const auto gb = surface::gauss_bonnet_residual(*ctx.surface.profile, radii);
      out.report["gauss_bonnet"] = {{"residual", measured(gb.residual, K.error)},
                                    {"rdot_end", measured(gb.rdot_end, 0.0)},
                                    {"S", exact(gb.S)}};
    } catch (const Error& e) {
      out.report["gauss_bonnet"] = {{"skipped", e.what()}};
    }
  }
  CsvTable t{"partials", {"quantity", "radius", "partial"}, {}};
  add_partials(t, "total_gauss", K);
  add_partials(t, "total_mean_sq", M);
  out.tables.push_back(std::move(t));
  out.summary.push_back("total Gauss curvature " + cell(K.value) + " +- " + cell(K.error) +
                        (K.divergent ? " (divergent)" : ""));
  out.summary.push_back("total mean curvature squared " + cell(M.value) + " +- " + cell(M.error) +
                        (M.divergent ? " (divergent)" : ""));
}

json params_json(const std::vector<std::pair<std::string, double>>& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = exact(v);
  return j;
}

std::string params_cell(const std::vector<std::pair<std::string, double>>& p) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : ";") + k + "=" + cell(v);
  return s;
}

varform::FormOptions form_options(const RunConfig& cfg) {
  varform::FormOptions f;
  f.rel_tol = f.theta_rel_tol = cfg.number("solver.tol");
  f.u_points = cfg.integer("solver.u_points");
  f.u_points_check = f.u_points + 8;
  return f;
}

void run_certify(const RunConfig& cfg, bool force, RunOutput& out, Stopwatch& sw) {
  const auto ctx = build_surface(cfg);
  const auto L = build_layer(ctx, cfg, force);
  out.report["surface"] = surface_json(ctx);
  out.report["layer"] = layer_json(L);
  varform::CertifyOptions o;
  o.strategies.clear();
  for (const auto& s : cfg.texts("certify.strategies")) o.strategies.push_back(varform::parse_strategy(s));
  if (o.strategies.empty()) throw Error(ErrorKind::config, "certify.strategies is empty");
  o.sigmas = cfg.numbers("certify.sigmas");
  o.ns = cfg.integers("certify.ns");
  o.s0 = cfg.number("certify.s0");
  o.margin = cfg.number("certify.margin");
  o.budget_seconds = cfg.number("certify.budget_seconds");
  o.form = form_options(cfg);
  const auto c = sw.time("certify", [&] { return varform::certify(L, o); });
  json j;
  j["verdict"] = c.certified ? "certified" : "not-found";
  j["total_gauss"] = measured(c.total_curvature, c.total_curvature_error);
  j["best_q_tilde"] = measured(c.best_q_tilde, 0.0);
  if (c.certified) {
    j["family"] = varform::to_string(c.family);
    j["params"] = params_json(c.params);
    j["q_tilde"] = measured(c.q_tilde, c.error);
    j["margin"] = measured(c.margin, 0.0);
  }
  j["notes"] = c.notes;
  j["attempts"] = exact(double(c.attempts.size()));
  out.report["certificate"] = j;
  CsvTable t{"attempts", {"family", "params", "q_tilde", "error"}, {}};
  json secs = json::array();
  for (const auto& a : c.attempts) {
    t.rows.push_back({varform::to_string(a.family), params_cell(a.params), cell(a.q_tilde), cell(a.error)});
    secs.push_back(a.seconds);
  }
  out.timings["attempts"] = secs;
  out.tables.push_back(std::move(t));
  out.summary.push_back(c.certified ? std::string("certified by ") + varform::to_string(c.family) + " (" +
                                          params_cell(c.params) + "): Q~ = " + cell(c.q_tilde) + " +- " + cell(c.error)
                                    : "not-found; best Q~ = " + cell(c.best_q_tilde));
}

json eigen_list(const spectrum::SpectrumResult& r) {
  json e = json::array();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    e.push_back({{"index", exact(double(i))},
                 {"eigenvalue", measured(r.eigenvalues[i], r.residuals[i] * std::max(1.0, std::abs(r.eigenvalues[i])))},
                 {"below_threshold", bool(r.below_threshold[i])}});
  }
  return e;
}

json mesh_json(const spectrum::AxisymMesh& m) {
  return {{"S", exact(m.S)},     {"h_s", exact(m.h_s)}, {"h_u", exact(m.h_u)}, {"n_s", exact(m.n_s)},
          {"n_u", exact(m.n_u)}, {"interface", exact(m.interface)},
          {"outer", m.outer == spectrum::OuterBoundary::dirichlet ? "dirichlet" : "neumann"}};
}

void run_spectrum(const RunConfig& cfg, bool force, RunOutput& out, Stopwatch& sw) {
  const auto ctx = build_surface(cfg);
  const auto L = build_layer(ctx, cfg, force);
  out.report["surface"] = surface_json(ctx);
  out.report["layer"] = layer_json(L);
  const double S = cfg.number("spectrum.S"), h_s = cfg.number("spectrum.h_s");
  const int n_u = cfg.integer("spectrum.n_u"), k = cfg.integer("spectrum.k"), levels = cfg.integer("spectrum.levels");
  if (levels < 1 || k < 1) throw Error(ErrorKind::config, "spectrum.k and spectrum.levels must be >= 1");
  num::EigenOptions eo;
  eo.tol = cfg.number("solver.eigen_tol");
  const auto mesh = spectrum::make_mesh(L, S, h_s, n_u);
  CsvTable t{"eigenvalues", {"m", "index", "eigenvalue", "threshold", "below_threshold", "mesh_h_s", "mesh_h_u", "S"}, {}};
  CsvTable conv{"convergence", {"m", "level", "mesh_h_s", "mesh_h_u", "lowest"}, {}};
  json waves = json::array();
  for (int m : cfg.integers("spectrum.m")) {
    const auto r = sw.time("m=" + std::to_string(m),
                           [&] { return spectrum::solve_spectrum(spectrum::assemble_partial_wave(L, m, mesh), k, L.threshold(), eo); });
    json w{{"m", exact(m)},
           {"threshold", exact(r.threshold)},
           {"discrete_threshold", exact(r.discrete_threshold)},
           {"eigenvalues", eigen_list(r)},
           {"mesh", mesh_json(r.mesh)}};
    int below = 0;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      below += r.below_threshold[i];
      t.rows.push_back({cell(m), cell(int(i)), cell(r.eigenvalues[i]), cell(r.discrete_threshold),
                        cell(bool(r.below_threshold[i])), cell(r.mesh.h_s), cell(r.mesh.h_u), cell(r.mesh.S)});
    }
    if (levels > 1) {
      std::vector<spectrum::RefinementRow> rows;
      const auto e = sw.time("refine m=" + std::to_string(m),
                             [&] { return spectrum::refine_lowest(L, m, S, h_s, n_u, levels, spectrum::OuterBoundary::dirichlet, &rows); });
      json table = json::array();
      for (std::size_t l = 0; l < rows.size(); ++l) {
        table.push_back({{"h_s", exact(rows[l].h_s)}, {"h_u", exact(rows[l].h_u)}, {"lowest", measured(rows[l].lowest, 0.0)}});
        conv.rows.push_back({cell(m), cell(int(l)), cell(rows[l].h_s), cell(rows[l].h_u), cell(rows[l].lowest)});
      }
      w["convergence"] = table;
      w["extrapolated_lowest"] = measured(e.value, e.error);
      w["observed_order"] = measured(e.order, 0.0);
    }
    waves.push_back(w);
    out.summary.push_back("m = " + std::to_string(m) + ": lowest " + cell(r.eigenvalues[0]) + ", " +
                          std::to_string(below) + " below the discrete threshold " + cell(r.discrete_threshold));
  }
  out.report["partial_waves"] = waves;
  out.tables.push_back(std::move(t));
  if (levels > 1) out.tables.push_back(std::move(conv));
}

void run_counterexample(const RunConfig& cfg, RunOutput& out, Stopwatch& sw) {
  const double R = cfg.number("counterexample.R"), a = cfg.number("layer.a");
  if (!(a > 0.0 && a < R)) throw Error(ErrorKind::hypothesis_violation, "counterexample needs 0 < a < R");
  const int rn = cfg.integer("counterexample.radial_n"), lv = cfg.integer("counterexample.levels");
  const double h_s = cfg.number("counterexample.h_s");
  const int n_u = cfg.integer("counterexample.n_u");
  out.report["inputs"] = {{"R", exact(R)}, {"a", exact(a)}};
  const auto rad = sw.time("radial", [&] { return spectrum::counterexample_radial(R, a, rn, lv); });
  const double kappa = rad.kappa1_sq;
  out.report["kappa1_sq"] = exact(kappa);
  out.report["radial"] = {{"eps1", measured(rad.eps1.value, rad.eps1.error)},
                          {"observed_order", measured(rad.eps1.order, 0.0)},
                          {"sandwich", {{"lower", exact(rad.lower)}, {"upper", exact(rad.upper)}}},
                          {"in_sandwich", rad.lower <= rad.eps1.value && rad.eps1.value <= rad.upper}};
  const auto shell = sw.time("shell", [&] { return spectrum::spherical_shell_ground(R, a, rn, lv); });
  out.report["spherical_shell"] = {{"ground", measured(shell.value, shell.error)},
                                   {"observed_order", measured(shell.order, 0.0)},
                                   {"relative_deviation", measured(std::abs(shell.value - kappa) / kappa, shell.error / kappa)}};
  const double hemi_h = std::min(h_s, 0.5 * std::numbers::pi * R / 32.0);
  const double hemi = sw.time("hemisphere", [&] { return spectrum::hemisphere_neumann_ground(R, a, hemi_h, n_u); });
  out.report["hemisphere_neumann"] = {{"ground", measured(hemi, cfg.number("solver.eigen_tol") * hemi)}};

  CsvTable t{"spectrum", {"S", "index", "eigenvalue", "eps1", "eps1_discrete", "kappa1_sq"}, {}};
  json runs = json::array();
  bool none_below = true;
  for (double mult : cfg.numbers("counterexample.S")) {
    const auto c = sw.time("S=" + cell(mult * R), [&] { return spectrum::counterexample_full(R, a, mult * R, h_s, n_u); });
    const bool ok = c.lowest_minus_eps1 >= -1e-9 * c.eps1_discrete;
    none_below = none_below && ok;
    runs.push_back({{"S", exact(c.spectrum.mesh.S)},
                    {"eigenvalues", eigen_list(c.spectrum)},
                    {"eps1_discrete", measured(c.eps1_discrete, 1e-12 * c.eps1_discrete)},
                    {"lowest_minus_eps1", measured(c.lowest_minus_eps1, 1e-9 * c.eps1_discrete)},
                    {"no_eigenvalue_below_eps1", ok},
                    {"mesh", mesh_json(c.spectrum.mesh)}});
    for (std::size_t i = 0; i < c.spectrum.eigenvalues.size(); ++i) {
      t.rows.push_back({cell(c.spectrum.mesh.S), cell(int(i)), cell(c.spectrum.eigenvalues[i]), cell(c.eps1),
                        cell(c.eps1_discrete), cell(c.kappa1_sq)});
    }
    out.summary.push_back("S = " + cell(c.spectrum.mesh.S) + ": lowest - eps1 (same u grid) = " + cell(c.lowest_minus_eps1));
  }
  out.report["full_layer"] = runs;
  out.report["verdict"] = none_below ? "no eigenvalue found below eps1 (truncated Dirichlet evidence, not a proof)"
                                     : "eigenvalue found below eps1";
  out.tables.push_back(std::move(t));
  out.summary.insert(out.summary.begin(), "eps1 = " + cell(rad.eps1.value) + " +- " + cell(rad.eps1.error) +
                                               " in [" + cell(rad.lower) + ", " + cell(rad.upper) + "]");
}

void run_catalog(RunOutput& out) {
  json list = json::array();
  for (const auto& e : all_surfaces()) {
    json p = json::object();
    for (const auto& [k, v] : e.defaults) p[k] = exact(v);
    list.push_back({{"name", e.name},
                    {"construction", to_string(e.construction)},
                    {"provenance", e.provenance},
                    {"description", e.description},
                    {"defaults", p},
                    {"reference", e.reference}});
    out.summary.push_back(e.name + " [" + to_string(e.construction) + "] " + e.description);
  }
  out.report["entries"] = list;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::config, "cannot write '" + p.string() + "'");
  f << s;
}

std::string csv_text(const CsvTable& t) {
  std::ostringstream o;
  const auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << v[i];
    o << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return o.str();
}

}  // namespace

json exact(double v) { return {{"value", number_value(v)}, {"exact", true}}; }
json measured(double v, double e) { return {{"value", number_value(v)}, {"error", number_value(e)}}; }

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::describe: return "describe";
    case Command::check: return "check";
    case Command::totals: return "totals";
    case Command::certify: return "certify";
    case Command::spectrum: return "spectrum";
    case Command::counterexample: return "counterexample";
    case Command::catalog: return "catalog";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::describe, Command::check, Command::totals, Command::certify, Command::spectrum,
                    Command::counterexample, Command::catalog}) {
    if (name == to_string(c)) return c;
  }
  throw Error(ErrorKind::config, "unknown command '" + name + "'");
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::hypothesis_violation: return 2;
    case ErrorKind::config:
    case ErrorKind::capability:
    case ErrorKind::invalid_input: return 4;
    default: return 3;
  }
}

RunOutput execute(Command command, const RunConfig& cfg, bool force) {
  RunOutput out;
  out.report = json::object();
  out.timings = json::object();
  Stopwatch sw(out.timings);
  const auto t0 = Clock::now();
  out.report["schema_version"] = kSchemaVersion;
  out.report["command"] = to_string(command);
  out.report["status"] = "ok";
  out.report["versions"] = {{"layerspec", kVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                          "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"kernels", num::simd::to_string(num::simd::active_backend())}};
  json inputs = json::object();
  for (const auto& [k, v] : cfg.values()) inputs[k] = v;
  inputs["force"] = force;
  out.report["config"] = inputs;
  switch (command) {
    case Command::describe: run_describe(cfg, force, out); break;
    case Command::check: run_check(cfg, force, out, sw); break;
    case Command::totals: run_totals(cfg, out, sw); break;
    case Command::certify: run_certify(cfg, force, out, sw); break;
    case Command::spectrum: run_spectrum(cfg, force, out, sw); break;
    case Command::counterexample: run_counterexample(cfg, out, sw); break;
    case Command::catalog: run_catalog(out); break;
  }
  out.timings["total"] = Stopwatch::seconds_since(t0);
  return out;
}

RunResult run(Command command, const RunConfig& cfg, const RunOptions& options) {
  namespace fs = std::filesystem;
  RunResult res;
  const fs::path dir = options.out_dir.empty() ? fs::path(cfg.text("output.dir")) : fs::path(options.out_dir);
  const std::string base = to_string(command);
  RunOutput out;
  try {
    out = execute(command, cfg, options.force);
  } catch (const Error& e) {
    res.exit_code = exit_code(e.kind());
    res.message = std::string(to_string(e.kind())) + ": " + e.what();
    out.report = {{"schema_version", kSchemaVersion},
                  {"command", base},
                  {"status", "error"},
                  {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}, {"exit_code", res.exit_code}}}};
  }
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::config, "cannot create output directory '" + dir.string() + "'");
    const auto report = dir / (base + ".json");
    write_text(report, out.report.dump(2) + "\n");
    res.files.push_back(report.string());
    if (res.exit_code == 0) {
      const auto timings = dir / (base + ".timings.json");
      write_text(timings, out.timings.dump(2) + "\n");
      res.files.push_back(timings.string());
      for (const auto& t : out.tables) {
        const auto p = dir / (base + "_" + t.name + ".csv");
        write_text(p, csv_text(t));
        res.files.push_back(p.string());
      }
      std::string msg;
      for (const auto& s : out.summary) msg += s + "\n";
      res.message = msg;
    }
  } catch (const Error& e) {
    res.exit_code = exit_code(e.kind());
    res.message = e.what();
  }
  return res;
}

}  // namespace layerspec::cli
