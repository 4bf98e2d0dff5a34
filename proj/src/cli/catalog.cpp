#include "layerspec/cli/catalog.hpp"

#include <cmath>

#include "layerspec/error.hpp"

namespace layerspec::cli {
namespace {

using surface::GraphSurface;
using surface::HeightJet;

double param(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw Error(ErrorKind::config, "missing surface parameter " + key);
  return it->second;
}

BuiltSurface graph_built(const GraphSurface& g, const Params& p) {
  surface::FanOptions fo;
  fo.s_max = param(p, "s_max");
  fo.theta_samples = static_cast<int>(param(p, "theta_samples"));
  BuiltSurface b;
  b.graph = g;
  b.chart = surface::geodesic_fan(g, fo);
  return b;
}

BuiltSurface revolution_built(surface::RevolutionProfile prof) {
  BuiltSurface b;
  b.chart = std::make_shared<surface::RevolutionChart>(prof);
  b.profile = std::move(prof);
  return b;
}

std::vector<CatalogEntry> make_catalog() {
  std::vector<CatalogEntry> c;
  c.push_back({"hyperbolic_paraboloid", Construction::graph, "z=x^2-y^2; asymptotically planar, total Gauss curvature -2 pi",
               "saddle z = x^2 - y^2, pole at the origin", {{"s_max", 1e4}, {"theta_samples", 96}}, false,
               [](const Params& p) { return graph_built(hyperbolic_paraboloid_graph(), p); }});
  c.push_back({"monkey_saddle", Construction::graph, "monkey saddle z=x^3-3xy^2; total Gauss curvature -4 pi",
               "monkey saddle z = x^3 - 3 x y^2, pole at the origin", {{"s_max", 1e4}, {"theta_samples", 96}}, false,
               [](const Params& p) { return graph_built(monkey_saddle_graph(), p); }});
  c.push_back({"elliptic_paraboloid", Construction::graph,
               "elliptic paraboloid z=(x/x_0)^2+(y/y_0)^2; total Gauss curvature 2 pi, total mean curvature infinite",
               "z = (x/x0)^2 + (y/y0)^2, pole at the vertex",
               {{"x0", 1.0}, {"y0", 1.0}, {"s_max", 1e4}, {"theta_samples", 96}}, false,
               [](const Params& p) { return graph_built(elliptic_paraboloid_graph(param(p, "x0"), param(p, "y0")), p); }});
  c.push_back({"hyperboloid", Construction::profile,
               "hyperboloid x^2+y^2-(z/z_0)^2=1 (upper sheet of the two-sheeted reading); surface of revolution",
               "upper sheet z = z0 sqrt(1 + x^2 + y^2), pole at the vertex", {{"z0", 1.0}, {"s_max", 1e8}}, false,
               [](const Params& p) { return revolution_built(hyperboloid_profile(param(p, "z0"), param(p, "s_max"))); }});
  c.push_back({"exm", Construction::meridian, "meridian curvature k_s(s):=s^{-2}sin s^2; total Gauss curvature ~1.38 pi",
               "surface of revolution generated by k_s = sin(s^2)/s^2", {{"s_max", 64.0}}, false,
               [](const Params& p) { return revolution_built(exm_profile(param(p, "s_max"))); }});
  c.push_back({"capped_cylinder", Construction::profile,
               "semi-cylinder of radius R closed by a hemisphere; not asymptotically planar",
               "hemisphere of radius R joined to a half-infinite cylinder", {{"R", 1.0}, {"s_max", 64.0}}, false,
               [](const Params& p) {
                 return revolution_built(surface::RevolutionProfile::capped_cylinder(param(p, "R"), param(p, "s_max")));
               }});
  c.push_back({"ex_pole", Construction::none, "surface without poles; documentation only",
               "a complete surface with no point whose exponential map is a global diffeomorphism; no polar chart exists",
               {}, false, {}});
  return c;
}

}  // namespace

const char* to_string(Construction c) noexcept {
  switch (c) {
    case Construction::graph: return "graph";
    case Construction::meridian: return "meridian";
    case Construction::profile: return "profile";
    case Construction::none: return "none";
  }
  return "unknown";
}

BuiltSurface CatalogEntry::build(const Params& overrides) const {
  if (!builder) throw Error(ErrorKind::capability, name + " has no polar chart; it is documentation only");
  Params p = defaults;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k)) throw Error(ErrorKind::config, name + ": unknown surface parameter " + k);
    p[k] = v;
  }
  return builder(p);
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = make_catalog();
  return c;
}

const std::vector<CatalogEntry>& all_surfaces() {
  static const std::vector<CatalogEntry> all = [] {
    auto v = catalog();
    v.push_back({"plane", Construction::profile, "flat reference surface", "the plane z = 0, pole at the origin",
                 {{"s_max", 1e4}}, true,
                 [](const Params& p) { return revolution_built(surface::RevolutionProfile::plane(param(p, "s_max"))); }});
    return v;
  }();
  return all;
}

const CatalogEntry& find_surface(const std::string& name) {
  for (const auto& e : all_surfaces()) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::config, "unknown surface: " + name);
}

GraphSurface hyperbolic_paraboloid_graph() {
  return {"hyperbolic_paraboloid", [](double x, double y) {
            HeightJet j;
            j.f = x * x - y * y;
            j.fx = 2 * x;
            j.fy = -2 * y;
            j.fxx = 2;
            j.fyy = -2;
            return j;
          }};
}

GraphSurface monkey_saddle_graph() {
  return {"monkey_saddle", [](double x, double y) {
            HeightJet j;
            j.f = x * x * x - 3 * x * y * y;
            j.fx = 3 * x * x - 3 * y * y;
            j.fy = -6 * x * y;
            j.fxx = 6 * x;
            j.fxy = -6 * y;
            j.fyy = -6 * x;
            j.fxxx = 6;
            j.fxyy = -6;
            return j;
          }};
}

GraphSurface elliptic_paraboloid_graph(double x0, double y0) {
  if (!(x0 > 0) || !(y0 > 0)) throw Error(ErrorKind::config, "elliptic_paraboloid: x0, y0 must be positive");
  const double ax = 1 / (x0 * x0), ay = 1 / (y0 * y0);
  return {"elliptic_paraboloid", [ax, ay](double x, double y) {
            HeightJet j;
            j.f = ax * x * x + ay * y * y;
            j.fx = 2 * ax * x;
            j.fy = 2 * ay * y;
            j.fxx = 2 * ax;
            j.fyy = 2 * ay;
            return j;
          }};
}

surface::RevolutionProfile hyperboloid_profile(double z0, double s_max) {
  if (!(z0 > 0)) throw Error(ErrorKind::config, "hyperboloid: z0 must be positive");
  return surface::RevolutionProfile::from_height(
      "hyperboloid",
      [z0](double rho) {
        const double q = std::sqrt(1 + rho * rho);
        const double q3 = q * q * q;
        return surface::HeightProfileJet{z0 * q, z0 * rho / q, z0 / q3, -3 * z0 * rho / (q3 * q * q)};
      },
      s_max);
}

surface::MeridianSpec exm_meridian(double s_max) {
  surface::MeridianSpec ms;
  ms.k_s = [](double s) {
    const double t = s * s;
    return t < 1e-3 ? 1 - t * t / 6 + t * t * t * t / 120 : std::sin(t) / t;
  };
  ms.dk_s = [](double s) {
    const double t = s * s;
    return t < 1e-3 ? -2 * t * s / 3 + t * t * t * s / 15 : 2 * std::cos(t) / s - 2 * std::sin(t) / (t * s);
  };
  ms.s_max = s_max;
  return ms;
}

surface::RevolutionProfile exm_profile(double s_max) {
  return surface::RevolutionProfile::from_meridian("exm", exm_meridian(s_max));
}

}  // namespace layerspec::cli
