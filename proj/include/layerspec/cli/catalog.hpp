#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "layerspec/surface/chart.hpp"
#include "layerspec/surface/graph.hpp"
#include "layerspec/surface/revolution.hpp"

namespace layerspec::cli {

using Params = std::map<std::string, double>;

enum class Construction { graph, meridian, profile, none };
const char* to_string(Construction c) noexcept;

struct BuiltSurface {
  std::shared_ptr<const surface::PolarChart> chart;
  std::optional<surface::GraphSurface> graph;          // graph entries
  std::optional<surface::RevolutionProfile> profile;   // revolution entries
};

struct CatalogEntry {
  std::string name;
  Construction construction = Construction::none;
  std::string provenance;
  std::string description;
  Params defaults;  // surface parameters plus s_max (and theta_samples for graphs)
  bool reference = false;  // outside the example list (the plane)
  /// Throws Error(capability) for documentation-only entries.
  BuiltSurface build(const Params& overrides = {}) const;
  std::function<BuiltSurface(const Params&)> builder;
};

/// The seven example surfaces, in a fixed order.
const std::vector<CatalogEntry>& catalog();
/// catalog() plus the plane reference surface.
const std::vector<CatalogEntry>& all_surfaces();
/// Throws Error(config) for unknown names.
const CatalogEntry& find_surface(const std::string& name);

// Individual constructions, also used by tests.
surface::GraphSurface hyperbolic_paraboloid_graph();
surface::GraphSurface monkey_saddle_graph();
surface::GraphSurface elliptic_paraboloid_graph(double x0, double y0);
surface::RevolutionProfile hyperboloid_profile(double z0, double s_max);
surface::MeridianSpec exm_meridian(double s_max);
surface::RevolutionProfile exm_profile(double s_max);

}  // namespace layerspec::cli
