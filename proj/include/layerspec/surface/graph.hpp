#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "layerspec/num/ode.hpp"
#include "layerspec/surface/chart.hpp"

namespace layerspec::surface {

/// Height and partial derivatives up to third order.
struct HeightJet {
  double f = 0.0, fx = 0.0, fy = 0.0;
  double fxx = 0.0, fxy = 0.0, fyy = 0.0;
  double fxxx = 0.0, fxxy = 0.0, fxyy = 0.0, fyyy = 0.0;
};

struct GraphSurface {
  std::string name;
  std::function<HeightJet(double, double)> jet;
  std::array<double, 2> pole{0.0, 0.0};
};

struct GraphCurvatures {
  double K, M, k1, k2;
};

/// Upward normal; an upward paraboloid has M > 0.
GraphCurvatures graph_curvatures(const GraphSurface& surf, double x, double y);

struct FanOptions {
  int theta_samples = 96;
  double s_max = 100.0;
  double tol = 1e-13;
};

/// Geodesic polar chart of a graph obtained by shooting geodesics from the pole.
/// Each ray co-integrates the scalar Jacobi equation and, independently, the
/// variational (Jacobi vector) field d/dtheta of the ray.
class GraphFanChart final : public PolarChart {
 public:
  GraphFanChart(GraphSurface surf, const FanOptions& options);

  ChartSample sample(double s, double theta) const override;
  Vec3 point(double s, double theta) const override;
  Vec3 normal(double s, double theta) const override;
  double s_max() const override { return s_max_; }
  Provenance provenance() const override { return Provenance::graph_shot; }
  std::string name() const override { return surf_.name; }
  std::vector<double> theta_nodes() const override { return thetas_; }
  std::vector<double> theta_weights() const override;
  std::pair<double, double> mean_gradient(double s, double theta) const override;

  /// |d p / d theta| from the variational field; equals r(s, theta) in exact arithmetic.
  double dtheta_point_norm(double s, double theta) const;
  /// Euclidean speed |dp/ds| along the ray.
  double speed(double s, double theta) const;
  const GraphSurface& surface() const noexcept { return surf_; }
  /// Plane position (x, y) of the chart point.
  std::array<double, 2> plane_point(double s, double theta) const;

  // State layout: x, y, xdot, ydot, r, rdot, Jx, Jy, Jxdot, Jydot.
  static constexpr std::size_t kStateSize = 10;

 private:
  std::shared_ptr<const num::OdeTrajectory> ray(double theta) const;
  num::OdeTrajectory shoot(double theta, double s_end, double* conjugate_s) const;

  GraphSurface surf_;
  FanOptions options_;
  std::vector<double> thetas_;
  std::vector<std::shared_ptr<const num::OdeTrajectory>> rays_;
  double s_max_ = 0.0;
  std::array<double, 2> e1_{}, e2_{};  // orthonormal frame at the pole, plane components
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const num::OdeTrajectory>> cache_;
};

std::shared_ptr<GraphFanChart> geodesic_fan(const GraphSurface& surf, const FanOptions& options);

}  // namespace layerspec::surface
