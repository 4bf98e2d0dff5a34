#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "layerspec/surface/chart.hpp"
#include "layerspec/surface/graph.hpp"
#include "layerspec/surface/revolution.hpp"

namespace layerspec::surface {

struct TotalCurvatureEstimate {
  double value = 0.0;                 // extrapolated limit, or the last partial value when divergent
  std::vector<double> radii;          // truncation radii used
  std::vector<double> partials;       // integral over the geodesic disk of each radius
  double tail = 0.0;                  // extrapolated contribution beyond the last radius
  double error = 0.0;                 // >= |last difference|
  double ratio = 0.0;                 // last ratio of successive differences
  bool divergent = false;
  double quadrature_error = 0.0;
  int angular_evaluations = 0;
};

struct TotalsOptions {
  double rel_tol = 1e-10;
  double divergence_ratio = 0.9;      // |q| at or above this flags divergence
  double blowup = 1e8;                // |partial| beyond this with no flattening flags divergence
  double angular_tol = 1e-8;          // relative tolerance of the adaptive theta quadrature
};

/// Geometric schedule s0, 2 s0, 4 s0, ... capped at s_max (s_max itself is included).
std::vector<double> geometric_schedule(double s0, double s_max);

/// int int f(sample) r ds dtheta over geodesic disks of the given radii.
TotalCurvatureEstimate total_integral(const PolarChart& chart, const std::vector<double>& radii,
                                      const std::function<double(const ChartSample&)>& density,
                                      const TotalsOptions& options = {});

TotalCurvatureEstimate total_gauss(const PolarChart& chart, const std::vector<double>& radii,
                                   const TotalsOptions& options = {});
TotalCurvatureEstimate total_mean_sq(const PolarChart& chart, const std::vector<double>& radii,
                                     const TotalsOptions& options = {});
TotalCurvatureEstimate total_abs_gauss(const PolarChart& chart, const std::vector<double>& radii,
                                       const TotalsOptions& options = {});
TotalCurvatureEstimate total_grad_mean_sq(const PolarChart& chart, const std::vector<double>& radii,
                                          const TotalsOptions& options = {});

/// int int K sqrt(1 + |grad f|^2) dx dy over plane disks around the pole.
TotalCurvatureEstimate cartesian_total_gauss(const GraphSurface& surf, const std::vector<double>& plane_radii,
                                             const TotalsOptions& options = {});

/// Summary statistics from the sequence of partial values.
void extrapolate(TotalCurvatureEstimate& est, const TotalsOptions& options);

struct GaussBonnetCheck {
  double residual = 0.0;   // |K_total + 2 pi rdot(S) - 2 pi|
  double total = 0.0;
  double rdot_end = 0.0;
  double S = 0.0;
};

/// Throws Error(no_limit) when rdot does not settle over the schedule.
GaussBonnetCheck gauss_bonnet_residual(const RevolutionProfile& profile, const std::vector<double>& radii = {});

}  // namespace layerspec::surface
