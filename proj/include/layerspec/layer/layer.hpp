#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "layerspec/surface/chart.hpp"

namespace layerspec::layer {

using surface::PolarChart;

/// Sampled minimal normal curvature radius. `raw` is 1 / sup|k| over the
/// samples; `safe` divides by the safety factor as well. Planar charts give inf.
struct CurvatureRadius {
  double raw = std::numeric_limits<double>::infinity();
  double safe = std::numeric_limits<double>::infinity();
  double sup_abs_k = 0.0;
  double argmax_s = 0.0, argmax_theta = 0.0;
  bool planar() const { return sup_abs_k == 0.0; }
};

struct RadiusOptions {
  std::vector<double> probe_radii;  // empty: geometric schedule over the chart
  int samples_per_annulus = 64;
  int theta_samples = 64;           // ignored for axisymmetric charts
  double safety = 1.05;
};

CurvatureRadius rho_m(const PolarChart& chart, const RadiusOptions& options = {});

struct LayerOptions {
  bool force = false;  // accept a >= rho_m with a warning instead of an error
  RadiusOptions radius;
};

/// Layer of half-width a over a chart. Throws Error(hypothesis_violation) when
/// a >= rho_m (safety-adjusted) unless forced.
class LayerSpec {
 public:
  LayerSpec(std::shared_ptr<const PolarChart> chart, double a, const LayerOptions& options = {});

  const PolarChart& chart() const noexcept { return *chart_; }
  const std::shared_ptr<const PolarChart>& chart_ptr() const noexcept { return chart_; }
  double a() const noexcept { return a_; }
  double d() const noexcept { return 2.0 * a_; }
  double kappa(int n) const;
  double threshold() const { return kappa(1) * kappa(1); }
  const CurvatureRadius& curvature_radius() const noexcept { return radius_; }
  bool omega1() const noexcept { return a_ < radius_.safe; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::shared_ptr<const PolarChart> chart_;
  double a_;
  CurvatureRadius radius_;
  std::vector<std::string> warnings_;
};

/// 1 - 2 M u + K u^2.
double det_factor(const LayerSpec& layer, double s, double theta, double u);

/// Layer metric in the chart basis (d_s, d_theta, d_u).
struct LayerMetricSample {
  double G11 = 1.0, G12 = 0.0, G22 = 1.0, G33 = 1.0;
  double f = 1.0;       // det factor
  double sqrt_g = 1.0;  // r
  double sqrt_G = 1.0;  // r f
};

LayerMetricSample layer_metric(const LayerSpec& layer, double s, double theta, double u);
LayerMetricSample layer_metric(const surface::ChartSample& cs, double u);

/// (C-, C+) = ((1 - a/rho)^2, (1 + a/rho)^2) with the layer's safe rho_m.
std::pair<double, double> c_bounds(const LayerSpec& layer);
std::pair<double, double> c_bounds(double a, double rho);

/// chi_n(u) = sqrt(2/d) cos(kappa_n u) for odd n, sqrt(2/d) sin(kappa_n u) for even n.
struct TransverseMode {
  int n = 1;
  double a = 0.5;
  double kappa = 0.0;
  double operator()(double u) const;
  double derivative(double u) const;
};

TransverseMode transverse_mode(double a, int n);
TransverseMode transverse_mode(const LayerSpec& layer, int n);

struct EffectivePotential {
  double V2 = 0.0;         // (K - M^2) / f^2
  double K_minus_M2 = 0.0; // -(k1 - k2)^2 / 4
};

EffectivePotential effective_potential(const LayerSpec& layer, double s, double theta, double u);

/// Coarse self-intersection heuristic over sampled layer points (7 levels in u):
/// flags pairs closer than a/4 whose base points are farther apart than the
/// tube's inverse-Lipschitz bound allows. Never a proof of injectivity.
struct CollisionScan {
  bool collision_detected = false;
  std::size_t points = 0;
  double min_det_factor = 1.0;
  std::string note;
};

CollisionScan omega0_scan(const LayerSpec& layer, double s_limit = 0.0, int s_samples = 200, int theta_samples = 64);

}  // namespace layerspec::layer
