#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "layerspec/layer/layer.hpp"
#include "layerspec/surface/chart.hpp"

namespace layerspec::varform {

enum class Family { goldstone_jaffe, deformed, thin_layer, symmetric_log, radial, deformation, combination };
const char* to_string(Family f) noexcept;

/// Trials are (alpha + beta u) chi_1(u). The _t entries are chart theta
/// derivatives; the form kernel divides them by r.
struct Coefficients {
  double alpha = 0.0, alpha_s = 0.0, alpha_t = 0.0;
  double beta = 0.0, beta_s = 0.0, beta_t = 0.0;
};

using CoefficientFn = std::function<Coefficients(double s, double theta, const surface::ChartSample& cs)>;

struct TrialFunction {
  Family family = Family::radial;
  std::vector<std::pair<std::string, double>> params;
  double s_end = 0.0;                // support lies in s <= s_end
  std::vector<double> breaks;        // radii where derivatives jump (panel boundaries)
  std::vector<double> theta_breaks;  // angular support edges for non-radial trials
  bool radial = true;                // coefficients independent of theta
  CoefficientFn coefficients;

  Coefficients at(const surface::PolarChart& chart, double s, double theta) const;
  /// Psi(s, theta, u) on the given layer.
  double value(const layer::LayerSpec& layer, double s, double theta, double u) const;
  double param(const std::string& name) const;
};

/// c1 A + c2 B.
TrialFunction combine(double c1, const TrialFunction& A, double c2, const TrialFunction& B);

/// min{1, K0(sigma s)/K0(sigma s0)}, cut off where it drops below `cut` and
/// renormalized there, (phi - cut)_+ / (1 - cut), so that the support is
/// compact and the profile stays continuous.
struct MacdonaldProfile {
  double s0 = 1.0, sigma = 0.1, cut = 1e-9;
  double s_end = 0.0;

  double operator()(double s) const;
  double derivative(double s) const;
  /// Geometric panel boundaries from s0 to s_end.
  std::vector<double> breaks() const;
};
MacdonaldProfile macdonald_profile(double s0, double sigma, double cut = 1e-9);

/// int_0^inf phi_sigma'(s)^2 s ds of the uncut profile, integrated in x = sigma s.
double derphi_integral(double s0, double sigma);

/// Smooth bump exp(-1/(1 - t^2)) on [s1, s2], optionally times an angular
/// bump of half-width `half_width` around theta_c (half_width = 0: radial).
struct Bump {
  double s1 = 0.5, s2 = 0.75;
  double theta_c = 0.0, half_width = 0.0;
  double sign = 1.0;

  bool radial() const { return half_width <= 0.0; }
  double operator()(double s, double theta) const;
  /// (j, j_s, j_theta).
  std::array<double, 3> with_derivatives(double s, double theta) const;
};

/// Bump on [s0/2, 3 s0/4] placed where the sampled M keeps one sign:
/// radial when M has one sign on the whole annulus, otherwise an angular
/// window around the largest |M|, halved until the sign is constant.
Bump default_bump(const layer::LayerSpec& layer, double s0);

TrialFunction gj_trial(const layer::LayerSpec& layer, double s0, double sigma);
/// psi_sigma + eps j u chi_1. Throws invalid_input unless supp j lies in (0, s0].
TrialFunction deformed_trial(const layer::LayerSpec& layer, double sigma, double s0, double eps, const Bump& j);
/// Theta = j u chi_1 on its own.
TrialFunction deformation_trial(const Bump& j);
/// (1 + M u) psi_sigma.
TrialFunction thin_trial(const layer::LayerSpec& layer, double sigma, double s0);
/// (phi_n + eps phi_n / s u) chi_1 with log ramps on [b1, b2] and [b2, b3].
/// Defaults b = (n, n^2, n^3). Throws capability on non-revolution charts and
/// truncation when b3 exceeds the chart.
TrialFunction symmetric_log_trial(const layer::LayerSpec& layer, int n, double eps = 0.0);
TrialFunction symmetric_log_trial(const layer::LayerSpec& layer, double b1, double b2, double b3, double eps);
/// phi(s) chi_1(u) with user profile and derivative supported in s <= s_end.
TrialFunction radial_trial(std::function<double(double)> phi, std::function<double(double)> dphi, double s_end,
                           std::vector<double> breaks = {});

/// The log-ramp profile and its derivative.
struct LogRamp {
  double b1, b2, b3;
  double operator()(double s) const;
  double derivative(double s) const;
};

}  // namespace layerspec::varform
