#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "layerspec/layer/layer.hpp"
#include "layerspec/varform/trial.hpp"

namespace layerspec::varform {

struct FormOptions {
  double rel_tol = 1e-10;        // s quadrature, per component
  double theta_rel_tol = 1e-10;  // theta quadrature, per component
  int u_points = 24;             // primary transverse rule
  int u_points_check = 32;       // second rule; the difference enters the error
  int max_s_panels = 4000;
  int max_theta_panels = 1024;
  int initial_theta_panels = 16;
};

/// Q = Q1 + Q2 and the G-norm of a trial. q2_shifted = Q2 - kappa_1^2 norm is
/// assembled as the exact flat-layer part plus a quadrature of the curvature
/// part, so it does not suffer from the cancellation of the two large terms.
struct FormEvaluation {
  double q1 = 0.0, q2 = 0.0, norm = 0.0;
  double q2_shifted = 0.0;
  double q_tilde = 0.0;
  double q1_error = 0.0, q2_shifted_error = 0.0, norm_error = 0.0;
  double rule_difference = 0.0;
  double error = 0.0;  // on q_tilde: quadrature + rule difference + rounding floor
  int evaluations = 0;
  bool converged = true;
};

/// Throws truncation when the support passes the chart and evaluation on
/// non-finite integrands.
FormEvaluation evaluate_form(const layer::LayerSpec& layer, const TrialFunction& trial,
                             const FormOptions& options = {});

struct BilinearEvaluation {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Shifted bilinear form (Q - kappa_1^2 (.,.)_G)(A, B) by polarization,
/// (Q~[A + B] - Q~[A - B]) / 4, applied column by column.
BilinearEvaluation evaluate_bilinear(const layer::LayerSpec& layer, const TrialFunction& A, const TrialFunction& B,
                                     const FormOptions& options = {});

struct SurfaceIntegral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// int int density(s, theta, sample) r ds dtheta over s <= s_end.
SurfaceIntegral surface_integral(const surface::PolarChart& chart,
                                 const std::function<double(double, double, const surface::ChartSample&)>& density,
                                 double s_end, const std::vector<double>& breaks, bool radial,
                                 const std::vector<double>& theta_breaks = {}, const FormOptions& options = {});

struct MixedTerm {
  double polarization = 0.0, polarization_error = 0.0;
  double surface = 0.0, surface_error = 0.0;  // -(j, M)_g
};

MixedTerm mixed_term(const layer::LayerSpec& layer, double sigma, double s0, const Bump& j,
                     const FormOptions& options = {});

struct EpsilonChoice {
  double eps = 0.0;
  double pairing = 0.0;  // (phi_n, M phi_n / s)_g
  double pairing_error = 0.0;
};

/// eps_n = 1 / (phi_n, M phi_n / s)_g. Throws degenerate_pairing below 1e-12.
EpsilonChoice epsilon_choice(const layer::LayerSpec& layer, int n, const FormOptions& options = {});
EpsilonChoice epsilon_choice(const layer::LayerSpec& layer, double b1, double b2, double b3,
                             const FormOptions& options = {});

}  // namespace layerspec::varform
