#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace layerspec::num {

inline constexpr double kDefaultQuadratureTol = 1e-10;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached, thread-safe. Throws Error(invalid_input) for n < 1.
const GaussRule& gauss_rule(int n);

/// Composite rule with nodes already mapped into the panels.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> panels;
  int points_per_panel = 0;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Throws Error(invalid_input) unless points_per_panel >= 1 and panels strictly increase.
QuadratureGrid gauss_legendre(int points_per_panel, std::span<const double> panels);

/// Panel boundaries on [a, b] that include every break inside (a, b), with each
/// panel no longer than max_width.
std::vector<double> panel_breaks(double a, double b, std::span<const double> breaks, double max_width);

/// Panels on [a, b] growing geometrically away from a by ratio, first width h0.
std::vector<double> geometric_panels(double a, double b, double h0, double ratio);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Globally adaptive bisection with a 10-point Gauss-Legendre rule, error taken
/// from comparing a panel with its two halves. Stops when the summed error is
/// below max(abs_tol, rel_tol*|value|).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = kDefaultQuadratureTol, double abs_tol = 0.0,
                                  int max_panels = 4000);

using VectorIntegrand = std::function<void(double x, std::span<double> out)>;

struct VectorQuadratureOptions {
  double rel_tol = kDefaultQuadratureTol;
  int max_panels = 20000;
  int points = 10;
  bool parallel = false;  // evaluate each refinement batch with parallel_for
  /// Optional override of the per-component tolerances. Receives the summed
  /// |panel contributions| of each component and the default rel_tol * scale.
  std::function<void(std::span<const double> scale, std::span<double> tol)> tolerance;
};

struct VectorQuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  int panels = 0;
  bool converged = true;
};

/// Vector-valued globally adaptive Gauss-Legendre quadrature over the panels
/// given by `breaks`. A panel's error is |rule(panel) - rule(left) - rule(right)|
/// per component; panels are bisected until every component's summed error is
/// within its tolerance. Deterministic for fixed inputs.
VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::span<const double> breaks, std::size_t width,
                                        const VectorQuadratureOptions& options = {});

}  // namespace layerspec::num
