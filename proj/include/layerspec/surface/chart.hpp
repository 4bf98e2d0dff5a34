#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace layerspec::surface {

using Vec3 = std::array<double, 3>;

enum class Provenance { revolution, graph_shot, analytic };
const char* to_string(Provenance p) noexcept;

/// Geometry at one chart point. The shape operator is given in the orthonormal
/// frame (e_s, e_theta) with e_theta = n x e_s.
struct ChartSample {
  double s = 0.0, theta = 0.0;
  double r = 0.0;    // metric factor, g = diag(1, r^2)
  double r_s = 1.0;  // d r / d s
  double l_ss = 0.0, l_st = 0.0, l_tt = 0.0;
  double K = 0.0, M = 0.0, k1 = 0.0, k2 = 0.0;
};

/// Fills K, M, k1 >= k2 from the shape operator entries.
void finish_curvatures(ChartSample& cs) noexcept;

/// Geodesic polar chart around a pole. Immutable and reentrant.
class PolarChart {
 public:
  virtual ~PolarChart() = default;

  /// Throws Error(domain) for s outside (0, s_max].
  virtual ChartSample sample(double s, double theta) const = 0;
  virtual Vec3 point(double s, double theta) const = 0;
  virtual Vec3 normal(double s, double theta) const = 0;
  virtual double s_max() const = 0;
  virtual Provenance provenance() const = 0;
  virtual std::string name() const = 0;

  /// True when nothing depends on theta.
  virtual bool axisymmetric() const { return false; }
  /// Radii where curvature is not smooth; quadrature panels break there.
  virtual std::vector<double> kinks() const { return {}; }
  /// Angular quadrature nodes; the matching weights sum to 2 pi.
  virtual std::vector<double> theta_nodes() const;
  virtual std::vector<double> theta_weights() const;
  /// (d_s M, d_theta M). Default: central differences of sample().
  virtual std::pair<double, double> mean_gradient(double s, double theta) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 protected:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  void check_s(double s) const;

 private:
  std::vector<std::string> warnings_;
};

/// Squared norm of the gradient in the chart metric.
inline double grad_norm_sq(double ds, double dtheta, double r) { return ds * ds + dtheta * dtheta / (r * r); }

}  // namespace layerspec::surface
