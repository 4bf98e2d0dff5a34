#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "layerspec/num/ode.hpp"
#include "layerspec/surface/chart.hpp"

namespace layerspec::surface {

/// Meridian data at arc length s in the canonical parametrization.
struct ProfileSample {
  double s = 0.0;
  double r = 0.0, z = 0.0;
  double rdot = 1.0, zdot = 0.0;
  double rddot = 0.0, zddot = 0.0;
  double k_s = 0.0, k_theta = 0.0;
  double dk_s = 0.0;  // d k_s / ds
};

struct MeridianSpec {
  std::function<double(double)> k_s;
  std::function<double(double)> dk_s;  // optional; central differences when empty
  double s_max = 0.0;
  std::vector<double> kinks;
};

/// Height h(rho) of a surface of revolution z = h(sqrt(x^2+y^2)) and its derivatives.
struct HeightProfileJet {
  double h = 0.0, h1 = 0.0, h2 = 0.0, h3 = 0.0;
};

class RevolutionProfile {
 public:
  using Evaluator = std::function<ProfileSample(double)>;

  RevolutionProfile(std::string name, Evaluator eval, double s_max, std::vector<double> kinks = {});

  static RevolutionProfile plane(double s_max);
  static RevolutionProfile sphere(double radius, double s_max);
  /// Hemisphere of radius R closed into a half-infinite cylinder, curvature jump at pi R / 2.
  static RevolutionProfile capped_cylinder(double radius, double s_max);
  /// b = int k_s, r = int cos b, z = int sin b. Throws InvalidSurface at the first r <= 0.
  static RevolutionProfile from_meridian(std::string name, const MeridianSpec& spec, double tol = num::kDefaultOdeTol);
  /// Surface z = h(rho); arc length obtained by integrating d rho / ds = 1 / sqrt(1 + h'^2).
  static RevolutionProfile from_height(std::string name, std::function<HeightProfileJet(double)> jet, double s_max,
                                       double tol = 1e-12);

  /// Throws Error(domain) outside [0, s_max].
  ProfileSample at(double s) const;
  double s_max() const noexcept { return s_max_; }
  const std::vector<double>& kinks() const noexcept { return kinks_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  Evaluator eval_;
  double s_max_;
  std::vector<double> kinks_;
};

struct RevolutionCurvatures {
  double k_s, k_theta, K, M, r;
};

/// Throws Error(pole_singularity) when r(s) = 0.
RevolutionCurvatures revolution_curvatures(const RevolutionProfile& profile, double s);

/// p(s, theta) = (r cos theta, r sin theta, z), n = (-zdot cos theta, -zdot sin theta, rdot).
class RevolutionChart final : public PolarChart {
 public:
  explicit RevolutionChart(RevolutionProfile profile);

  ChartSample sample(double s, double theta) const override;
  Vec3 point(double s, double theta) const override;
  Vec3 normal(double s, double theta) const override;
  double s_max() const override { return profile_.s_max(); }
  Provenance provenance() const override { return Provenance::revolution; }
  std::string name() const override { return profile_.name(); }
  bool axisymmetric() const override { return true; }
  std::vector<double> kinks() const override { return profile_.kinks(); }
  std::vector<double> theta_nodes() const override { return {0.0}; }
  std::vector<double> theta_weights() const override;
  std::pair<double, double> mean_gradient(double s, double theta) const override;

  const RevolutionProfile& profile() const noexcept { return profile_; }

 private:
  RevolutionProfile profile_;
};

}  // namespace layerspec::surface
