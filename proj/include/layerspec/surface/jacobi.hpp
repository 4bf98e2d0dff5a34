#pragma once

#include <functional>

#include "layerspec/num/ode.hpp"

namespace layerspec::surface {

/// Solution of r'' + K r = 0, r(0) = 0, r'(0) = 1.
class JacobiField {
 public:
  explicit JacobiField(num::OdeTrajectory traj) : traj_(std::move(traj)) {}
  double r(double s) const { return traj_.eval(s, 0); }
  double rdot(double s) const { return traj_.eval(s, 1); }
  double s_max() const { return traj_.back(); }
  const num::OdeTrajectory& trajectory() const noexcept { return traj_; }

 private:
  num::OdeTrajectory traj_;
};

/// Throws ConjugatePoint when r returns to zero at some s* in (0, s_max].
JacobiField jacobi_field(const std::function<double(double)>& K_along, double s_max, double tol = num::kDefaultOdeTol);

}  // namespace layerspec::surface
