#include "layerspec/surface/jacobi.hpp"

#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::surface {

JacobiField jacobi_field(const std::function<double(double)>& K_along, double s_max, double tol) {
  if (!(s_max > 0.0)) throw Error(ErrorKind::invalid_input, "jacobi_field: s_max must be positive");
  num::OdeOptions opt;
  opt.rtol = opt.atol = tol;
  opt.event = [](double s, std::span<const double> y) { return s > 0.0 ? y[0] : 1.0; };
  const std::vector<double> y0{0.0, 1.0};
  num::OdeTrajectory traj = num::integrate_ode(
      [&K_along](double s, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -K_along(s) * y[0];
      },
      y0, 0.0, s_max, opt);
  if (traj.event_hit()) {
    std::ostringstream msg;
    msg << "Jacobi field vanishes at s* = " << traj.event_s() << "; the polar chart ends there";
    throw ConjugatePoint(msg.str(), traj.event_s());
  }
  return JacobiField(std::move(traj));
}

}  // namespace layerspec::surface
