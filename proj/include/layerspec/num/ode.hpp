#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace layerspec::num {

inline constexpr double kDefaultOdeTol = 1e-10;

using OdeRhs = std::function<void(double s, std::span<const double> y, std::span<double> dyds)>;
/// Event function; integration stops where it first turns from positive to non-positive.
using OdeEvent = std::function<double(double s, std::span<const double> y)>;

struct OdeOptions {
  double rtol = kDefaultOdeTol;
  double atol = kDefaultOdeTol;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
  OdeEvent event;
};

/// Dense solution of a DOPRI5 run. Interpolant is the 4th-order continuous extension;
/// at stored abscissae the stored states are returned exactly.
class OdeTrajectory {
 public:
  std::size_t dimension() const noexcept { return dim_; }
  int interpolation_order() const noexcept { return 4; }
  const std::vector<double>& abscissae() const noexcept { return s_; }
  std::span<const double> state(std::size_t i) const { return {states_.data() + i * dim_, dim_}; }
  double front() const { return s_.front(); }
  double back() const { return s_.back(); }
  std::size_t steps() const noexcept { return s_.empty() ? 0 : s_.size() - 1; }

  /// True when the event function stopped the run before the requested end.
  bool event_hit() const noexcept { return event_hit_; }
  double event_s() const noexcept { return event_s_; }

  /// Throws Error(domain) outside [front, back].
  void eval(double s, std::span<double> out) const;
  std::vector<double> eval(double s) const;
  double eval(double s, std::size_t component) const;

 private:
  friend OdeTrajectory integrate_ode(const OdeRhs&, std::span<const double>, double, double, const OdeOptions&);
  std::size_t locate(double s) const;
  double dense(std::size_t step, double s, std::size_t component) const;

  std::size_t dim_ = 0;
  std::vector<double> s_;
  std::vector<double> states_;
  std::vector<double> h_;      // full step length of each segment
  std::vector<double> coeff_;  // 5*dim per segment
  bool event_hit_ = false;
  double event_s_ = 0.0;
};

/// Dormand-Prince 5(4) with step-size control. Throws IntegrationFailure on step
/// underflow or non-finite state, reporting the last accepted abscissa.
OdeTrajectory integrate_ode(const OdeRhs& rhs, std::span<const double> initial, double s0, double s1,
                            const OdeOptions& options = {});

inline OdeTrajectory integrate_ode(const OdeRhs& rhs, std::span<const double> initial, double s0, double s1,
                                   double tol) {
  OdeOptions options;
  options.rtol = options.atol = tol;
  return integrate_ode(rhs, initial, s0, s1, options);
}

}  // namespace layerspec::num
