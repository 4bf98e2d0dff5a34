#include "layerspec/surface/revolution.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::surface {
namespace {

void fill_second_derivatives(ProfileSample& p) {
  p.rddot = -p.k_s * p.zdot;
  p.zddot = p.k_s * p.rdot;
}

double central_difference(const std::function<double(double)>& f, double s, double s_max) {
  const double h = 1e-5 * std::max(s, 1e-2);
  if (s - h <= 0.0) return (f(s + h) - f(s)) / h;
  if (s + h > s_max) return (f(s) - f(s - h)) / h;
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

}  // namespace

RevolutionProfile::RevolutionProfile(std::string name, Evaluator eval, double s_max, std::vector<double> kinks)
    : name_(std::move(name)), eval_(std::move(eval)), s_max_(s_max), kinks_(std::move(kinks)) {
  if (!(s_max_ > 0.0)) throw Error(ErrorKind::invalid_input, "RevolutionProfile: s_max must be positive");
}

ProfileSample RevolutionProfile::at(double s) const {
  if (!(s >= 0.0) || s > s_max_ * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << name_ << ": s = " << s << " outside [0, " << s_max_ << "]";
    throw Error(ErrorKind::domain, msg.str());
  }
  return eval_(std::min(s, s_max_));
}

RevolutionProfile RevolutionProfile::plane(double s_max) {
  return {"plane",
          [](double s) {
            ProfileSample p;
            p.s = s;
            p.r = s;
            return p;
          },
          s_max};
}

RevolutionProfile RevolutionProfile::sphere(double radius, double s_max) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_input, "sphere: radius must be positive");
  if (s_max >= std::numbers::pi * radius) {
    throw Error(ErrorKind::invalid_input, "sphere: s_max must stay below the antipodal conjugate point pi R");
  }
  return {"sphere",
          [radius](double s) {
            ProfileSample p;
            const double b = s / radius;
            p.s = s;
            p.r = radius * std::sin(b);
            p.z = radius * (1.0 - std::cos(b));
            p.rdot = std::cos(b);
            p.zdot = std::sin(b);
            p.k_s = p.k_theta = 1.0 / radius;
            fill_second_derivatives(p);
            return p;
          },
          s_max};
}

RevolutionProfile RevolutionProfile::capped_cylinder(double radius, double s_max) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_input, "capped_cylinder: radius must be positive");
  const double join = 0.5 * std::numbers::pi * radius;
  return {"capped_cylinder",
          [radius, join](double s) {
            ProfileSample p;
            p.s = s;
            if (s <= join) {
              const double b = s / radius;
              p.r = radius * std::sin(b);
              p.z = radius * (1.0 - std::cos(b));
              p.rdot = std::cos(b);
              p.zdot = std::sin(b);
              p.k_s = 1.0 / radius;
            } else {
              p.r = radius;
              p.z = radius + (s - join);
              p.rdot = 0.0;
              p.zdot = 1.0;
              p.k_s = 0.0;
            }
            p.k_theta = 1.0 / radius;
            fill_second_derivatives(p);
            return p;
          },
          s_max,
          {join}};
}

RevolutionProfile RevolutionProfile::from_meridian(std::string name, const MeridianSpec& spec, double tol) {
  if (!spec.k_s) throw Error(ErrorKind::invalid_input, "from_meridian: k_s is required");
  num::OdeOptions opt;
  opt.rtol = tol;
  opt.atol = 1e-3 * tol;
  opt.event = [](double s, std::span<const double> y) { return s > 0.0 ? y[1] : 1.0; };
  const auto k_s = spec.k_s;
  const std::vector<double> y0{0.0, 0.0, 0.0};
  auto traj = std::make_shared<num::OdeTrajectory>(num::integrate_ode(
      [k_s](double s, std::span<const double> y, std::span<double> dy) {
        dy[0] = k_s(s);
        dy[1] = std::cos(y[0]);
        dy[2] = std::sin(y[0]);
      },
      y0, 0.0, spec.s_max, opt));
  if (traj->event_hit()) {
    std::ostringstream msg;
    msg << name << ": meridian reaches the axis (r = 0) at s = " << traj->event_s();
    throw InvalidSurface(msg.str(), traj->event_s());
  }
  const auto dk_s = spec.dk_s;
  return {std::move(name),
          [traj, k_s, dk_s, s_max = spec.s_max](double s) {
            ProfileSample p;
            double y[3];
            traj->eval(s, y);
            p.s = s;
            p.r = y[1];
            p.z = y[2];
            p.rdot = std::cos(y[0]);
            p.zdot = std::sin(y[0]);
            p.k_s = k_s(s);
            p.k_theta = p.r > 0.0 ? p.zdot / p.r : k_s(0.0);
            p.dk_s = dk_s ? dk_s(s) : central_difference(k_s, s, s_max);
            fill_second_derivatives(p);
            return p;
          },
          spec.s_max, spec.kinks};
}

RevolutionProfile RevolutionProfile::from_height(std::string name, std::function<HeightProfileJet(double)> jet,
                                                 double s_max, double tol) {
  num::OdeOptions opt;
  opt.rtol = tol;
  opt.atol = 1e-300;
  opt.initial_step = 1e-6 * std::min(1.0, s_max);
  const std::vector<double> y0{0.0};
  auto traj = std::make_shared<num::OdeTrajectory>(num::integrate_ode(
      [jet](double, std::span<const double> y, std::span<double> dy) {
        const double h1 = jet(y[0]).h1;
        dy[0] = 1.0 / std::sqrt(1.0 + h1 * h1);
      },
      y0, 0.0, s_max, opt));
  return {std::move(name),
          [traj, jet](double s) {
            ProfileSample p;
            const double rho = traj->eval(s, 0);
            const HeightProfileJet j = jet(rho);
            const double w = std::sqrt(1.0 + j.h1 * j.h1);
            p.s = s;
            p.r = rho;
            p.z = j.h;
            p.rdot = 1.0 / w;
            p.zdot = j.h1 / w;
            p.k_s = j.h2 / (w * w * w);
            p.k_theta = rho > 0.0 ? j.h1 / (rho * w) : j.h2;
            p.dk_s = (j.h3 / (w * w * w) - 3.0 * j.h2 * j.h2 * j.h1 / (w * w * w * w * w)) / w;
            fill_second_derivatives(p);
            return p;
          },
          s_max};
}

RevolutionCurvatures revolution_curvatures(const RevolutionProfile& profile, double s) {
  const ProfileSample p = profile.at(s);
  if (!(p.r > 0.0)) {
    std::ostringstream msg;
    msg << profile.name() << ": r = 0 at s = " << s << "; k_theta = zdot / r is singular there";
    throw Error(ErrorKind::pole_singularity, msg.str());
  }
  const double k_theta = p.zdot / p.r;
  return {p.k_s, k_theta, p.k_s * k_theta, 0.5 * (p.k_s + k_theta), p.r};
}

RevolutionChart::RevolutionChart(RevolutionProfile profile) : profile_(std::move(profile)) {}

ChartSample RevolutionChart::sample(double s, double theta) const {
  check_s(s);
  const ProfileSample p = profile_.at(s);
  ChartSample cs;
  cs.s = s;
  cs.theta = theta;
  cs.r = p.r;
  cs.r_s = p.rdot;
  cs.l_ss = p.k_s;
  cs.l_tt = p.k_theta;
  finish_curvatures(cs);
  return cs;
}

Vec3 RevolutionChart::point(double s, double theta) const {
  const ProfileSample p = profile_.at(s);
  return {p.r * std::cos(theta), p.r * std::sin(theta), p.z};
}

Vec3 RevolutionChart::normal(double s, double theta) const {
  const ProfileSample p = profile_.at(s);
  return {-p.zdot * std::cos(theta), -p.zdot * std::sin(theta), p.rdot};
}

std::vector<double> RevolutionChart::theta_weights() const { return {2.0 * std::numbers::pi}; }

std::pair<double, double> RevolutionChart::mean_gradient(double s, double) const {
  check_s(s);
  const ProfileSample p = profile_.at(s);
  // d k_theta / ds = rdot (k_s - k_theta) / r
  const double dk_theta = p.rdot * (p.k_s - p.k_theta) / p.r;
  return {0.5 * (p.dk_s + dk_theta), 0.0};
}

}  // namespace layerspec::surface
