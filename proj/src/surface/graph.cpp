#include "layerspec/surface/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "layerspec/error.hpp"
#include "layerspec/num/parallel.hpp"

namespace layerspec::surface {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

// Tangent vector X = X^x p_x + X^y p_y in space.
Vec3 lift(const HeightJet& j, double vx, double vy) { return {vx, vy, j.fx * vx + j.fy * vy}; }

double second_form(const HeightJet& j, double w, const Vec3& a, const Vec3& b) {
  return (a[0] * (j.fxx * b[0] + j.fxy * b[1]) + a[1] * (j.fxy * b[0] + j.fyy * b[1])) / w;
}

}  // namespace

GraphCurvatures graph_curvatures(const GraphSurface& surf, double x, double y) {
  const HeightJet j = surf.jet(x, y);
  const double w2 = 1.0 + j.fx * j.fx + j.fy * j.fy;
  const double K = (j.fxx * j.fyy - j.fxy * j.fxy) / (w2 * w2);
  const double M = ((1.0 + j.fy * j.fy) * j.fxx - 2.0 * j.fx * j.fy * j.fxy + (1.0 + j.fx * j.fx) * j.fyy) /
                   (2.0 * w2 * std::sqrt(w2));
  const double disc = std::sqrt(std::max(M * M - K, 0.0));
  return {K, M, M + disc, M - disc};
}

GraphFanChart::GraphFanChart(GraphSurface surf, const FanOptions& options)
    : surf_(std::move(surf)), options_(options), s_max_(options.s_max) {
  if (options_.theta_samples < 4) throw Error(ErrorKind::invalid_input, "fan: theta_samples must be >= 4");
  if (!(options_.s_max > 0.0)) throw Error(ErrorKind::invalid_input, "fan: s_max must be positive");
  if (!surf_.jet) throw Error(ErrorKind::invalid_input, "fan: surface has no height function");

  const HeightJet j0 = surf_.jet(surf_.pole[0], surf_.pole[1]);
  const Vec3 px{1.0, 0.0, j0.fx}, py{0.0, 1.0, j0.fy};
  const double nx = std::sqrt(1.0 + j0.fx * j0.fx);
  const Vec3 E1{px[0] / nx, px[1] / nx, px[2] / nx};
  const double proj = py[0] * E1[0] + py[1] * E1[1] + py[2] * E1[2];
  Vec3 E2{py[0] - proj * E1[0], py[1] - proj * E1[1], py[2] - proj * E1[2]};
  const double n2 = std::sqrt(E2[0] * E2[0] + E2[1] * E2[1] + E2[2] * E2[2]);
  for (auto& c : E2) c /= n2;
  e1_ = {E1[0], E1[1]};
  e2_ = {E2[0], E2[1]};

  const int n = options_.theta_samples;
  thetas_.resize(n);
  for (int i = 0; i < n; ++i) thetas_[i] = kTwoPi * i / n;

  std::vector<double> conj(n, std::numeric_limits<double>::infinity());
  std::vector<std::optional<num::OdeTrajectory>> shot(n);
  num::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double c = std::numeric_limits<double>::infinity();
    shot[i] = shoot(thetas_[i], options_.s_max, &c);
    conj[i] = c;
  });
  const double s_conj = *std::min_element(conj.begin(), conj.end());
  if (std::isfinite(s_conj)) {
    s_max_ = s_conj;
    std::ostringstream msg;
    msg << surf_.name << ": conjugate point at s = " << s_conj << "; chart truncated there";
    warn(msg.str());
  }
  rays_.reserve(n);
  for (auto& r : shot) rays_.push_back(std::make_shared<const num::OdeTrajectory>(std::move(*r)));
}

num::OdeTrajectory GraphFanChart::shoot(double theta, double s_end, double* conjugate_s) const {
  const auto jet = surf_.jet;
  const num::OdeRhs rhs = [jet](double, std::span<const double> y, std::span<double> dy) {
    const HeightJet j = jet(y[0], y[1]);
    const double vx = y[2], vy = y[3];
    const double w2 = 1.0 + j.fx * j.fx + j.fy * j.fy;
    const double hvx = j.fxx * vx + j.fxy * vy, hvy = j.fxy * vx + j.fyy * vy;
    const double q = vx * hvx + vy * hvy;
    const double K = (j.fxx * j.fyy - j.fxy * j.fxy) / (w2 * w2);
    dy[0] = vx;
    dy[1] = vy;
    dy[2] = -j.fx * q / w2;
    dy[3] = -j.fy * q / w2;
    dy[4] = y[5];
    dy[5] = -K * y[4];

    // Linearisation of the geodesic equation along (J, Jdot).
    const double Jx = y[6], Jy = y[7], Jdx = y[8], Jdy = y[9];
    const double qx = j.fxxx * vx * vx + 2.0 * j.fxxy * vx * vy + j.fxyy * vy * vy;
    const double qy = j.fxxy * vx * vx + 2.0 * j.fxyy * vx * vy + j.fyyy * vy * vy;
    const double dw2x = 2.0 * (j.fx * j.fxx + j.fy * j.fxy);
    const double dw2y = 2.0 * (j.fx * j.fxy + j.fy * j.fyy);
    const double fk[2] = {j.fx, j.fy};
    const double hk[2][2] = {{j.fxx, j.fxy}, {j.fxy, j.fyy}};
    const double qm[2] = {qx, qy};
    const double dw2[2] = {dw2x, dw2y};
    const double hv[2] = {hvx, hvy};
    const double J[2] = {Jx, Jy}, Jd[2] = {Jdx, Jdy};
    for (int k = 0; k < 2; ++k) {
      double acc = 0.0;
      for (int m = 0; m < 2; ++m) {
        const double dx = -(hk[k][m] * q + fk[k] * qm[m]) / w2 + fk[k] * q * dw2[m] / (w2 * w2);
        const double dv = -2.0 * fk[k] * hv[m] / w2;
        acc += dx * J[m] + dv * Jd[m];
      }
      dy[8 + k] = acc;
    }
    dy[6] = Jdx;
    dy[7] = Jdy;
  };

  const double c = std::cos(theta), s = std::sin(theta);
  const std::vector<double> y0{surf_.pole[0],
                               surf_.pole[1],
                               c * e1_[0] + s * e2_[0],
                               c * e1_[1] + s * e2_[1],
                               0.0,
                               1.0,
                               0.0,
                               0.0,
                               -s * e1_[0] + c * e2_[0],
                               -s * e1_[1] + c * e2_[1]};
  num::OdeOptions opt;
  opt.rtol = options_.tol;
  opt.atol = options_.tol;
  opt.event = [](double sv, std::span<const double> y) { return sv > 0.0 ? y[4] : 1.0; };
  num::OdeTrajectory traj = num::integrate_ode(rhs, y0, 0.0, s_end, opt);
  if (traj.event_hit() && conjugate_s) *conjugate_s = traj.event_s();
  return traj;
}

std::shared_ptr<const num::OdeTrajectory> GraphFanChart::ray(double theta) const {
  const double t = wrap_angle(theta);
  const double step = kTwoPi / thetas_.size();
  const double idx = std::round(t / step);
  if (std::abs(t - idx * step) < 1e-13) return rays_[static_cast<std::size_t>(idx) % rays_.size()];

  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  auto traj = std::make_shared<const num::OdeTrajectory>(shoot(t, s_max_, nullptr));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cache_.size() > 4096) cache_.clear();
  cache_.emplace(t, traj);
  return traj;
}

std::vector<double> GraphFanChart::theta_weights() const {
  return std::vector<double>(thetas_.size(), kTwoPi / thetas_.size());
}

ChartSample GraphFanChart::sample(double s, double theta) const {
  check_s(s);
  double y[kStateSize];
  ray(theta)->eval(s, y);
  const HeightJet j = surf_.jet(y[0], y[1]);
  const double w = std::sqrt(1.0 + j.fx * j.fx + j.fy * j.fy);
  const Vec3 n{-j.fx / w, -j.fy / w, 1.0 / w};
  const Vec3 es = lift(j, y[2], y[3]);
  const Vec3 et{n[1] * es[2] - n[2] * es[1], n[2] * es[0] - n[0] * es[2], n[0] * es[1] - n[1] * es[0]};
  ChartSample cs;
  cs.s = s;
  cs.theta = theta;
  cs.r = y[4];
  cs.r_s = y[5];
  cs.l_ss = second_form(j, w, es, es);
  cs.l_st = second_form(j, w, es, et);
  cs.l_tt = second_form(j, w, et, et);
  finish_curvatures(cs);
  return cs;
}

Vec3 GraphFanChart::point(double s, double theta) const {
  const auto p = plane_point(s, theta);
  return {p[0], p[1], surf_.jet(p[0], p[1]).f};
}

Vec3 GraphFanChart::normal(double s, double theta) const {
  const auto p = plane_point(s, theta);
  const HeightJet j = surf_.jet(p[0], p[1]);
  const double w = std::sqrt(1.0 + j.fx * j.fx + j.fy * j.fy);
  return {-j.fx / w, -j.fy / w, 1.0 / w};
}

std::array<double, 2> GraphFanChart::plane_point(double s, double theta) const {
  check_s(s);
  const auto traj = ray(theta);
  return {traj->eval(s, 0), traj->eval(s, 1)};
}

double GraphFanChart::dtheta_point_norm(double s, double theta) const {
  check_s(s);
  double y[kStateSize];
  ray(theta)->eval(s, y);
  const HeightJet j = surf_.jet(y[0], y[1]);
  const Vec3 J = lift(j, y[6], y[7]);
  return std::sqrt(J[0] * J[0] + J[1] * J[1] + J[2] * J[2]);
}

double GraphFanChart::speed(double s, double theta) const {
  check_s(s);
  double y[kStateSize];
  ray(theta)->eval(s, y);
  const HeightJet j = surf_.jet(y[0], y[1]);
  const Vec3 v = lift(j, y[2], y[3]);
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// Plane gradient of M by central differences, then the chain rule along
// d/ds = (xdot, ydot) and d/dtheta = (Jx, Jy).
std::pair<double, double> GraphFanChart::mean_gradient(double s, double theta) const {
  check_s(s);
  double y[kStateSize];
  ray(theta)->eval(s, y);
  const double h = 1e-5 * (1.0 + std::abs(y[0]) + std::abs(y[1]));
  const double Mx = (graph_curvatures(surf_, y[0] + h, y[1]).M - graph_curvatures(surf_, y[0] - h, y[1]).M) / (2 * h);
  const double My = (graph_curvatures(surf_, y[0], y[1] + h).M - graph_curvatures(surf_, y[0], y[1] - h).M) / (2 * h);
  return {Mx * y[2] + My * y[3], Mx * y[6] + My * y[7]};
}

std::shared_ptr<GraphFanChart> geodesic_fan(const GraphSurface& surf, const FanOptions& options) {
  return std::make_shared<GraphFanChart>(surf, options);
}

}  // namespace layerspec::surface
