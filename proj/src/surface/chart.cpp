#include "layerspec/surface/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::surface {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::revolution: return "revolution";
    case Provenance::graph_shot: return "graph-shot";
    case Provenance::analytic: return "analytic";
  }
  return "unknown";
}

void finish_curvatures(ChartSample& cs) noexcept {
  cs.M = 0.5 * (cs.l_ss + cs.l_tt);
  cs.K = cs.l_ss * cs.l_tt - cs.l_st * cs.l_st;
  const double disc = std::hypot(0.5 * (cs.l_ss - cs.l_tt), cs.l_st);
  cs.k1 = cs.M + disc;
  cs.k2 = cs.M - disc;
}

std::vector<double> PolarChart::theta_nodes() const {
  constexpr int n = 64;
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = 2.0 * std::numbers::pi * i / n;
  return t;
}

std::vector<double> PolarChart::theta_weights() const {
  const auto nodes = theta_nodes();
  return std::vector<double>(nodes.size(), 2.0 * std::numbers::pi / nodes.size());
}

std::pair<double, double> PolarChart::mean_gradient(double s, double theta) const {
  const double h = 1e-5 * std::max(s, 1e-2);
  const double lo = std::max(s - h, 0.5 * s), hi = std::min(s + h, s_max());
  const double ds = (sample(hi, theta).M - sample(lo, theta).M) / (hi - lo);
  const double ht = 1e-4;
  const double dt = (sample(s, theta + ht).M - sample(s, theta - ht).M) / (2.0 * ht);
  return {ds, dt};
}

void PolarChart::check_s(double s) const {
  if (!(s > 0.0) || s > s_max() * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << name() << ": s = " << s << " outside the chart (0, " << s_max() << "]";
    throw Error(ErrorKind::domain, msg.str());
  }
}

}  // namespace layerspec::surface
