#include "layerspec/surface/analytic.hpp"

#include "layerspec/error.hpp"

namespace layerspec::surface {

AnalyticChart::AnalyticChart(std::string name, Callbacks callbacks, double s_max, bool axisymmetric)
    : name_(std::move(name)), cb_(std::move(callbacks)), s_max_(s_max), axisymmetric_(axisymmetric) {
  if (!cb_.sample) throw Error(ErrorKind::invalid_input, "AnalyticChart: sample callback is required");
  if (!(s_max_ > 0.0)) throw Error(ErrorKind::invalid_input, "AnalyticChart: s_max must be positive");
}

ChartSample AnalyticChart::sample(double s, double theta) const {
  check_s(s);
  ChartSample cs = cb_.sample(s, theta);
  cs.s = s;
  cs.theta = theta;
  finish_curvatures(cs);
  return cs;
}

Vec3 AnalyticChart::point(double s, double theta) const {
  if (!cb_.point) throw Error(ErrorKind::capability, name_ + ": no embedding supplied");
  return cb_.point(s, theta);
}

Vec3 AnalyticChart::normal(double s, double theta) const {
  if (!cb_.normal) throw Error(ErrorKind::capability, name_ + ": no normal supplied");
  return cb_.normal(s, theta);
}

}  // namespace layerspec::surface
