#pragma once

#include <functional>
#include <string>

#include "layerspec/surface/chart.hpp"

namespace layerspec::surface {

/// Chart given by closed-form callbacks.
class AnalyticChart final : public PolarChart {
 public:
  struct Callbacks {
    std::function<ChartSample(double, double)> sample;
    std::function<Vec3(double, double)> point;
    std::function<Vec3(double, double)> normal;
  };

  AnalyticChart(std::string name, Callbacks callbacks, double s_max, bool axisymmetric);

  ChartSample sample(double s, double theta) const override;
  Vec3 point(double s, double theta) const override;
  Vec3 normal(double s, double theta) const override;
  double s_max() const override { return s_max_; }
  Provenance provenance() const override { return Provenance::analytic; }
  std::string name() const override { return name_; }
  bool axisymmetric() const override { return axisymmetric_; }

 private:
  std::string name_;
  Callbacks cb_;
  double s_max_;
  bool axisymmetric_;
};

}  // namespace layerspec::surface
