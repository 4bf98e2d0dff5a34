#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "layerspec/surface/chart.hpp"

namespace layerspec::surface {

struct AngularResult {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  bool converged = true;
};

using AngularIntegrand = std::function<void(double theta, std::span<double> out)>;

/// int_0^{2 pi} F(theta) d theta for a vector-valued F with `width` components.
/// Axisymmetric charts use 2 pi F(0). Otherwise panels are bisected until the
/// 7-point Gauss estimate agrees with the two-half estimate to rel_tol times the
/// largest component magnitude.
AngularResult integrate_angle(const PolarChart& chart, std::size_t width, const AngularIntegrand& F,
                              double rel_tol = 1e-8, int max_panels = 2048);

}  // namespace layerspec::surface
