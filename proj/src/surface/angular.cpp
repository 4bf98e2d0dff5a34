#include "layerspec/surface/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "layerspec/num/parallel.hpp"
#include "layerspec/num/quadrature.hpp"

namespace layerspec::surface {
namespace {

constexpr int kPoints = 7;

struct Panel {
  double a, b;
  std::vector<double> coarse;  // width entries
};

}  // namespace

AngularResult integrate_angle(const PolarChart& chart, std::size_t width, const AngularIntegrand& F, double rel_tol,
                              int max_panels) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  AngularResult res;
  res.value.assign(width, 0.0);
  res.error.assign(width, 0.0);
  if (chart.axisymmetric()) {
    F(0.0, res.value);
    for (auto& v : res.value) v *= kTwoPi;
    res.evaluations = 1;
    return res;
  }

  const auto& rule = num::gauss_rule(kPoints);
  // Evaluates the rule on each [a, b] in one parallel batch.
  const auto batch = [&](const std::vector<std::pair<double, double>>& spans) {
    const std::size_t n = spans.size() * kPoints;
    std::vector<double> vals(n * width);
    num::parallel_for(n, [&](std::size_t k) {
      const auto [a, b] = spans[k / kPoints];
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[k % kPoints];
      F(x, std::span<double>(vals.data() + k * width, width));
    });
    res.evaluations += static_cast<int>(n);
    std::vector<std::vector<double>> out(spans.size(), std::vector<double>(width, 0.0));
    for (std::size_t p = 0; p < spans.size(); ++p) {
      const double half = 0.5 * (spans[p].second - spans[p].first);
      for (int i = 0; i < kPoints; ++i) {
        const double* v = vals.data() + (p * kPoints + i) * width;
        for (std::size_t c = 0; c < width; ++c) out[p][c] += half * rule.w[i] * v[c];
      }
    }
    return out;
  };

  const int initial = std::clamp(static_cast<int>(chart.theta_nodes().size()) / 4, 8, 64);
  std::vector<std::pair<double, double>> spans;
  for (int i = 0; i < initial; ++i) spans.emplace_back(kTwoPi * i / initial, kTwoPi * (i + 1) / initial);
  std::vector<Panel> active;
  {
    auto est = batch(spans);
    for (std::size_t p = 0; p < spans.size(); ++p) active.push_back({spans[p].first, spans[p].second, est[p]});
  }
  int panels = initial;
  while (!active.empty()) {
    std::vector<std::pair<double, double>> halves;
    for (const auto& p : active) {
      const double mid = 0.5 * (p.a + p.b);
      halves.emplace_back(p.a, mid);
      halves.emplace_back(mid, p.b);
    }
    auto fine = batch(halves);
    // Magnitude scale from the current best estimate of the whole integral.
    std::vector<double> scale(width, 0.0);
    for (std::size_t c = 0; c < width; ++c) scale[c] = std::abs(res.value[c]);
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (std::size_t c = 0; c < width; ++c) scale[c] += std::abs(fine[2 * p][c] + fine[2 * p + 1][c]);
    }
    const double big = std::max(*std::max_element(scale.begin(), scale.end()), 1e-300);

    std::vector<Panel> next;
    for (std::size_t p = 0; p < active.size(); ++p) {
      const auto& pa = active[p];
      double err = 0.0;
      std::vector<double> sum(width);
      for (std::size_t c = 0; c < width; ++c) {
        sum[c] = fine[2 * p][c] + fine[2 * p + 1][c];
        err = std::max(err, std::abs(sum[c] - pa.coarse[c]));
      }
      const double allowed = rel_tol * big * (pa.b - pa.a) / kTwoPi;
      if (err <= allowed || panels >= max_panels) {
        if (err > allowed) res.converged = false;
        for (std::size_t c = 0; c < width; ++c) {
          res.value[c] += sum[c];
          res.error[c] += std::abs(sum[c] - pa.coarse[c]);
        }
      } else {
        const double mid = 0.5 * (pa.a + pa.b);
        next.push_back({pa.a, mid, fine[2 * p]});
        next.push_back({mid, pa.b, fine[2 * p + 1]});
        ++panels;
      }
    }
    active = std::move(next);
  }
  return res;
}

}  // namespace layerspec::surface
