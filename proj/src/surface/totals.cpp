#include "layerspec/surface/totals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "layerspec/error.hpp"
#include "layerspec/num/parallel.hpp"
#include "layerspec/num/quadrature.hpp"
#include "layerspec/surface/angular.hpp"

namespace layerspec::surface {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxPanels = 40000;

void check_radii(const std::vector<double>& radii, double s_max) {
  if (radii.empty()) throw Error(ErrorKind::invalid_input, "totals: empty radius schedule");
  double prev = 0.0;
  for (double R : radii) {
    if (!(R > prev)) throw Error(ErrorKind::invalid_input, "totals: radii must be positive and increasing");
    prev = R;
  }
  if (radii.back() > s_max * (1.0 + 1e-12)) {
    throw Error(ErrorKind::domain, "totals: last radius exceeds the chart");
  }
}

// Integrates g over [a, b], splitting at the given breakpoints.
num::AdaptiveResult integrate_split(const std::function<double(double)>& g, double a, double b,
                                    const std::vector<double>& breaks, double rel_tol) {
  std::vector<double> pts{a};
  for (double k : breaks) {
    if (k > a && k < b) pts.push_back(k);
  }
  pts.push_back(b);
  num::AdaptiveResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto part = num::integrate_adaptive(g, pts[i], pts[i + 1], rel_tol, 1e-15, kMaxPanels);
    total.value += part.value;
    total.error += part.error;
    total.evaluations += part.evaluations;
    total.converged = total.converged && part.converged;
  }
  return total;
}

}  // namespace

std::vector<double> geometric_schedule(double s0, double s_max) {
  if (!(s0 > 0.0) || !(s_max >= s0)) throw Error(ErrorKind::invalid_input, "geometric_schedule: need 0 < s0 <= s_max");
  // Anchored at s_max so that every step has ratio exactly 2.
  int k = 0;
  while (s_max / std::ldexp(1.0, k + 1) >= s0 * (1.0 - 1e-12)) ++k;
  std::vector<double> radii;
  for (int j = k; j >= 0; --j) radii.push_back(s_max / std::ldexp(1.0, j));
  return radii;
}

TotalCurvatureEstimate total_integral(const PolarChart& chart, const std::vector<double>& radii,
                                      const std::function<double(const ChartSample&)>& density,
                                      const TotalsOptions& options) {
  check_radii(radii, chart.s_max());
  const auto kinks = chart.kinks();
  const std::size_t m = radii.size();

  // Per direction: cumulative disk integrals followed by their quadrature errors.
  const auto ray_integrals = [&](double theta, std::span<double> out) {
    const auto g = [&](double s) {
      const ChartSample cs = chart.sample(s, theta);
      return density(cs) * cs.r;
    };
    double a = 0.0, value = 0.0, error = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto part = integrate_split(g, a, radii[i], kinks, options.rel_tol);
      value += part.value;
      error += part.error;
      out[i] = value;
      out[m + i] = error;
      a = radii[i];
    }
  };
  const AngularResult ang = integrate_angle(chart, 2 * m, ray_integrals, options.angular_tol);

  TotalCurvatureEstimate est;
  est.radii = radii;
  est.partials.assign(ang.value.begin(), ang.value.begin() + m);
  est.quadrature_error = ang.value[2 * m - 1] + ang.error[m - 1];
  est.angular_evaluations = ang.evaluations;
  extrapolate(est, options);
  return est;
}

TotalCurvatureEstimate total_gauss(const PolarChart& chart, const std::vector<double>& radii,
                                   const TotalsOptions& options) {
  return total_integral(chart, radii, [](const ChartSample& cs) { return cs.K; }, options);
}

TotalCurvatureEstimate total_mean_sq(const PolarChart& chart, const std::vector<double>& radii,
                                     const TotalsOptions& options) {
  return total_integral(chart, radii, [](const ChartSample& cs) { return cs.M * cs.M; }, options);
}

TotalCurvatureEstimate total_abs_gauss(const PolarChart& chart, const std::vector<double>& radii,
                                       const TotalsOptions& options) {
  return total_integral(chart, radii, [](const ChartSample& cs) { return std::abs(cs.K); }, options);
}

TotalCurvatureEstimate total_grad_mean_sq(const PolarChart& chart, const std::vector<double>& radii,
                                          const TotalsOptions& options) {
  return total_integral(
      chart, radii,
      [&chart](const ChartSample& cs) {
        const auto [ds, dt] = chart.mean_gradient(cs.s, cs.theta);
        return grad_norm_sq(ds, dt, cs.r);
      },
      options);
}

TotalCurvatureEstimate cartesian_total_gauss(const GraphSurface& surf, const std::vector<double>& plane_radii,
                                             const TotalsOptions& options) {
  check_radii(plane_radii, std::numeric_limits<double>::infinity());
  constexpr int kPhi = 128;
  TotalCurvatureEstimate est;
  est.radii = plane_radii;
  std::vector<double> values(plane_radii.size() * kPhi), errors(values.size());
  num::parallel_for(kPhi, [&](std::size_t t) {
    const double phi = kTwoPi * t / kPhi;
    const double c = std::cos(phi), s = std::sin(phi);
    const auto g = [&](double rho) {
      const double x = surf.pole[0] + rho * c, y = surf.pole[1] + rho * s;
      const HeightJet j = surf.jet(x, y);
      const double w2 = 1.0 + j.fx * j.fx + j.fy * j.fy;
      return (j.fxx * j.fyy - j.fxy * j.fxy) / (w2 * std::sqrt(w2)) * rho;
    };
    double a = 0.0;
    for (std::size_t i = 0; i < plane_radii.size(); ++i) {
      const auto part = num::integrate_adaptive(g, a, plane_radii[i], options.rel_tol, 1e-15, kMaxPanels);
      values[i * kPhi + t] = part.value;
      errors[i * kPhi + t] = part.error;
      a = plane_radii[i];
    }
  });
  double running = 0.0;
  for (std::size_t i = 0; i < plane_radii.size(); ++i) {
    for (int t = 0; t < kPhi; ++t) {
      running += kTwoPi / kPhi * values[i * kPhi + t];
      est.quadrature_error += kTwoPi / kPhi * errors[i * kPhi + t];
    }
    est.partials.push_back(running);
  }
  extrapolate(est, options);
  return est;
}

// Geometric tail: with d_i = P_i - P_{i-1} and q = d_m / d_{m-1}, the remainder
// is d_m q / (1 - q). Ratios near or above one mean the integral does not converge.
void extrapolate(TotalCurvatureEstimate& est, const TotalsOptions& options) {
  const auto& P = est.partials;
  est.tail = 0.0;
  est.ratio = 0.0;
  est.divergent = false;
  if (P.empty()) return;
  const std::size_t m = P.size() - 1;
  est.value = P[m];
  if (m == 0) {
    est.error = std::abs(P[0]) + est.quadrature_error;
    return;
  }
  const double dm = P[m] - P[m - 1];
  est.error = std::abs(dm) + est.quadrature_error;
  if (m == 1) return;
  const double dprev = P[m - 1] - P[m - 2];
  const double negligible = 1e-13 * (1.0 + std::abs(P[m]));
  if (std::abs(dm) <= negligible) {
    est.ratio = dprev != 0.0 ? dm / dprev : 0.0;
    est.error = std::max(std::abs(dm), negligible) + est.quadrature_error;
    return;
  }
  const double q = dprev != 0.0 ? dm / dprev : std::numeric_limits<double>::infinity();
  est.ratio = q;
  if (!(std::abs(q) < options.divergence_ratio) || (std::abs(P[m]) > options.blowup && q > 0.0)) {
    est.divergent = true;
    return;
  }
  est.tail = dm * q / (1.0 - q);
  est.value = P[m] + est.tail;
  double spread = 0.0;
  if (m >= 3) {
    const double dpp = P[m - 2] - P[m - 3];
    if (dpp != 0.0) {
      const double q_prev = dprev / dpp;
      if (std::abs(q_prev) < options.divergence_ratio) spread = std::abs(est.tail - dm * q_prev / (1.0 - q_prev));
    }
  }
  est.error = std::max(std::abs(dm), spread) + est.quadrature_error;
}

GaussBonnetCheck gauss_bonnet_residual(const RevolutionProfile& profile, const std::vector<double>& radii) {
  const std::vector<double> schedule =
      radii.empty() ? geometric_schedule(std::min(1.0, profile.s_max() / 64.0), profile.s_max()) : radii;
  const RevolutionChart chart(profile);
  const auto est = total_gauss(chart, schedule);
  // rdot may oscillate (Ex.M-type meridians); require the oscillation envelope
  // over the last annulus to shrink relative to the one before.
  const auto oscillation = [&](double a, double b) {
    constexpr int n = 4096;
    double lo = profile.at(b).rdot, hi = lo;
    for (int i = 0; i < n; ++i) {
      const double v = profile.at(a + (b - a) * i / n).rdot;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  if (schedule.size() >= 3) {
    const std::size_t m = schedule.size() - 1;
    const double last = oscillation(schedule[m - 1], schedule[m]);
    const double prev = oscillation(schedule[m - 2], schedule[m - 1]);
    if (last > 1e-6 && last > 0.75 * prev) {
      throw Error(ErrorKind::no_limit, profile.name() + ": rdot(s) does not settle over the radius schedule");
    }
  }
  GaussBonnetCheck gb;
  gb.S = schedule.back();
  gb.total = est.value;
  gb.rdot_end = profile.at(gb.S).rdot;
  gb.residual = std::abs(est.value + kTwoPi * gb.rdot_end - kTwoPi);
  return gb;
}

}  // namespace layerspec::surface
