#include "layerspec/surface/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layerspec/error.hpp"
#include "layerspec/surface/angular.hpp"

namespace layerspec::surface {
namespace {

// Decay verdict for a sequence of annulus suprema.
Verdict decay_verdict(const std::vector<double>& x) {
  const double top = *std::max_element(x.begin(), x.end());
  if (top == 0.0) return Verdict::pass;
  if (x.size() < 3) return Verdict::undecided;
  const std::size_t m = x.size() - 1;
  const double slack = 1e-12 * top;
  if (x[m] >= 0.5 * top - slack && x[m] >= 0.9 * x[m - 1]) return Verdict::fail;
  const bool tail_down = x[m] <= x[m - 1] + slack && x[m - 1] <= x[m - 2] + slack;
  if (tail_down && x[m] <= 0.5 * top) return Verdict::pass;
  return Verdict::undecided;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::pass && b == Verdict::pass) return Verdict::pass;
  return Verdict::undecided;
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::undecided: return "undecided";
  }
  return "unknown";
}

double growth_constant(const PolarChart& chart, const std::vector<double>& radii, double safety) {
  const auto lengths = integrate_angle(chart, radii.size(), [&](double theta, std::span<double> out) {
    for (std::size_t k = 0; k < radii.size(); ++k) out[k] = chart.sample(radii[k], theta).r;
  });
  double c = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) c = std::max(c, lengths.value[k] / radii[k]);
  return safety * c;
}

HypothesisReport hypotheses_report(const PolarChart& chart, const std::vector<double>& probe_radii,
                                   const HypothesisOptions& options) {
  if (probe_radii.empty()) throw Error(ErrorKind::invalid_input, "hypotheses: empty probe schedule");
  HypothesisReport rep;
  const auto thetas = chart.theta_nodes();
  std::vector<double> sup_k, sup_m, growth_radii;
  double inner = 0.0;
  const int n = std::max(options.samples_per_annulus, 2);
  for (double outer : probe_radii) {
    AnnulusSup a{inner, outer, 0.0, 0.0};
    for (int i = 1; i <= n; ++i) {
      const double s = inner + (outer - inner) * i / n;
      growth_radii.push_back(s);
      for (double th : thetas) {
        const ChartSample cs = chart.sample(s, th);
        a.sup_abs_K = std::max(a.sup_abs_K, std::abs(cs.K));
        a.sup_abs_M = std::max(a.sup_abs_M, std::abs(cs.M));
      }
    }
    a.sup_abs_K *= options.safety;
    a.sup_abs_M *= options.safety;
    sup_k.push_back(a.sup_abs_K);
    sup_m.push_back(a.sup_abs_M);
    rep.sigma0_annuli.push_back(a);
    inner = outer;
  }
  rep.sigma0 = combine(decay_verdict(sup_k), decay_verdict(sup_m));
  if (rep.sigma0 == Verdict::undecided) rep.notes.push_back("curvature suprema do not show a clear trend");

  rep.sigma1_abs_gauss = total_abs_gauss(chart, probe_radii);
  rep.sigma1 = probe_radii.size() < 3 ? Verdict::undecided
               : rep.sigma1_abs_gauss.divergent ? Verdict::fail
                                                : Verdict::pass;
  rep.sigma2_grad_mean = total_grad_mean_sq(chart, probe_radii);
  rep.sigma2 = probe_radii.size() < 3 ? Verdict::undecided
               : rep.sigma2_grad_mean.divergent ? Verdict::fail
                                                 : Verdict::pass;
  rep.growth_constant = growth_constant(chart, growth_radii, options.safety);
  for (const auto& w : chart.warnings()) rep.notes.push_back(w);
  return rep;
}

}  // namespace layerspec::surface
