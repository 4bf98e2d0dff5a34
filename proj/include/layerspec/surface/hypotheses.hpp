#pragma once

#include <string>
#include <vector>

#include "layerspec/surface/chart.hpp"
#include "layerspec/surface/totals.hpp"

namespace layerspec::surface {

enum class Verdict { pass, fail, undecided };
const char* to_string(Verdict v) noexcept;

struct AnnulusSup {
  double s_inner = 0.0, s_outer = 0.0;
  double sup_abs_K = 0.0, sup_abs_M = 0.0;  // sampled, times the 1.05 safety factor
};

struct HypothesisReport {
  Verdict sigma0 = Verdict::undecided;
  std::vector<AnnulusSup> sigma0_annuli;
  Verdict sigma1 = Verdict::undecided;
  TotalCurvatureEstimate sigma1_abs_gauss;
  Verdict sigma2 = Verdict::undecided;
  TotalCurvatureEstimate sigma2_grad_mean;
  double growth_constant = 0.0;  // C with int r dtheta <= C s
  std::vector<std::string> notes;
};

struct HypothesisOptions {
  int samples_per_annulus = 64;
  double safety = 1.05;
};

HypothesisReport hypotheses_report(const PolarChart& chart, const std::vector<double>& probe_radii,
                                   const HypothesisOptions& options = {});

/// max over the given radii of (int r dtheta) / s, times the safety factor.
double growth_constant(const PolarChart& chart, const std::vector<double>& radii, double safety = 1.05);

}  // namespace layerspec::surface
