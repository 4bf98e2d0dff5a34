#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "layerspec/layer/layer.hpp"
#include "layerspec/varform/form.hpp"
#include "layerspec/varform/trial.hpp"

namespace layerspec::varform {

enum class Strategy { goldstone_jaffe, deformed, thin_layer, symmetric_log };
const char* to_string(Strategy s) noexcept;
/// Parses the names printed by to_string; throws config otherwise.
Strategy parse_strategy(const std::string& name);

struct CertifyOptions {
  std::vector<Strategy> strategies{Strategy::goldstone_jaffe, Strategy::deformed, Strategy::thin_layer,
                                   Strategy::symmetric_log};
  std::vector<double> sigmas;  // empty: decades 1e-1 .. 1e-8 (plus the smallest that fits the chart)
  std::vector<int> ns;         // empty: 8, 16, 32, ... and the largest n with n^3 <= s_max
  double s0 = 1.0;
  double margin = 3.0;
  double budget_seconds = 300.0;
  /// Total Gauss curvature and its error; estimated from the chart when absent.
  std::optional<std::pair<double, double>> total_curvature;
  FormOptions form;
};

struct Attempt {
  Family family = Family::radial;
  std::vector<std::pair<std::string, double>> params;
  double q_tilde = 0.0;
  double error = 0.0;
  double seconds = 0.0;
};

struct Certificate {
  bool certified = false;
  Family family = Family::radial;
  std::vector<std::pair<std::string, double>> params;
  double q_tilde = 0.0;
  double error = 0.0;
  double margin = 0.0;  // |q_tilde| / error
  double best_q_tilde = 0.0;
  double total_curvature = 0.0, total_curvature_error = 0.0;
  std::vector<Attempt> attempts;
  std::vector<std::string> notes;  // skipped families and why
};

/// Runs the selected families in order and returns the first trial with
/// Q~ + error < 0 and |Q~| >= margin * error. Throws capability when no
/// selected family applies to the layer.
Certificate certify(const layer::LayerSpec& layer, const CertifyOptions& options = {});

}  // namespace layerspec::varform
