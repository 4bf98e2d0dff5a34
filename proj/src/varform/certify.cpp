#include "layerspec/varform/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "layerspec/error.hpp"
#include "layerspec/surface/totals.hpp"

namespace layerspec::varform {
namespace {

using Clock = std::chrono::steady_clock;

enum class Sign { negative, zero, positive, unknown };

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Decades from 1e-1 down to 1e-8 whose support fits the chart, plus the
// smallest sigma that still fits when some decade was dropped.
std::vector<double> sigma_sweep(double s0, double s_max) {
  const auto fits = [&](double sigma) { return macdonald_profile(s0, sigma).s_end <= s_max; };
  std::vector<double> out;
  bool dropped = false;
  for (int k = 1; k <= 8; ++k) {
    const double sigma = std::pow(10.0, -k);
    (fits(sigma) ? out.push_back(sigma) : void(dropped = true));
  }
  if (dropped && fits(1.0)) {
    double lo = std::log(1e-8), hi = 0.0;  // fits(exp(hi)) holds
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (fits(std::exp(mid)) ? hi : lo) = mid;
    }
    const double fit = std::exp(hi) * (1.0 + 1e-9);
    if (out.empty() || fit < out.back() / 1.01) out.push_back(fit);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<int> n_sweep(double s_max) {
  int top = static_cast<int>(std::floor(std::cbrt(s_max)));
  while (static_cast<double>(top + 1) * (top + 1) * (top + 1) <= s_max) ++top;
  while (top >= 2 && static_cast<double>(top) * top * top > s_max) --top;
  std::vector<int> out;
  for (int n = 8; n <= top; n *= 2) out.push_back(n);
  if (top >= 2 && (out.empty() || out.back() != top)) out.push_back(top);
  return out;
}

}  // namespace

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::goldstone_jaffe: return "goldstone_jaffe";
    case Strategy::deformed: return "deformed";
    case Strategy::thin_layer: return "thin_layer";
    case Strategy::symmetric_log: return "symmetric_log";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::goldstone_jaffe, Strategy::deformed, Strategy::thin_layer, Strategy::symmetric_log}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::config, "unknown certification strategy: " + name);
}

Certificate certify(const layer::LayerSpec& layer, const CertifyOptions& options) {
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const auto& chart = layer.chart();
  Certificate cert;
  cert.best_q_tilde = std::numeric_limits<double>::infinity();

  const auto uses = [&](Strategy s) {
    return std::find(options.strategies.begin(), options.strategies.end(), s) != options.strategies.end();
  };
  Sign sign = Sign::unknown;
  if (uses(Strategy::goldstone_jaffe) || uses(Strategy::deformed)) {
    if (options.total_curvature) {
      std::tie(cert.total_curvature, cert.total_curvature_error) = *options.total_curvature;
      sign = Sign::zero;
    } else {
      const auto est = surface::total_gauss(
          chart, surface::geometric_schedule(std::min(1.0, chart.s_max() / 64.0), chart.s_max()));
      cert.total_curvature = est.value;
      cert.total_curvature_error = est.error;
      sign = est.divergent ? Sign::unknown : Sign::zero;
      if (est.divergent) cert.notes.push_back("total Gauss curvature does not settle over the chart");
    }
    if (sign != Sign::unknown) {
      const double tol = std::max(2.0 * cert.total_curvature_error, 1e-8);
      sign = cert.total_curvature < -tol ? Sign::negative
             : cert.total_curvature > tol ? Sign::positive
                                          : Sign::zero;
    }
  }

  bool applicable = false;
  bool stop = false;
  // Evaluates one trial; true once it certifies. Sweeps run in parameter order
  // and stop at the first certificate.
  const auto attempt = [&](const TrialFunction& t) {
    if (elapsed() > options.budget_seconds) {
      cert.notes.push_back("time budget of " + fmt(options.budget_seconds) + " s exhausted");
      stop = true;
      return false;
    }
    const double t0 = elapsed();
    const FormEvaluation ev = evaluate_form(layer, t, options.form);
    cert.attempts.push_back({t.family, t.params, ev.q_tilde, ev.error, elapsed() - t0});
    cert.best_q_tilde = std::min(cert.best_q_tilde, ev.q_tilde);
    const bool ok = ev.converged && ev.q_tilde + ev.error < 0.0 && std::abs(ev.q_tilde) >= options.margin * ev.error;
    if (ok) {
      cert.certified = true;
      cert.family = t.family;
      cert.params = t.params;
      cert.q_tilde = ev.q_tilde;
      cert.error = ev.error;
      cert.margin = ev.error > 0.0 ? std::abs(ev.q_tilde) / ev.error : std::numeric_limits<double>::infinity();
    }
    return ok;
  };

  const double s0 = options.s0;
  const std::vector<double> sigmas = options.sigmas.empty() ? sigma_sweep(s0, chart.s_max()) : options.sigmas;
  std::vector<double> usable;
  for (double sg : sigmas) {
    if (macdonald_profile(s0, sg).s_end <= chart.s_max()) usable.push_back(sg);
  }

  for (Strategy strategy : options.strategies) {
    if (stop || cert.certified) break;
    switch (strategy) {
      case Strategy::goldstone_jaffe: {
        if (sign != Sign::negative && sign != Sign::zero) {
          cert.notes.push_back("goldstone_jaffe skipped: needs total Gauss curvature <= 0 (estimated " +
                               fmt(cert.total_curvature) + ")");
          break;
        }
        if (usable.empty()) {
          cert.notes.push_back("goldstone_jaffe skipped: no sigma has its support inside the chart");
          break;
        }
        applicable = true;
        for (double sg : usable) {
          if (attempt(gj_trial(layer, s0, sg)) || stop) break;
        }
        break;
      }
      case Strategy::deformed: {
        if (sign != Sign::zero) {
          cert.notes.push_back("deformed skipped: needs total Gauss curvature = 0 (estimated " +
                               fmt(cert.total_curvature) + ")");
          break;
        }
        if (usable.empty()) {
          cert.notes.push_back("deformed skipped: no sigma has its support inside the chart");
          break;
        }
        const Bump j = default_bump(layer, s0);
        const TrialFunction theta = deformation_trial(j);
        const double q_theta = evaluate_form(layer, theta, options.form).q_tilde;
        const auto mixed = evaluate_bilinear(layer, theta, gj_trial(layer, s0, usable.front()), options.form);
        if (std::abs(mixed.value) <= std::max(3.0 * mixed.error, 1e-12)) {
          cert.notes.push_back("deformed skipped: mixed term (j, M)_g vanishes for every admissible bump");
          break;
        }
        applicable = true;
        // The mixed term does not depend on sigma (phi_sigma = 1 on supp j).
        const double eps = q_theta > 0.0 ? -mixed.value / q_theta : -mixed.value;
        for (double sg : usable) {
          if (attempt(deformed_trial(layer, sg, s0, eps, j)) || stop) break;
        }
        break;
      }
      case Strategy::thin_layer: {
        if (usable.empty()) {
          cert.notes.push_back("thin_layer skipped: no sigma has its support inside the chart");
          break;
        }
        applicable = true;
        for (double sg : usable) {
          if (attempt(thin_trial(layer, sg, s0)) || stop) break;
        }
        break;
      }
      case Strategy::symmetric_log: {
        if (chart.provenance() != surface::Provenance::revolution) {
          cert.notes.push_back("symmetric_log skipped: chart is not a surface of revolution");
          break;
        }
        const std::vector<int> ns = options.ns.empty() ? n_sweep(chart.s_max()) : options.ns;
        bool any = false;
        for (int n : ns) {
          if (static_cast<double>(n) * n * n > chart.s_max()) continue;
          EpsilonChoice ec;
          try {
            ec = epsilon_choice(layer, n, options.form);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_pairing) throw;
            continue;
          }
          any = applicable = true;
          if (attempt(symmetric_log_trial(layer, n, ec.eps)) || stop) break;
        }
        if (!any) cert.notes.push_back("symmetric_log skipped: (phi_n, M phi_n / s)_g vanishes or b3 passes the chart");
        break;
      }
    }
  }

  if (!applicable) {
    std::string msg = "no certification family applies:";
    for (const auto& n : cert.notes) msg += " [" + n + "]";
    throw Error(ErrorKind::capability, msg);
  }
  return cert;
}

}  // namespace layerspec::varform
