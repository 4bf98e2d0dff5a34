#include "layerspec/varform/form.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "layerspec/error.hpp"
#include "layerspec/num/kernels.hpp"
#include "layerspec/num/quadrature.hpp"

namespace layerspec::varform {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using ColumnFn = std::function<void(double s, double theta, const surface::ChartSample& cs, std::span<double> out)>;
// Fills per-component tolerances from per-component magnitude scales.
using ToleranceFn = std::function<void(std::span<const double> scale, double rel, std::span<double> tol)>;

struct Support {
  double s_end = 0.0;
  std::vector<double> breaks;
  bool radial = true;
  std::vector<double> theta_breaks;
};

Support support_of(const TrialFunction& t) { return {t.s_end, t.breaks, t.radial, t.theta_breaks}; }

Support support_of(const TrialFunction& A, const TrialFunction& B) {
  Support s{std::max(A.s_end, B.s_end), A.breaks, A.radial && B.radial, A.theta_breaks};
  s.breaks.insert(s.breaks.end(), B.breaks.begin(), B.breaks.end());
  s.breaks.push_back(std::min(A.s_end, B.s_end));
  s.theta_breaks.insert(s.theta_breaks.end(), B.theta_breaks.begin(), B.theta_breaks.end());
  return s;
}

struct LayerQuadrature {
  std::vector<double> value, error;
  int evaluations = 0;
  bool converged = true;
};

// Adaptive in s for each theta, adaptive in theta outside (skipped when both
// chart and integrand are rotation invariant). s errors ride along as extra
// components of the theta integral.
LayerQuadrature integrate_support(const surface::PolarChart& chart, const Support& sup, std::size_t width,
                                  const ColumnFn& column, const ToleranceFn& tolerance, const FormOptions& opt) {
  if (!(sup.s_end > 0.0)) throw Error(ErrorKind::invalid_input, "trial support is empty");
  if (sup.s_end > chart.s_max() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::truncation, "trial support (s <= " + std::to_string(sup.s_end) +
                                           ") passes the chart (s_max = " + std::to_string(chart.s_max()) + ")");
  }
  std::vector<double> breaks{0.0, sup.s_end};
  for (double b : sup.breaks) {
    if (b > 0.0 && b < sup.s_end) breaks.push_back(b);
  }
  for (double b : chart.kinks()) {
    if (b > 0.0 && b < sup.s_end) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::atomic<int> evaluations{0};
  std::atomic<bool> converged{true};
  num::VectorQuadratureOptions so;
  so.rel_tol = opt.rel_tol;
  so.max_panels = opt.max_s_panels;
  so.tolerance = [&](std::span<const double> scale, std::span<double> tol) { tolerance(scale, opt.rel_tol, tol); };

  // out: width values followed by width s-errors.
  const auto radial_pass = [&](double theta, std::span<double> out) {
    const auto r = num::integrate_vector(
        [&](double s, std::span<double> col) { column(s, theta, chart.sample(s, theta), col); }, breaks, width, so);
    evaluations += r.evaluations;
    if (!r.converged) converged = false;
    std::copy(r.value.begin(), r.value.end(), out.begin());
    std::copy(r.error.begin(), r.error.end(), out.begin() + static_cast<std::ptrdiff_t>(width));
  };

  LayerQuadrature res;
  if (sup.radial && chart.axisymmetric()) {
    std::vector<double> out(2 * width);
    radial_pass(0.0, out);
    res.value.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(width));
    res.error.assign(out.begin() + static_cast<std::ptrdiff_t>(width), out.end());
    for (auto& v : res.value) v *= kTwoPi;
    for (auto& v : res.error) v *= kTwoPi;
  } else {
    std::vector<double> tb;
    for (int i = 0; i <= opt.initial_theta_panels; ++i) tb.push_back(kTwoPi * i / opt.initial_theta_panels);
    for (double t : sup.theta_breaks) {
      const double w = t - kTwoPi * std::floor(t / kTwoPi);
      if (w > 0.0 && w < kTwoPi) tb.push_back(w);
    }
    std::sort(tb.begin(), tb.end());
    tb.erase(std::unique(tb.begin(), tb.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), tb.end());

    num::VectorQuadratureOptions to;
    to.rel_tol = opt.theta_rel_tol;
    to.max_panels = opt.max_theta_panels;
    to.points = 7;
    to.parallel = true;
    to.tolerance = [&](std::span<const double> scale, std::span<double> tol) {
      tolerance(scale.first(width), opt.theta_rel_tol, tol.first(width));
      for (std::size_t c = width; c < 2 * width; ++c) tol[c] = 0.25 * scale[c] + 1e-300;
    };
    const auto r = num::integrate_vector(radial_pass, tb, 2 * width, to);
    if (!r.converged) converged = false;
    res.value.assign(r.value.begin(), r.value.begin() + static_cast<std::ptrdiff_t>(width));
    res.error.resize(width);
    for (std::size_t c = 0; c < width; ++c) res.error[c] = r.error[c] + std::abs(r.value[width + c]);
  }
  res.evaluations = evaluations;
  res.converged = converged;
  return res;
}

struct Rule {
  std::vector<double> u, w, chi, dchi;
  num::simd::TransverseNodes nodes() const { return {u, w, chi, dchi}; }
};

Rule transverse_rule(const layer::LayerSpec& layer, int n) {
  const auto& g = num::gauss_rule(n);
  const auto mode = layer::transverse_mode(layer, 1);
  Rule r;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double u = layer.a() * g.x[i];
    r.u.push_back(u);
    r.w.push_back(layer.a() * g.w[i]);
    r.chi.push_back(mode(u));
    r.dchi.push_back(mode.derivative(u));
  }
  return r;
}

num::simd::FormColumnCoeffs column_coeffs(const surface::ChartSample& cs, const Coefficients& c, double kappa_sq) {
  return {cs.l_ss, cs.l_st, cs.l_tt, cs.r, c.alpha, c.alpha_s, c.alpha_t, c.beta, c.beta_s, c.beta_t, kappa_sq};
}

Coefficients coefficients_at(const TrialFunction& t, double s, double theta, const surface::ChartSample& cs) {
  return s <= t.s_end ? t.coefficients(s, theta, cs) : Coefficients{};
}

Coefficients add(const Coefficients& x, double c, const Coefficients& y) {
  return {x.alpha + c * y.alpha, x.alpha_s + c * y.alpha_s, x.alpha_t + c * y.alpha_t,
          x.beta + c * y.beta,   x.beta_s + c * y.beta_s,   x.beta_t + c * y.beta_t};
}

// Rounding scale of the curvature part: |f - 1| bounds times the transverse magnitudes.
double shift_noise(const surface::ChartSample& cs, double a, const num::simd::FormColumnSums& s, double kappa_sq) {
  return (2.0 * a * std::abs(cs.M) + a * a * std::abs(cs.K)) * (s.transverse + kappa_sq * s.norm);
}

void check_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorKind::evaluation, "non-finite form integrand");
  }
}

}  // namespace

FormEvaluation evaluate_form(const layer::LayerSpec& layer, const TrialFunction& trial, const FormOptions& options) {
  const double ksq = layer.threshold();
  const Rule ra = transverse_rule(layer, options.u_points);
  const Rule rb = transverse_rule(layer, options.u_points_check);
  const auto& kern = num::simd::active_kernels();
  const double a = layer.a();

  // Per rule: Q1, Qs, N, Q2; then the noise scale of Qs (rule A).
  constexpr std::size_t W = 9;
  const ColumnFn column = [&](double s, double theta, const surface::ChartSample& cs, std::span<double> out) {
    const auto fc = column_coeffs(cs, coefficients_at(trial, s, theta, cs), ksq);
    const auto A = kern.form_column(fc, ra.nodes());
    const auto B = kern.form_column(fc, rb.nodes());
    const double flat = cs.r * fc.beta * fc.beta;
    out[0] = A.longitudinal;
    out[1] = flat + A.curvature_shift;
    out[2] = A.norm;
    out[3] = A.transverse;
    out[4] = B.longitudinal;
    out[5] = flat + B.curvature_shift;
    out[6] = B.norm;
    out[7] = B.transverse;
    out[8] = shift_noise(cs, a, A, ksq);
    check_finite(out);
  };
  const ToleranceFn tolerance = [](std::span<const double> scale, double rel, std::span<double> tol) {
    for (std::size_t c = 0; c < 8; ++c) tol[c] = rel * scale[c] + 1e-300;
    tol[1] = std::max(tol[1], 1e-13 * scale[8]);
    tol[5] = std::max(tol[5], 1e-13 * scale[8]);
    tol[8] = 0.5 * scale[8] + 1e-300;
  };
  const auto q = integrate_support(layer.chart(), support_of(trial), W, column, tolerance, options);

  FormEvaluation ev;
  ev.q1 = q.value[0];
  ev.q2_shifted = q.value[1];
  ev.norm = q.value[2];
  ev.q2 = q.value[3];
  ev.q_tilde = ev.q1 + ev.q2_shifted;
  const double floor = 1e-13 * std::abs(q.value[8]) + 1e-14 * (std::abs(ev.q1) + std::abs(ev.q2_shifted));
  ev.q1_error = q.error[0];
  ev.q2_shifted_error = q.error[1] + floor;
  ev.norm_error = q.error[2];
  ev.rule_difference = std::abs((q.value[4] + q.value[5]) - ev.q_tilde);
  ev.error = q.error[0] + q.error[1] + ev.rule_difference + floor;
  ev.evaluations = q.evaluations;
  ev.converged = q.converged;
  return ev;
}

BilinearEvaluation evaluate_bilinear(const layer::LayerSpec& layer, const TrialFunction& A, const TrialFunction& B,
                                     const FormOptions& options) {
  const double ksq = layer.threshold();
  const Rule ra = transverse_rule(layer, options.u_points);
  const Rule rb = transverse_rule(layer, options.u_points_check);
  const auto& kern = num::simd::active_kernels();
  const double a = layer.a();

  // Per rule: polarized Q1 part and shifted transverse part; then the noise scale.
  constexpr std::size_t W = 5;
  const ColumnFn column = [&](double s, double theta, const surface::ChartSample& cs, std::span<double> out) {
    const Coefficients ca = coefficients_at(A, s, theta, cs), cb = coefficients_at(B, s, theta, cs);
    const auto plus = column_coeffs(cs, add(ca, 1.0, cb), ksq);
    const auto minus = column_coeffs(cs, add(ca, -1.0, cb), ksq);
    const double flat = 0.25 * cs.r * (plus.beta * plus.beta - minus.beta * minus.beta);
    std::size_t k = 0;
    for (const Rule* rule : {&ra, &rb}) {
      const auto p = kern.form_column(plus, rule->nodes());
      const auto m = kern.form_column(minus, rule->nodes());
      out[k++] = 0.25 * (p.longitudinal - m.longitudinal);
      out[k++] = flat + 0.25 * (p.curvature_shift - m.curvature_shift);
      if (rule == &ra) {
        out[4] = shift_noise(cs, a, p, ksq) + shift_noise(cs, a, m, ksq) +
                 1e-3 * (p.longitudinal + m.longitudinal);
      }
    }
    check_finite(out);
  };
  const ToleranceFn tolerance = [](std::span<const double> scale, double rel, std::span<double> tol) {
    for (std::size_t c = 0; c < 4; ++c) tol[c] = std::max(rel * scale[c], 1e-13 * scale[4]) + 1e-300;
    tol[4] = 0.5 * scale[4] + 1e-300;
  };
  const auto q = integrate_support(layer.chart(), support_of(A, B), W, column, tolerance, options);

  BilinearEvaluation ev;
  ev.value = q.value[0] + q.value[1];
  const double diff = std::abs(q.value[2] + q.value[3] - ev.value);
  ev.error = q.error[0] + q.error[1] + diff + 1e-13 * std::abs(q.value[4]) + 1e-14 * std::abs(ev.value);
  ev.evaluations = q.evaluations;
  ev.converged = q.converged;
  return ev;
}

SurfaceIntegral surface_integral(const surface::PolarChart& chart,
                                 const std::function<double(double, double, const surface::ChartSample&)>& density,
                                 double s_end, const std::vector<double>& breaks, bool radial,
                                 const std::vector<double>& theta_breaks, const FormOptions& options) {
  const ColumnFn column = [&](double s, double theta, const surface::ChartSample& cs, std::span<double> out) {
    out[0] = density(s, theta, cs) * cs.r;
    check_finite(out);
  };
  const ToleranceFn tolerance = [](std::span<const double> scale, double rel, std::span<double> tol) {
    tol[0] = rel * scale[0] + 1e-300;
  };
  const auto q = integrate_support(chart, {s_end, breaks, radial, theta_breaks}, 1, column, tolerance, options);
  return {q.value[0], q.error[0], q.converged};
}

MixedTerm mixed_term(const layer::LayerSpec& layer, double sigma, double s0, const Bump& j,
                     const FormOptions& options) {
  // Validates the bump placement against s0.
  (void)deformed_trial(layer, sigma, s0, 0.0, j);
  const TrialFunction theta = deformation_trial(j);
  const TrialFunction psi = gj_trial(layer, s0, sigma);
  MixedTerm m;
  const auto b = evaluate_bilinear(layer, theta, psi, options);
  m.polarization = b.value;
  m.polarization_error = b.error;
  const auto surf = surface_integral(
      layer.chart(), [&](double s, double t, const surface::ChartSample& cs) { return -j(s, t) * cs.M; }, j.s2,
      {j.s1}, j.radial(), theta.theta_breaks, options);
  m.surface = surf.value;
  m.surface_error = surf.error;
  return m;
}

EpsilonChoice epsilon_choice(const layer::LayerSpec& layer, double b1, double b2, double b3,
                             const FormOptions& options) {
  const TrialFunction t = symmetric_log_trial(layer, b1, b2, b3, 0.0);
  const LogRamp phi{b1, b2, b3};
  const auto pairing = surface_integral(
      layer.chart(),
      [&](double s, double, const surface::ChartSample& cs) {
        const double p = phi(s);
        return p * p / s * cs.M;
      },
      t.s_end, t.breaks, true, {}, options);
  if (!(std::abs(pairing.value) >= 1e-12)) {
    throw Error(ErrorKind::degenerate_pairing, "(phi_n, M phi_n / s)_g vanishes; eps_n undefined");
  }
  return {1.0 / pairing.value, pairing.value, pairing.error};
}

EpsilonChoice epsilon_choice(const layer::LayerSpec& layer, int n, const FormOptions& options) {
  if (n < 2) throw Error(ErrorKind::invalid_input, "symmetric log trials need n >= 2");
  const double b = n;
  return epsilon_choice(layer, b, b * b, b * b * b, options);
}

}  // namespace layerspec::varform
