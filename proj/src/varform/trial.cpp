#include "layerspec/varform/trial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "layerspec/error.hpp"
#include "layerspec/num/bessel.hpp"
#include "layerspec/num/quadrature.hpp"

namespace layerspec::varform {
namespace {

constexpr double kPi = std::numbers::pi;

// exp(-1/(1 - t^2)) and its derivative.
std::pair<double, double> mollifier(double t) {
  if (std::abs(t) >= 1.0) return {0.0, 0.0};
  const double q = 1.0 - t * t;
  const double b = std::exp(-1.0 / q);
  return {b, -2.0 * t / (q * q) * b};
}

double wrap_angle(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x;
}

Coefficients scale_add(const Coefficients& x, double c, Coefficients acc) {
  acc.alpha += c * x.alpha;
  acc.alpha_s += c * x.alpha_s;
  acc.alpha_t += c * x.alpha_t;
  acc.beta += c * x.beta;
  acc.beta_s += c * x.beta_s;
  acc.beta_t += c * x.beta_t;
  return acc;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::invalid_input, std::string(what) + " must be positive");
}

}  // namespace

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::goldstone_jaffe: return "goldstone_jaffe";
    case Family::deformed: return "deformed";
    case Family::thin_layer: return "thin_layer";
    case Family::symmetric_log: return "symmetric_log";
    case Family::radial: return "radial";
    case Family::deformation: return "deformation";
    case Family::combination: return "combination";
  }
  return "unknown";
}

Coefficients TrialFunction::at(const surface::PolarChart& chart, double s, double theta) const {
  if (s > s_end) return {};
  return coefficients(s, theta, chart.sample(s, theta));
}

double TrialFunction::value(const layer::LayerSpec& layer, double s, double theta, double u) const {
  if (std::abs(u) >= layer.a()) return 0.0;
  const Coefficients c = at(layer.chart(), s, theta);
  return (c.alpha + c.beta * u) * layer::transverse_mode(layer, 1)(u);
}

double TrialFunction::param(const std::string& name) const {
  for (const auto& [k, v] : params) {
    if (k == name) return v;
  }
  throw Error(ErrorKind::invalid_input, "trial has no parameter " + name);
}

TrialFunction combine(double c1, const TrialFunction& A, double c2, const TrialFunction& B) {
  TrialFunction t;
  t.family = Family::combination;
  for (const auto& [k, v] : A.params) t.params.emplace_back("A." + k, v);
  for (const auto& [k, v] : B.params) t.params.emplace_back("B." + k, v);
  t.params.emplace_back("c1", c1);
  t.params.emplace_back("c2", c2);
  t.s_end = std::max(A.s_end, B.s_end);
  t.breaks = A.breaks;
  t.breaks.insert(t.breaks.end(), B.breaks.begin(), B.breaks.end());
  if (A.s_end < t.s_end) t.breaks.push_back(A.s_end);
  if (B.s_end < t.s_end) t.breaks.push_back(B.s_end);
  std::sort(t.breaks.begin(), t.breaks.end());
  t.breaks.erase(std::unique(t.breaks.begin(), t.breaks.end()), t.breaks.end());
  t.theta_breaks = A.theta_breaks;
  t.theta_breaks.insert(t.theta_breaks.end(), B.theta_breaks.begin(), B.theta_breaks.end());
  t.radial = A.radial && B.radial;
  t.coefficients = [A, B, c1, c2](double s, double theta, const surface::ChartSample& cs) {
    Coefficients out;
    if (s <= A.s_end) out = scale_add(A.coefficients(s, theta, cs), c1, out);
    if (s <= B.s_end) out = scale_add(B.coefficients(s, theta, cs), c2, out);
    return out;
  };
  return t;
}

// ---- Macdonald profile ----

double MacdonaldProfile::operator()(double s) const {
  if (s <= s0) return 1.0;
  if (s >= s_end) return 0.0;
  const double x = sigma * s, x0 = sigma * s0;
  const double raw = std::exp(x0 - x) * num::bessel_k_scaled(0, x) / num::bessel_k_scaled(0, x0);
  return std::max(raw - cut, 0.0) / (1.0 - cut);
}

double MacdonaldProfile::derivative(double s) const {
  if (s <= s0 || s >= s_end) return 0.0;
  const double x = sigma * s, x0 = sigma * s0;
  return -sigma * std::exp(x0 - x) * num::bessel_k_scaled(1, x) / num::bessel_k_scaled(0, x0) / (1.0 - cut);
}

std::vector<double> MacdonaldProfile::breaks() const {
  std::vector<double> b{s0};
  for (double s = 2.0 * s0; s < s_end; s *= 2.0) b.push_back(s);
  return b;
}

MacdonaldProfile macdonald_profile(double s0, double sigma, double cut) {
  require_positive(s0, "s0");
  require_positive(sigma, "sigma");
  if (!(cut > 0.0 && cut < 1.0)) throw Error(ErrorKind::invalid_input, "profile cut must lie in (0, 1)");
  MacdonaldProfile p{s0, sigma, cut, 0.0};
  const double x0 = sigma * s0;
  const double k0 = num::bessel_k_scaled(0, x0);
  // log of the uncut ratio at x; strictly decreasing.
  const auto log_ratio = [&](double x) { return x0 - x + std::log(num::bessel_k_scaled(0, x) / k0); };
  const double target = std::log(cut);
  double lo = x0, hi = x0 + 1.0;
  while (log_ratio(hi) > target) hi = x0 + 2.0 * (hi - x0);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_ratio(mid) > target ? lo : hi) = mid;
  }
  p.s_end = hi / sigma;
  return p;
}

double derphi_integral(double s0, double sigma) {
  require_positive(s0, "s0");
  require_positive(sigma, "sigma");
  const double x0 = sigma * s0;
  const double k0 = num::bessel_k_scaled(0, x0);
  // (K1(x)/K0(x0))^2 x in scaled form; negligible past x0 + 40.
  const auto f = [&](double x) {
    const double k1 = num::bessel_k_scaled(1, x);
    return std::exp(2.0 * (x0 - x)) * (k1 / k0) * (k1 / k0) * x;
  };
  std::vector<double> br{x0};
  for (double x = 2.0 * x0; x < x0 + 40.0; x *= 2.0) br.push_back(x);
  for (double x = std::max(br.back() + 1.0, 1.0); x < x0 + 40.0; x += 4.0) br.push_back(x);
  br.push_back(x0 + 40.0);
  double sum = 0.0;
  for (std::size_t i = 1; i < br.size(); ++i) sum += num::integrate_adaptive(f, br[i - 1], br[i], 1e-12).value;
  return sum;
}

// ---- bump ----

double Bump::operator()(double s, double theta) const { return with_derivatives(s, theta)[0]; }

std::array<double, 3> Bump::with_derivatives(double s, double theta) const {
  const double scale = 2.0 / (s2 - s1);
  const auto [b, db] = mollifier((2.0 * s - s1 - s2) / (s2 - s1));
  if (b == 0.0) return {0.0, 0.0, 0.0};
  if (radial()) return {sign * b, sign * db * scale, 0.0};
  const auto [w, dw] = mollifier(wrap_angle(theta - theta_c) / half_width);
  return {sign * b * w, sign * db * scale * w, sign * b * dw / half_width};
}

Bump default_bump(const layer::LayerSpec& layer, double s0) {
  require_positive(s0, "s0");
  const auto& chart = layer.chart();
  const bool axi = chart.axisymmetric();
  const int nt = axi ? 1 : 256, ns = 9;
  std::vector<std::pair<double, double>> annuli{{0.5 * s0, 0.75 * s0}};
  for (int k = 7; k >= 1; --k) annuli.emplace_back(s0 * k / 8.0, s0 * (k + 1) / 8.0);

  Bump fallback{0.5 * s0, 0.75 * s0, 0.0, 0.0, 1.0};
  for (const auto& [s1, s2] : annuli) {
    if (s2 > chart.s_max()) continue;
    std::vector<double> M(ns * nt);
    double big = 0.0;
    for (int i = 0; i < ns; ++i) {
      const double s = s1 + (s2 - s1) * (i + 1) / (ns + 1);
      for (int j = 0; j < nt; ++j) {
        M[i * nt + j] = chart.sample(s, 2.0 * kPi * j / nt).M;
        big = std::max(big, std::abs(M[i * nt + j]));
      }
    }
    if (big <= 1e-14) continue;
    const auto one_sign = [&](int j_lo, int j_hi) {
      int pos = 0, neg = 0;
      for (int i = 0; i < ns; ++i) {
        for (int j = j_lo; j <= j_hi; ++j) {
          const double m = M[i * nt + ((j % nt) + nt) % nt];
          pos += m > 0.0;
          neg += m < 0.0;
        }
      }
      return (pos == 0) != (neg == 0);
    };
    if (one_sign(0, nt - 1)) return {s1, s2, 0.0, 0.0, 1.0};
    // Angular window around the largest |M| at mid radius.
    int jc = 0;
    for (int j = 1; j < nt; ++j) {
      if (std::abs(M[(ns / 2) * nt + j]) > std::abs(M[(ns / 2) * nt + jc])) jc = j;
    }
    for (double hw = kPi / 2.0; hw >= kPi / 64.0; hw *= 0.5) {
      const int half = static_cast<int>(std::ceil(hw / (2.0 * kPi) * nt));
      if (one_sign(jc - half, jc + half)) return {s1, s2, 2.0 * kPi * jc / nt, hw, 1.0};
    }
  }
  return fallback;
}

// ---- families ----

TrialFunction gj_trial(const layer::LayerSpec& layer, double s0, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw Error(ErrorKind::invalid_input, "sigma must lie in (0, 1]");
  const MacdonaldProfile phi = macdonald_profile(s0, sigma);
  (void)layer;
  TrialFunction t;
  t.family = Family::goldstone_jaffe;
  t.params = {{"s0", s0}, {"sigma", sigma}};
  t.s_end = phi.s_end;
  t.breaks = phi.breaks();
  t.coefficients = [phi](double s, double, const surface::ChartSample&) {
    Coefficients c;
    c.alpha = phi(s);
    c.alpha_s = phi.derivative(s);
    return c;
  };
  return t;
}

TrialFunction deformation_trial(const Bump& j) {
  require_positive(j.s1, "bump s1");
  if (!(j.s2 > j.s1)) throw Error(ErrorKind::invalid_input, "bump needs s1 < s2");
  TrialFunction t;
  t.family = Family::deformation;
  t.params = {{"s1", j.s1}, {"s2", j.s2}, {"theta_c", j.theta_c}, {"half_width", j.half_width}};
  t.s_end = j.s2;
  t.breaks = {j.s1};
  t.radial = j.radial();
  if (!j.radial()) t.theta_breaks = {j.theta_c - j.half_width, j.theta_c + j.half_width};
  t.coefficients = [j](double s, double theta, const surface::ChartSample&) {
    const auto d = j.with_derivatives(s, theta);
    Coefficients c;
    c.beta = d[0];
    c.beta_s = d[1];
    c.beta_t = d[2];
    return c;
  };
  return t;
}

TrialFunction deformed_trial(const layer::LayerSpec& layer, double sigma, double s0, double eps, const Bump& j) {
  if (!(j.s1 > 0.0 && j.s2 > j.s1 && j.s2 <= s0)) {
    throw Error(ErrorKind::invalid_input, "deformation bump must be supported inside (0, s0]");
  }
  if (!j.radial() && !(j.half_width <= kPi)) throw Error(ErrorKind::invalid_input, "bump half-width exceeds pi");
  TrialFunction base = gj_trial(layer, s0, sigma);
  TrialFunction t = eps == 0.0 ? base : combine(1.0, base, eps, deformation_trial(j));
  t.family = Family::deformed;
  t.params = {{"s0", s0}, {"sigma", sigma}, {"eps", eps}, {"s1", j.s1}, {"s2", j.s2},
              {"theta_c", j.theta_c}, {"half_width", j.half_width}};
  return t;
}

TrialFunction thin_trial(const layer::LayerSpec& layer, double sigma, double s0) {
  TrialFunction t = gj_trial(layer, s0, sigma);
  const MacdonaldProfile phi = macdonald_profile(s0, sigma);
  const auto chart = layer.chart_ptr();
  t.family = Family::thin_layer;
  t.radial = chart->axisymmetric();
  t.coefficients = [phi, chart](double s, double theta, const surface::ChartSample& cs) {
    const auto [Ms, Mt] = chart->mean_gradient(s, theta);
    const double p = phi(s), dp = phi.derivative(s);
    Coefficients c;
    c.alpha = p;
    c.alpha_s = dp;
    c.beta = cs.M * p;
    c.beta_s = Ms * p + cs.M * dp;
    c.beta_t = Mt * p;
    return c;
  };
  return t;
}

double LogRamp::operator()(double s) const {
  if (s <= b1 || s >= b3) return 0.0;
  return s <= b2 ? std::log(s / b1) / std::log(b2 / b1) : std::log(b3 / s) / std::log(b3 / b2);
}

double LogRamp::derivative(double s) const {
  if (s <= b1 || s >= b3) return 0.0;
  return s <= b2 ? 1.0 / (s * std::log(b2 / b1)) : -1.0 / (s * std::log(b3 / b2));
}

TrialFunction symmetric_log_trial(const layer::LayerSpec& layer, double b1, double b2, double b3, double eps) {
  if (layer.chart().provenance() != surface::Provenance::revolution) {
    throw Error(ErrorKind::capability, "symmetric log trials need a surface-of-revolution chart");
  }
  if (!(b1 > 0.0 && b1 < b2 && b2 < b3)) throw Error(ErrorKind::invalid_input, "log ramp needs 0 < b1 < b2 < b3");
  if (b3 > layer.chart().s_max()) {
    throw Error(ErrorKind::truncation, "log ramp support ends beyond the chart (b3 = " + std::to_string(b3) +
                                           ", s_max = " + std::to_string(layer.chart().s_max()) + ")");
  }
  const LogRamp phi{b1, b2, b3};
  TrialFunction t;
  t.family = Family::symmetric_log;
  t.params = {{"b1", b1}, {"b2", b2}, {"b3", b3}, {"eps", eps}};
  t.s_end = b3;
  t.breaks = {b1, b2};
  // Geometric sub-panels: the ramps are smooth in ln s.
  for (double s = 2.0 * b1; s < b3; s *= 2.0) {
    if (s != b2) t.breaks.push_back(s);
  }
  std::sort(t.breaks.begin(), t.breaks.end());
  t.coefficients = [phi, eps](double s, double, const surface::ChartSample&) {
    const double p = phi(s), dp = phi.derivative(s);
    Coefficients c;
    c.alpha = p;
    c.alpha_s = dp;
    c.beta = eps * p / s;
    c.beta_s = eps * (dp / s - p / (s * s));
    return c;
  };
  return t;
}

TrialFunction symmetric_log_trial(const layer::LayerSpec& layer, int n, double eps) {
  if (n < 2) throw Error(ErrorKind::invalid_input, "symmetric log trials need n >= 2");
  const double b = n;
  TrialFunction t = symmetric_log_trial(layer, b, b * b, b * b * b, eps);
  t.params.insert(t.params.begin(), {"n", b});
  return t;
}

TrialFunction radial_trial(std::function<double(double)> phi, std::function<double(double)> dphi, double s_end,
                           std::vector<double> breaks) {
  require_positive(s_end, "s_end");
  TrialFunction t;
  t.family = Family::radial;
  t.params = {{"s_end", s_end}};
  t.s_end = s_end;
  t.breaks = std::move(breaks);
  t.coefficients = [phi = std::move(phi), dphi = std::move(dphi)](double s, double, const surface::ChartSample&) {
    Coefficients c;
    c.alpha = phi(s);
    c.alpha_s = dphi(s);
    return c;
  };
  return t;
}

}  // namespace layerspec::varform
