#include "layerspec/num/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::num {
namespace {

constexpr double kEuler = 0.57721566490153286061;

void check(int order, double x) {
  if (order != 0 && order != 1) throw Error(ErrorKind::domain, "bessel_k: order must be 0 or 1");
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "bessel_k: argument must be positive and finite, got " << x;
    throw Error(ErrorKind::domain, msg.str());
  }
}

// Ascending series around 0, unscaled.
BesselK01 series(double x) {
  const double t = 0.25 * x * x;
  const double lg = std::log(0.5 * x);
  double term0 = 1.0;  // t^k / (k!)^2
  double term1 = 1.0;  // t^k / (k!(k+1)!)
  double harmonic = 0.0;
  double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double h_next = harmonic + 1.0 / (k + 1);
    i0 += term0;
    i1 += term1;
    s0 += term0 * harmonic;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    s1 += term1 * (harmonic + h_next);
    if (term0 < 1e-18 * i0 && k > 2) break;
    term0 *= t / ((k + 1.0) * (k + 1.0));
    term1 *= t / ((k + 1.0) * (k + 2.0));
    harmonic = h_next;
  }
  BesselK01 out;
  out.k0 = -(lg + kEuler) * i0 + s0;
  // K1 = 1/x + ln(x/2) I1 - (x/4) sum (psi(k+1)+psi(k+2)) t^k/(k!(k+1)!), I1 = (x/2) sum t^k/(k!(k+1)!)
  out.k1 = 1.0 / x + 0.5 * x * (lg + kEuler) * i1 - 0.25 * x * s1;
  return out;
}

// Steed's continued fraction CF2 for order 0, scaled by e^x.
BesselK01 steed_scaled(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  BesselK01 out;
  out.k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  out.k1 = out.k0 * (x + 0.5 - h) / x;
  return out;
}

// Hankel asymptotic expansion, scaled by e^x. Terms are summed until they stop decreasing.
double asymptotic_scaled(int order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * sum;
}

}  // namespace

BesselK01 bessel_k01_scaled(double x) {
  check(0, x);
  if (x <= 2.0) {
    BesselK01 v = series(x);
    const double e = std::exp(x);
    return {v.k0 * e, v.k1 * e};
  }
  if (x <= 25.0) return steed_scaled(x);
  return {asymptotic_scaled(0, x), asymptotic_scaled(1, x)};
}

double bessel_k_scaled(int order, double x) {
  check(order, x);
  const BesselK01 v = bessel_k01_scaled(x);
  return order == 0 ? v.k0 : v.k1;
}

double bessel_k(int order, double x) {
  check(order, x);
  if (x <= 2.0) {
    const BesselK01 v = series(x);
    return order == 0 ? v.k0 : v.k1;
  }
  if (bessel_k_underflows(order, x)) return 0.0;
  return bessel_k_scaled(order, x) * std::exp(-x);
}

bool bessel_k_underflows(int order, double x) noexcept {
  if (!(x > 2.0)) return false;
  // e^x K(x) is about sqrt(pi/(2x)); compare logarithms to avoid computing the product.
  const double log_value = -x + 0.5 * std::log(std::numbers::pi / (2.0 * x)) + (order == 1 ? 0.5 / x : -0.125 / x);
  return log_value < std::log(std::numeric_limits<double>::min());
}

}  // namespace layerspec::num
