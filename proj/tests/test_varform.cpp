#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "layerspec/cli/catalog.hpp"
#include "layerspec/error.hpp"
#include "layerspec/surface/hypotheses.hpp"
#include "layerspec/surface/revolution.hpp"
#include "layerspec/varform/certify.hpp"
#include "layerspec/varform/form.hpp"

using namespace layerspec;
using namespace layerspec::varform;
using layer::LayerSpec;
using surface::ChartSample;
using surface::PolarChart;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

LayerSpec catalog_layer(const std::string& name, double a, cli::Params p = {}) {
  return LayerSpec(cli::find_surface(name).build(p).chart, a);
}

// Gauss-Kronrod on the given panels.
double gk(const std::function<double(double)>& f, std::vector<double> br) {
  double sum = 0.0;
  for (std::size_t i = 1; i < br.size(); ++i) {
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, br[i - 1], br[i], 12, 1e-11);
  }
  return sum;
}

// Surface integral of density * r over s <= S: Gauss-Kronrod in s and, off
// axis symmetry, the periodic trapezoid rule with nt angles.
double oracle_surface(const PolarChart& chart, const std::function<double(const ChartSample&)>& density, double S,
                      std::vector<double> breaks, int nt = 256) {
  std::vector<double> br{0.0, S};
  for (double b : breaks) {
    if (b > 0.0 && b < S) br.push_back(b);
  }
  for (double b : chart.kinks()) {
    if (b > 0.0 && b < S) br.push_back(b);
  }
  std::sort(br.begin(), br.end());
  const auto ring = [&](double theta) {
    return gk(
        [&](double s) {
          const auto cs = chart.sample(s, theta);
          return density(cs) * cs.r;
        },
        br);
  };
  if (chart.axisymmetric()) return 2.0 * kPi * ring(0.0);
  double sum = 0.0;
  for (int i = 0; i < nt; ++i) sum += ring(2.0 * kPi * i / nt);
  return 2.0 * kPi * sum / nt;
}

// Profiles: cos^2 ramp and a quartic bump, both C^1 with compact support.
TrialFunction cos_trial(double S) {
  return radial_trial([S](double s) { return s >= S ? 0.0 : std::pow(std::cos(kPi * s / (2 * S)), 2); },
                      [S](double s) { return s >= S ? 0.0 : -kPi / (2 * S) * std::sin(kPi * s / S); }, S);
}
TrialFunction quartic_trial(double S) {
  return radial_trial([S](double s) { return s >= S ? 0.0 : std::pow(1 - (s / S) * (s / S), 2); },
                      [S](double s) { return s >= S ? 0.0 : -4 * s / (S * S) * (1 - (s / S) * (s / S)); }, S);
}

double profile(const TrialFunction& t, const PolarChart& chart, double s) { return t.at(chart, s, 0.0).alpha; }

}  // namespace

TEST_CASE("form: planar Gaussian reduces to the radial energy") {
  const auto L = catalog_layer("plane", 0.3);
  const auto t = radial_trial([](double s) { return std::exp(-s * s); },
                              [](double s) { return -2 * s * std::exp(-s * s); }, 9.0);
  const auto ev = evaluate_form(L, t);
  const double oracle = 2 * kPi * gk([](double s) { return 4 * s * s * std::exp(-2 * s * s) * s; }, {0, 2, 9});
  CHECK(rel(ev.q_tilde, oracle) <= 1e-8);
  CHECK(ev.q_tilde > 0.0);
  CHECK(ev.q1 >= 0.0);
  CHECK(ev.norm > 0.0);
  CHECK(ev.error <= 1e-8 * oracle);
}

TEST_CASE("form: planar shifted transverse part vanishes") {
  const auto L = catalog_layer("plane", 0.25);
  for (const auto& t : {cos_trial(4.0), quartic_trial(7.0), gj_trial(L, 1.0, 0.5)}) {
    const auto ev = evaluate_form(L, t);
    CHECK(std::abs(ev.q2_shifted) <= ev.q2_shifted_error + 1e-12 * L.threshold() * ev.norm);
    // The raw difference agrees with the split evaluation up to rounding.
    CHECK(std::abs(ev.q2 - L.threshold() * ev.norm) <= 1e-11 * L.threshold() * ev.norm);
  }
}

TEST_CASE("form: shifted transverse part equals (phi, K phi)_g") {
  struct Case {
    std::string name;
    double a;
    double tol;
  };
  for (const Case& c : {Case{"plane", 0.3, 1e-5}, Case{"hyperboloid", 0.3, 1e-6}, Case{"elliptic_paraboloid", 0.1, 1e-5}}) {
    CAPTURE(c.name);
    const auto L = catalog_layer(c.name, c.a);
    for (const auto& t : {gj_trial(L, 1.0, 0.1), cos_trial(5.0), quartic_trial(3.0)}) {
      const auto ev = evaluate_form(L, t);
      const double oracle = oracle_surface(
          L.chart(), [&](const ChartSample& cs) { return std::pow(profile(t, L.chart(), cs.s), 2) * cs.K; }, t.s_end,
          t.breaks, 64);
      const double scale = c.name == "plane" ? L.threshold() * ev.norm : std::abs(oracle);
      CHECK(std::abs(ev.q2_shifted - oracle) <= c.tol * scale);
    }
  }
}

TEST_CASE("form: transverse identity on every catalog layer") {
  for (const auto& e : cli::all_surfaces()) {
    if (e.construction == cli::Construction::none) continue;
    CAPTURE(e.name);
    const auto L = LayerSpec(e.build().chart, 0.1);
    for (const auto& t : {cos_trial(3.0), quartic_trial(2.0), gj_trial(L, 0.5, 1.0)}) {
      if (t.s_end > L.chart().s_max()) continue;
      const auto ev = evaluate_form(L, t);
      const double oracle = oracle_surface(
          L.chart(), [&](const ChartSample& cs) { return std::pow(profile(t, L.chart(), cs.s), 2) * cs.K; }, t.s_end,
          t.breaks, 512);
      const double scale = std::max(std::abs(oracle), 1e-6 * L.threshold() * ev.norm);
      CHECK(std::abs(ev.q2_shifted - oracle) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("form: longitudinal bound by the radial energy") {
  for (const char* name : {"hyperbolic_paraboloid", "hyperboloid", "elliptic_paraboloid", "capped_cylinder"}) {
    CAPTURE(name);
    const auto L = catalog_layer(name, 0.1);
    const double C = surface::growth_constant(L.chart(), surface::geometric_schedule(0.125, std::min(200.0, L.chart().s_max())));
    const auto [cm, cp] = layer::c_bounds(L);
    const double C1 = (cp / cm) * (cp / cm) * C;
    for (double sigma : {0.5, 0.1}) {
      const auto t = gj_trial(L, 1.0, sigma);
      if (t.s_end > std::min(200.0, L.chart().s_max())) continue;
      const auto ev = evaluate_form(L, t);
      const auto phi = macdonald_profile(1.0, sigma);
      const double energy = gk([&](double s) { return std::pow(phi.derivative(s), 2) * s; }, {1.0, 2.0, 4.0, phi.s_end});
      CHECK(ev.q1 <= C1 * energy);
      CHECK(ev.q1 > 0.0);
    }
  }
}

TEST_CASE("gj trial: profile shape") {
  const auto L = catalog_layer("plane", 0.3);
  for (double sigma : {1.0, 0.1, 1e-4}) {
    const auto t = gj_trial(L, 2.0, sigma);
    const auto phi = macdonald_profile(2.0, sigma);
    for (double s : {1e-6, 0.5, 1.0, 1.999, 2.0}) {
      CHECK(phi(s) == 1.0);
      CHECK(phi.derivative(s) == 0.0);
    }
    // Right limit at s0: uncut value 1, renormalized to exactly 1.
    CHECK(phi(2.0 * (1 + 1e-15)) == doctest::Approx(1.0).epsilon(1e-14));
    double prev = 1.0;
    for (double s = 2.01; s < phi.s_end; s *= 1.3) {
      CHECK(phi(s) < prev);
      prev = phi(s);
    }
    CHECK(phi(phi.s_end) == 0.0);
    // Cut level: the uncut ratio at s_end equals 1e-9.
    const double x0 = sigma * 2.0, xe = sigma * phi.s_end;
    const double uncut = boost::math::cyl_bessel_k(0, xe) / boost::math::cyl_bessel_k(0, x0);
    CHECK(rel(uncut, 1e-9) <= 1e-9);
    CHECK(t.value(L, 1.0, 0.3, 0.0) == doctest::Approx(layer::transverse_mode(L, 1)(0.0)));
    CHECK(t.value(L, 1.0, 0.3, 0.3) == 0.0);
  }
  CHECK_THROWS_AS(gj_trial(L, 1.0, 1.5), Error);
  CHECK_THROWS_AS(gj_trial(L, 0.0, 0.5), Error);
}

TEST_CASE("gj trial: derivative matches finite differences") {
  const auto phi = macdonald_profile(1.0, 0.05);
  for (double s : {1.5, 10.0, 80.0, 300.0}) {
    const double h = 1e-5 * s;
    CHECK(rel(phi.derivative(s), (phi(s + h) - phi(s - h)) / (2 * h)) <= 1e-7);
  }
}

TEST_CASE("derphi integral: closed form, decay and log scaling") {
  // int_{x0}^inf x K1^2 dx = x0^2/2 (K0^2 + 2 K0 K1 / x0 - K1^2).
  for (double x0 : {1e-2, 1e-4, 1e-8, 0.7}) {
    const double k0 = boost::math::cyl_bessel_k(0, x0), k1 = boost::math::cyl_bessel_k(1, x0);
    const double closed = 0.5 * x0 * x0 * (k0 * k0 + 2 * k0 * k1 / x0 - k1 * k1) / (k0 * k0);
    CHECK(rel(derphi_integral(1.0, x0), closed) <= 1e-9);
    CHECK(rel(derphi_integral(x0 / 0.3, 0.3), closed) <= 1e-9);
  }
  CHECK(derphi_integral(1.0, 1e-6) < derphi_integral(1.0, 1e-3));
  double lo = 1e300, hi = 0.0;
  for (int k = 2; k <= 8; ++k) {
    const double x0 = std::pow(10.0, -k);
    const double product = derphi_integral(1.0, x0) * std::abs(std::log(x0));
    lo = std::min(lo, product);
    hi = std::max(hi, product);
  }
  CHECK(hi / lo <= 3.0);
  // No derivative inside the plateau.
  CHECK(macdonald_profile(1e6, 0.1).derivative(5e5) == 0.0);
}

TEST_CASE("deformed trial: structure and errors") {
  const auto L = catalog_layer("hyperbolic_paraboloid", 0.1, {{"s_max", 1e3}});
  const Bump j = default_bump(L, 2.0);
  CHECK(j.s1 == 1.0);
  CHECK(j.s2 == 1.5);
  const auto base = gj_trial(L, 2.0, 0.1);
  const auto same = deformed_trial(L, 0.1, 2.0, 0.0, j);
  for (double s : {0.3, 1.2, 1.4, 7.0}) {
    for (double th : {0.0, 1.0, 4.0}) {
      const auto a = base.at(L.chart(), s, th), b = same.at(L.chart(), s, th);
      CHECK(a.alpha == b.alpha);
      CHECK(a.alpha_s == b.alpha_s);
      CHECK(b.beta == 0.0);
    }
  }
  CHECK(evaluate_form(L, same).q_tilde == evaluate_form(L, base).q_tilde);
  const auto d = deformed_trial(L, 0.1, 2.0, 0.7, j);
  for (double s : {1.1, 1.25, 1.4}) {
    CHECK(d.value(L, s, j.theta_c, 0.1) == 0.0);
    CHECK(d.value(L, s, j.theta_c, -0.1) == 0.0);
    CHECK(std::abs(d.value(L, s, j.theta_c, 0.05) - base.value(L, s, j.theta_c, 0.05)) > 0.0);
  }
  Bump wide = j;
  wide.s2 = 2.5;
  CHECK_THROWS_AS(deformed_trial(L, 0.1, 2.0, 0.5, wide), Error);
}

TEST_CASE("mixed term: polarization against -(j, M)_g") {
  SUBCASE("plane gives zero") {
    const auto L = catalog_layer("plane", 0.3);
    const auto m = mixed_term(L, 0.1, 2.0, Bump{1.0, 2.0});
    CHECK(std::abs(m.polarization) <= 1e-12);
    CHECK(m.surface == 0.0);
  }
  SUBCASE("hyperbolic paraboloid") {
    const auto L = catalog_layer("hyperbolic_paraboloid", 0.1, {{"s_max", 1e3}});
    // M changes sign with theta, so the bump needs an angular window.
    Bump j = default_bump(L, 2.0);
    j.s1 = 1.0;
    j.s2 = 2.0;
    REQUIRE_FALSE(j.radial());
    const auto m = mixed_term(L, 0.1, 2.0, j);
    // Independent tensor Gauss-Kronrod over the bump support.
    const double oracle = -gk(
        [&](double th) {
          return gk([&](double s) { const auto cs = L.chart().sample(s, th); return j(s, th) * cs.M * cs.r; },
                    {1.0, 1.5, 2.0});
        },
        {j.theta_c - j.half_width, j.theta_c, j.theta_c + j.half_width});
    CHECK(rel(m.polarization, oracle) <= 1e-4);
    CHECK(rel(m.surface, oracle) <= 1e-8);
    CHECK(std::abs(m.polarization) > 1e-3);

    const auto m2 = mixed_term(L, 0.02, 2.0, j);
    CHECK(std::abs(m2.polarization - m.polarization) <= m.polarization_error + m2.polarization_error);

    Bump flipped = j;
    flipped.sign = -1.0;
    CHECK(mixed_term(L, 0.1, 2.0, flipped).polarization == -m.polarization);

    // A radial bump integrates M against cos 2 theta to zero.
    const auto radial = mixed_term(L, 0.1, 2.0, Bump{1.0, 2.0});
    CHECK(std::abs(radial.polarization) <= 1e-8);
    CHECK(std::abs(radial.polarization - radial.surface) <= 1e-8);
  }
}

TEST_CASE("thin trial: transverse identity") {
  const auto L = catalog_layer("hyperboloid", 0.3);
  const double ksq = L.threshold();
  const double c = (kPi * kPi - 6) / (3 * ksq);
  for (double sigma : {0.1, 0.01}) {
    const auto t = thin_trial(L, sigma, 1.0);
    const auto phi = macdonald_profile(1.0, sigma);
    const auto ev = evaluate_form(L, t);
    const double rhs = oracle_surface(
        L.chart(),
        [&](const ChartSample& cs) {
          const double p = phi(cs.s);
          return p * p * (cs.K - cs.M * cs.M + c * cs.K * cs.M * cs.M);
        },
        phi.s_end, phi.breaks());
    CHECK(rel(ev.q2_shifted, rhs) <= 1e-5);
  }
  SUBCASE("plane reduces to the gj trial") {
    const auto P = catalog_layer("plane", 0.3);
    CHECK(evaluate_form(P, thin_trial(P, 0.2, 1.0)).q_tilde == evaluate_form(P, gj_trial(P, 1.0, 0.2)).q_tilde);
  }
  SUBCASE("elliptic paraboloid has negative (phi, (K - M^2) phi)_g") {
    const auto E = catalog_layer("elliptic_paraboloid", 0.05);
    for (double s0 : {1.0, 2.0, 4.0}) {
      const auto phi = macdonald_profile(s0, 0.1);
      const auto v = surface_integral(
          E.chart(), [&](double s, double, const ChartSample& cs) { return std::pow(phi(s), 2) * (cs.K - cs.M * cs.M); },
          phi.s_end, phi.breaks(), false);
      CHECK(v.value + v.error < 0.0);
    }
  }
}

TEST_CASE("symmetric log trial: support and closed forms") {
  const auto L = catalog_layer("hyperboloid", 0.3);
  const auto t = symmetric_log_trial(L, 10.0, 100.0, 1000.0, 0.4);
  for (double s : {1.0, 9.99, 10.0, 1000.0, 2000.0}) {
    for (double u : {-0.2, 0.0, 0.1}) CHECK(t.value(L, s, 0.0, u) == 0.0);
  }
  CHECK(t.value(L, 50.0, 0.0, 0.1) != 0.0);
  const LogRamp phi{10, 100, 1000};
  const double ln100 = std::log(100.0);
  CHECK(rel(gk([&](double s) { return std::pow(phi(s) / s, 2) * s; }, {10, 100, 1000}), ln100 / 3) <= 1e-12);
  CHECK(rel(ln100 / 3, 1.53506) <= 1e-5);
  CHECK(rel(gk([&](double s) { return std::pow(phi.derivative(s), 2) * s; }, {10, 100, 1000}),
            1 / std::log(10.0) + 1 / std::log(10.0)) <= 1e-12);
  // The ramp energy vanishes as n grows.
  double prev = 1e300;
  for (int n : {4, 16, 64, 256}) {
    const LogRamp p{double(n), double(n) * n, double(n) * n * n};
    const double e = 1 / std::log(p.b2 / p.b1) + 1 / std::log(p.b3 / p.b2);
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS_AS(symmetric_log_trial(L, 1000), Error);  // b3 = 1e9 > s_max
  try {
    symmetric_log_trial(L, 1000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::truncation);
  }
  const auto S = catalog_layer("hyperbolic_paraboloid", 0.1, {{"s_max", 1e3}});
  try {
    symmetric_log_trial(S, 5);
    FAIL("expected capability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capability);
  }
}

TEST_CASE("epsilon choice") {
  const auto P = catalog_layer("plane", 0.3);
  try {
    epsilon_choice(P, 3);
    FAIL("expected degenerate pairing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_pairing);
  }
  const auto L = catalog_layer("hyperboloid", 0.3);
  const auto ec = epsilon_choice(L, 10);
  const LogRamp phi{10, 100, 1000};
  const double pairing = oracle_surface(
      L.chart(), [&](const ChartSample& cs) { return phi(cs.s) * phi(cs.s) / cs.s * cs.M; }, 1000, {100});
  CHECK(std::isfinite(ec.eps));
  CHECK(rel(ec.eps, 1 / pairing) <= 1e-8);
  double prev = 0.0;
  for (int n : {5, 10, 20, 40}) {
    const double p = std::abs(epsilon_choice(L, n).pairing);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("form properties: symmetry and scaling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const char* name : {"hyperbolic_paraboloid", "hyperboloid"}) {
    CAPTURE(name);
    const auto L = catalog_layer(name, 0.1, {{"s_max", 1e3}});
    for (int k = 0; k < 3; ++k) {
      const auto A = gj_trial(L, 0.5 + U(rng), 0.2 + 0.5 * U(rng));
      Bump j = default_bump(L, 2.0);
      j.sign = U(rng) < 0.5 ? -1.0 : 1.0;
      const auto B = combine(1.0, cos_trial(1.0 + 2 * U(rng)), 0.3 + U(rng), deformation_trial(j));
      const auto ab = evaluate_bilinear(L, A, B), ba = evaluate_bilinear(L, B, A);
      CHECK(std::abs(ab.value - ba.value) <= ab.error + ba.error);

      const double c = 0.5 + 2 * U(rng);
      const auto base = evaluate_form(L, A);
      const auto scaled = evaluate_form(L, combine(c, A, 0.0, A));
      CHECK(rel(scaled.q_tilde, c * c * base.q_tilde) <= 1e-12);
    }
  }
}

TEST_CASE("symmetric log tail on the hyperboloid") {
  const auto L = catalog_layer("hyperboloid", 0.3);
  double prev = 1e300;
  for (int n : {10, 20, 40, 80}) {
    const auto ec = epsilon_choice(L, n);
    const double b = n;
    const LogRamp phi{b, b * b, b * b * b};
    const auto norm = surface_integral(
        L.chart(), [&](double s, double, const ChartSample&) { return std::pow(phi(s) / s, 2); }, phi.b3,
        {phi.b1, phi.b2}, true);
    const double surplus = norm.value / (ec.pairing * ec.pairing);
    CHECK(surplus < prev);
    prev = surplus;
  }
  // Eventually negative along the default sweep.
  bool negative = false;
  for (int n : {64, 128, 256, 464}) {
    const auto ev = evaluate_form(L, symmetric_log_trial(L, n, epsilon_choice(L, n).eps));
    negative = negative || ev.q_tilde + ev.error < 0.0;
  }
  CHECK(negative);
}

TEST_CASE("certify: catalog verdicts") {
  SUBCASE("hyperbolic paraboloid via gj") {
    const auto L = catalog_layer("hyperbolic_paraboloid", 0.1);
    const auto c = certify(L);
    CHECK(c.certified);
    CHECK(c.family == Family::goldstone_jaffe);
    CHECK(c.q_tilde + c.error < 0.0);
    CHECK(c.margin >= 3.0);
    CHECK(c.total_curvature == doctest::Approx(-2 * kPi).epsilon(0.01));

    // Stable under doubled resolution.
    FormOptions fine;
    fine.rel_tol = 1e-12;
    fine.u_points = 48;
    fine.u_points_check = 64;
    const auto again = evaluate_form(L, gj_trial(L, c.params[0].second, c.params[1].second), fine);
    CHECK(again.q_tilde + again.error < 0.0);
  }
  SUBCASE("plane finds nothing") {
    const auto c = certify(catalog_layer("plane", 0.3));
    CHECK_FALSE(c.certified);
    CHECK(c.best_q_tilde >= 0.0);
    CHECK_FALSE(c.attempts.empty());
  }
  SUBCASE("hyperboloid via symmetric log") {
    CertifyOptions o;
    o.strategies = {Strategy::symmetric_log};
    const auto c = certify(catalog_layer("hyperboloid", 0.3), o);
    CHECK(c.certified);
    CHECK(c.family == Family::symmetric_log);
    CHECK(c.margin >= 3.0);
  }
  SUBCASE("elliptic paraboloid via thin layer") {
    const auto c = certify(catalog_layer("elliptic_paraboloid", 0.05));
    CHECK(c.certified);
    CHECK(c.family == Family::thin_layer);
  }
  SUBCASE("no applicable family") {
    CertifyOptions o;
    o.strategies = {Strategy::symmetric_log};
    try {
      certify(catalog_layer("hyperbolic_paraboloid", 0.1, {{"s_max", 1e3}}), o);
      FAIL("expected capability error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capability);
    }
  }
  CHECK(parse_strategy("thin_layer") == Strategy::thin_layer);
  CHECK_THROWS_AS(parse_strategy("nope"), Error);
}
