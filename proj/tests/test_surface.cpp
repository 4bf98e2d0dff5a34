#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "layerspec/error.hpp"
#include "layerspec/surface/analytic.hpp"
#include "layerspec/surface/angular.hpp"
#include "layerspec/surface/graph.hpp"
#include "layerspec/surface/hypotheses.hpp"
#include "layerspec/surface/jacobi.hpp"
#include "layerspec/surface/revolution.hpp"
#include "layerspec/surface/totals.hpp"

using namespace layerspec;
using namespace layerspec::surface;

namespace {

constexpr double kPi = std::numbers::pi;

GraphSurface flat() {
  return {"flat", [](double, double) { return HeightJet{}; }};
}

GraphSurface saddle() {
  return {"saddle", [](double x, double y) {
            HeightJet j;
            j.f = x * x - y * y;
            j.fx = 2 * x;
            j.fy = -2 * y;
            j.fxx = 2;
            j.fyy = -2;
            return j;
          }};
}

GraphSurface monkey() {
  return {"monkey", [](double x, double y) {
            HeightJet j;
            j.f = x * x * x - 3 * x * y * y;
            j.fx = 3 * x * x - 3 * y * y;
            j.fy = -6 * x * y;
            j.fxx = 6 * x;
            j.fxy = -6 * y;
            j.fyy = -6 * x;
            j.fxxx = 6;
            j.fxyy = -6;
            return j;
          }};
}

GraphSurface paraboloid(double ax = 1, double ay = 1) {
  return {"paraboloid", [ax, ay](double x, double y) {
            HeightJet j;
            j.f = ax * x * x + ay * y * y;
            j.fx = 2 * ax * x;
            j.fy = 2 * ay * y;
            j.fxx = 2 * ax;
            j.fyy = 2 * ay;
            return j;
          }};
}

// Upper cap of a sphere of radius R centred at (0, 0, -R): apex at the origin.
GraphSurface dome(double R) {
  return {"dome", [R](double x, double y) {
            const double q = std::sqrt(R * R - x * x - y * y);
            HeightJet j;
            j.f = q - R;
            j.fx = -x / q;
            j.fy = -y / q;
            const double q3 = q * q * q;
            j.fxx = -(R * R - y * y) / q3;
            j.fyy = -(R * R - x * x) / q3;
            j.fxy = -x * y / q3;
            return j;
          }};
}

RevolutionProfile paraboloid_profile(double s_max) {
  return RevolutionProfile::from_height(
      "paraboloid", [](double r) { return HeightProfileJet{r * r, 2 * r, 2, 0}; }, s_max);
}

RevolutionProfile hyperboloid_profile(double z0, double s_max) {
  return RevolutionProfile::from_height(
      "hyperboloid",
      [z0](double r) {
        const double q = std::sqrt(1 + r * r);
        return HeightProfileJet{z0 * q, z0 * r / q, z0 / (q * q * q), -3 * z0 * r / (q * q * q * q * q)};
      },
      s_max);
}

MeridianSpec exm_spec(double s_max) {
  MeridianSpec ms;
  ms.k_s = [](double s) {
    const double t = s * s;
    return t < 1e-3 ? 1 - t * t / 6 + t * t * t * t / 120 : std::sin(t) / t;
  };
  ms.dk_s = [](double s) {
    const double t = s * s;
    return t < 1e-3 ? -2 * t * s / 3 + t * t * t * s / 15 : 2 * std::cos(t) / s - 2 * std::sin(t) / (t * s);
  };
  ms.s_max = s_max;
  return ms;
}

void check_identities(const PolarChart& chart, std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> us(1e-3, chart.s_max()), ut(0, 2 * kPi);
  for (int i = 0; i < n; ++i) {
    const ChartSample cs = chart.sample(us(rng), ut(rng));
    CHECK(std::abs(cs.K - cs.k1 * cs.k2) <= 1e-10 * (1 + std::abs(cs.K)));
    CHECK(std::abs(cs.M - 0.5 * (cs.k1 + cs.k2)) <= 1e-10 * (1 + std::abs(cs.M)));
    CHECK(cs.K - cs.M * cs.M <= 1e-12);
    CHECK(cs.r > 0);
  }
}

}  // namespace

TEST_CASE("jacobi field examples") {
  const double tol = 1e-10;
  auto flat_field = jacobi_field([](double) { return 0.0; }, 5.0, tol);
  for (double s : {0.1, 1.0, 2.5, 5.0}) CHECK(flat_field.r(s) == doctest::Approx(s).epsilon(1e-14));
  auto sphere = jacobi_field([](double) { return 1.0; }, kPi / 2, tol);
  CHECK(std::abs(sphere.r(kPi / 2) - 1.0) <= 10 * tol);
  auto pseudo = jacobi_field([](double) { return -1.0; }, 1.0, tol);
  CHECK(std::abs(pseudo.r(1.0) - 1.1752011936438014) <= 10 * tol);
  CHECK(std::abs(pseudo.rdot(1.0) - std::cosh(1.0)) <= 10 * tol);
}

TEST_CASE("jacobi field reports the conjugate point") {
  try {
    jacobi_field([](double) { return 1.0; }, 4.0);
    FAIL("expected a conjugate point");
  } catch (const ConjugatePoint& e) {
    CHECK(e.s_star() == doctest::Approx(kPi).epsilon(1e-8));
  }
}

TEST_CASE("meridian reconstruction examples") {
  MeridianSpec ms;
  ms.k_s = [](double) { return 0.0; };
  ms.s_max = 10;
  auto plane = RevolutionProfile::from_meridian("plane", ms);
  for (double s : {0.5, 3.0, 10.0}) {
    CHECK(plane.at(s).r == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(plane.at(s).z) < 1e-14);
  }
  const double R = 2.0;
  ms.k_s = [R](double) { return 1 / R; };
  ms.s_max = 3.0;
  auto sph = RevolutionProfile::from_meridian("sphere", ms);
  for (double s : {0.3, 1.5, 3.0}) {
    CHECK(std::abs(sph.at(s).r - R * std::sin(s / R)) < 1e-9);
    CHECK(std::abs(sph.at(s).k_theta - 1 / R) < 1e-8);
  }
  // Ex.M: b(inf) = sqrt(pi/2), so rdot tends to cos sqrt(pi/2).
  auto exm = RevolutionProfile::from_meridian("exm", exm_spec(64));
  CHECK(std::abs(exm.at(64).rdot - 0.31217557114276) < 1e-5);
  CHECK(std::abs(exm.at(64).zdot - std::sin(1.2533141373155)) < 1e-5);
}

TEST_CASE("meridian reaching the axis is rejected") {
  MeridianSpec ms;
  ms.k_s = [](double) { return 1.0; };
  ms.s_max = 5.0;
  try {
    RevolutionProfile::from_meridian("closed", ms);
    FAIL("expected an invalid surface");
  } catch (const InvalidSurface& e) {
    CHECK(e.s_cross() == doctest::Approx(kPi).epsilon(1e-8));
  }
}

TEST_CASE("revolution curvature examples") {
  auto cyl = RevolutionProfile::capped_cylinder(1.5, 20);
  auto c = revolution_curvatures(cyl, 10);
  CHECK(c.k_s == 0.0);
  CHECK(c.k_theta == doctest::Approx(1 / 1.5));
  auto sph = RevolutionProfile::sphere(2, 6);
  for (double s : {0.1, 1.0, 5.9}) {
    auto k = revolution_curvatures(sph, s);
    CHECK(k.k_s == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(k.k_theta == doctest::Approx(0.5).epsilon(1e-12));
  }
  auto pl = RevolutionProfile::plane(10);
  auto k = revolution_curvatures(pl, 3);
  CHECK(k.K == 0.0);
  CHECK(k.M == 0.0);
  CHECK_THROWS_AS(revolution_curvatures(pl, 0.0), Error);
}

TEST_CASE("canonical parametrization holds on profiles") {
  for (const auto& p : {hyperboloid_profile(1, 1e3), RevolutionProfile::from_meridian("exm", exm_spec(32)),
                        RevolutionProfile::capped_cylinder(1, 10)}) {
    for (int i = 1; i <= 200; ++i) {
      const auto q = p.at(p.s_max() * i / 200);
      CHECK(std::abs(q.rdot * q.rdot + q.zdot * q.zdot - 1) < 1e-10);
    }
  }
}

TEST_CASE("profile to meridian round trip") {
  const double S = 50;
  auto hyp = hyperboloid_profile(1.0, S);
  MeridianSpec ms;
  ms.k_s = [&hyp](double s) { return hyp.at(s).k_s; };
  ms.s_max = S;
  auto back = RevolutionProfile::from_meridian("roundtrip", ms, 1e-12);
  const double shift = hyp.at(0).z - back.at(0).z;
  for (int i = 1; i <= 100; ++i) {
    const double s = S * i / 100;
    CHECK(std::abs(back.at(s).r - hyp.at(s).r) < 1e-8);
    CHECK(std::abs(back.at(s).z + shift - hyp.at(s).z) < 1e-8);
  }
}

TEST_CASE("graph curvature examples") {
  auto z = graph_curvatures(flat(), 0.3, -2);
  CHECK(z.K == 0.0);
  CHECK(z.M == 0.0);
  auto s = graph_curvatures(saddle(), 0, 0);
  CHECK(s.K == doctest::Approx(-4));
  CHECK(s.M == doctest::Approx(0));
  CHECK(s.k1 == doctest::Approx(2));
  CHECK(s.k2 == doctest::Approx(-2));
  const double R = 3;
  auto d = graph_curvatures(dome(R), 0, 0);
  CHECK(d.K == doctest::Approx(1 / (R * R)));
  CHECK(d.M == doctest::Approx(-1 / R));
  auto p = graph_curvatures(paraboloid(), 0, 0);
  CHECK(p.M > 0);
}

TEST_CASE("flat fan is the polar map") {
  FanOptions fo;
  fo.theta_samples = 16;
  fo.s_max = 10;
  auto fan = geodesic_fan(flat(), fo);
  for (double s : {0.5, 4.0, 10.0}) {
    for (double th : {0.0, 1.0, 2.7, 5.5}) {
      const auto pp = fan->plane_point(s, th);
      CHECK(std::abs(pp[0] - s * std::cos(th)) < 1e-12);
      CHECK(std::abs(pp[1] - s * std::sin(th)) < 1e-12);
      CHECK(std::abs(fan->sample(s, th).r - s) < 1e-12);
    }
  }
}

TEST_CASE("paraboloid fan matches the profile chart") {
  FanOptions fo;
  fo.theta_samples = 24;
  fo.s_max = 100;
  auto fan = geodesic_fan(paraboloid(), fo);
  auto prof = paraboloid_profile(100);
  for (double s : {0.01, 0.5, 2.0, 17.0, 60.0, 100.0}) {
    const auto q = prof.at(s);
    for (double th : fan->theta_nodes()) {
      const auto cs = fan->sample(s, th);
      CHECK(std::abs(cs.r - q.r) <= 1e-6);
      CHECK(std::abs(cs.l_ss - q.k_s) <= 1e-8);
      CHECK(std::abs(cs.l_tt - q.k_theta) <= 1e-8);
      CHECK(std::abs(fan->point(s, th)[2] - q.z) <= 1e-6 * (1 + q.z));
    }
  }
}

TEST_CASE("fan geodesics have unit speed and Jacobi consistency") {
  FanOptions fo;
  fo.theta_samples = 48;
  fo.s_max = 2000;
  for (const auto& g : {saddle(), monkey(), paraboloid()}) {
    auto fan = geodesic_fan(g, fo);
    for (double s : {0.25, 3.0, 40.0, 700.0, 2000.0}) {
      for (double th : fan->theta_nodes()) {
        CHECK(std::abs(fan->speed(s, th) - 1) <= 1e-8);
        const double r = fan->sample(s, th).r;
        CHECK(std::abs(fan->dtheta_point_norm(s, th) - r) <= 1e-6 * r);
      }
      // Off-node directions are shot on demand.
      const double th = 0.123;
      CHECK(std::abs(fan->dtheta_point_norm(s, th) - fan->sample(s, th).r) <= 1e-6 * fan->sample(s, th).r);
    }
  }
}

TEST_CASE("fan frame is consistent with the graph normal") {
  FanOptions fo;
  fo.theta_samples = 12;
  fo.s_max = 5;
  auto fan = geodesic_fan(paraboloid(2, 0.5), fo);
  for (double th : fan->theta_nodes()) {
    const auto n = fan->normal(1.0, th);
    CHECK(n[2] > 0);
    const auto cs = fan->sample(1.0, th);
    const auto pp = fan->plane_point(1.0, th);
    const auto gc = graph_curvatures(fan->surface(), pp[0], pp[1]);
    CHECK(cs.K == doctest::Approx(gc.K).epsilon(1e-10));
    CHECK(cs.M == doctest::Approx(gc.M).epsilon(1e-10));
  }
}

TEST_CASE("analytic chart callbacks and domain") {
  AnalyticChart::Callbacks cb;
  cb.sample = [](double s, double) {
    ChartSample c;
    c.r = std::sin(s);
    c.r_s = std::cos(s);
    c.l_ss = c.l_tt = 1;
    return c;
  };
  AnalyticChart sphere("unit-sphere", cb, 3.0, true);
  CHECK(sphere.sample(1.0, 0.0).K == doctest::Approx(1));
  CHECK(sphere.sample(1.0, 0.0).M == doctest::Approx(1));
  CHECK_THROWS_AS(sphere.sample(3.5, 0.0), Error);
  CHECK_THROWS_AS(sphere.sample(0.0, 0.0), Error);
  CHECK_THROWS_AS(sphere.point(1.0, 0.0), Error);
}

TEST_CASE("anisotropic paraboloid fan truncates at the conjugate point") {
  FanOptions fo;
  fo.theta_samples = 16;
  fo.s_max = 50;
  auto fan = geodesic_fan(paraboloid(1, 3), fo);
  CHECK(fan->s_max() < 50);
  REQUIRE(!fan->warnings().empty());
  CHECK(fan->warnings().front().find("conjugate") != std::string::npos);
  CHECK_THROWS_AS(fan->sample(fan->s_max() * 1.01, 0.0), Error);
  CHECK(fan->sample(0.99 * fan->s_max(), 0.0).r > 0.0);
}

TEST_CASE("curvature identities on charts") {
  std::mt19937_64 rng(7);
  FanOptions fo;
  fo.theta_samples = 32;
  fo.s_max = 500;
  check_identities(*geodesic_fan(saddle(), fo), rng, 300);
  check_identities(*geodesic_fan(monkey(), fo), rng, 300);
  check_identities(*geodesic_fan(paraboloid(1, 4), fo), rng, 300);  // truncated chart
  check_identities(RevolutionChart(hyperboloid_profile(1, 1e3)), rng, 300);
  check_identities(RevolutionChart(RevolutionProfile::from_meridian("exm", exm_spec(32))), rng, 300);
  check_identities(RevolutionChart(RevolutionProfile::capped_cylinder(1, 40)), rng, 300);
}

TEST_CASE("geometric schedule ends at s_max with ratio two") {
  auto r = geometric_schedule(1.0, 100.0);
  CHECK(r.back() == 100.0);
  CHECK(r.front() >= 1.0);
  CHECK(r.front() < 2.0);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] / r[i - 1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(geometric_schedule(0.0, 1.0), Error);
}

TEST_CASE("extrapolation of geometric and divergent sequences") {
  TotalCurvatureEstimate est;
  for (int i = 0; i < 8; ++i) est.partials.push_back(3.0 - std::pow(0.5, i));
  extrapolate(est, {});
  CHECK(!est.divergent);
  CHECK(est.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(est.error >= std::abs(est.partials[7] - est.partials[6]));
  est.partials.clear();
  for (int i = 0; i < 8; ++i) est.partials.push_back(i * 0.7);
  extrapolate(est, {});
  CHECK(est.divergent);
  CHECK(est.value == doctest::Approx(4.9));
}

TEST_CASE("total curvature of the plane is zero") {
  auto est = total_gauss(RevolutionChart(RevolutionProfile::plane(100)), geometric_schedule(1, 100));
  CHECK(est.value == 0.0);
  CHECK(!est.divergent);
  auto m2 = total_mean_sq(RevolutionChart(RevolutionProfile::plane(100)), geometric_schedule(1, 100));
  CHECK(m2.value == 0.0);
  FanOptions fo;
  fo.theta_samples = 16;
  auto fan = total_gauss(*geodesic_fan(flat(), fo), geometric_schedule(1, 100));
  CHECK(fan.value == 0.0);
}

TEST_CASE("total Gauss curvature of the saddles") {
  FanOptions fo;
  fo.s_max = 1e4;
  auto sad = total_gauss(*geodesic_fan(saddle(), fo), geometric_schedule(1, 1e4));
  CHECK(!sad.divergent);
  CHECK(std::abs(sad.value + 2 * kPi) <= 0.01 * 2 * kPi);
  CHECK(sad.error >= std::abs(sad.partials.back() - sad.partials[sad.partials.size() - 2]));
  auto mon = total_gauss(*geodesic_fan(monkey(), fo), geometric_schedule(1, 1e4));
  CHECK(!mon.divergent);
  CHECK(std::abs(mon.value + 4 * kPi) <= 0.01 * 4 * kPi);
}

TEST_CASE("elliptic paraboloid totals") {
  FanOptions fo;
  fo.s_max = 1e4;
  auto fan = geodesic_fan(paraboloid(), fo);
  auto k = total_gauss(*fan, geometric_schedule(1, 1e4));
  CHECK(std::abs(k.value - 2 * kPi) <= 0.01 * 2 * kPi);
  auto m2 = total_mean_sq(*fan, geometric_schedule(1, 1e4));
  CHECK(m2.divergent);
  auto cart = cartesian_total_gauss(paraboloid(), geometric_schedule(1, 1e3));
  CHECK(std::abs(cart.value - 2 * kPi) <= 1e-3);
}

TEST_CASE("cartesian cross-check of the saddle") {
  auto cart = cartesian_total_gauss(saddle(), geometric_schedule(1, 1e3));
  CHECK(std::abs(cart.value + 2 * kPi) <= 1e-3);
}

TEST_CASE("capped cylinder has divergent total mean curvature") {
  auto chart = RevolutionChart(RevolutionProfile::capped_cylinder(1, 64));
  auto m2 = total_mean_sq(chart, geometric_schedule(1, 64));
  CHECK(m2.divergent);
  auto k = total_gauss(chart, geometric_schedule(1, 64));
  CHECK(k.value == doctest::Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("Gauss-Bonnet residuals") {
  CHECK(gauss_bonnet_residual(RevolutionProfile::plane(100)).residual < 1e-14);
  auto hyp = gauss_bonnet_residual(hyperboloid_profile(1, 1e4));
  CHECK(hyp.residual <= 1e-3);
  CHECK(hyp.rdot_end == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(std::abs(hyp.total - 2 * kPi * (1 - 1 / std::sqrt(2.0))) < 1e-5);
  auto exm = gauss_bonnet_residual(RevolutionProfile::from_meridian("exm", exm_spec(64)));
  CHECK(exm.residual <= 1e-3);
  CHECK(std::abs(exm.total / kPi - 1.37564885771447) < 0.01 * 1.37564885771447);
  CHECK(gauss_bonnet_residual(RevolutionProfile::capped_cylinder(1, 64)).residual <= 1e-3);
}

TEST_CASE("Gauss-Bonnet refuses an oscillating rdot") {
  // k_s = cos s keeps b(s) = sin s oscillating forever.
  MeridianSpec ms;
  ms.k_s = [](double s) { return std::cos(s); };
  ms.s_max = 256;
  auto p = RevolutionProfile::from_meridian("wobble", ms);
  try {
    gauss_bonnet_residual(p);
    FAIL("expected no-limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_limit);
  }
}

TEST_CASE("hypothesis verdicts") {
  auto plane = hypotheses_report(RevolutionChart(RevolutionProfile::plane(100)), geometric_schedule(1, 100));
  CHECK(plane.sigma0 == Verdict::pass);
  CHECK(plane.sigma1 == Verdict::pass);
  CHECK(plane.sigma2 == Verdict::pass);
  CHECK(plane.growth_constant >= 2 * kPi);
  CHECK(plane.growth_constant <= 2 * kPi * 1.05 + 1e-12);

  auto cyl = hypotheses_report(RevolutionChart(RevolutionProfile::capped_cylinder(1, 64)), geometric_schedule(1, 64));
  CHECK(cyl.sigma0 == Verdict::fail);

  auto exm = hypotheses_report(RevolutionChart(RevolutionProfile::from_meridian("exm", exm_spec(64))),
                               geometric_schedule(1, 64));
  CHECK(exm.sigma1 == Verdict::pass);
  CHECK(exm.sigma2 == Verdict::fail);
  CHECK(exm.sigma2_grad_mean.divergent);
}

TEST_CASE("estimate r < s holds with the reported constant") {
  std::mt19937_64 rng(11);
  FanOptions fo;
  fo.theta_samples = 48;
  fo.s_max = 1000;
  auto fan = geodesic_fan(saddle(), fo);
  const auto rep = hypotheses_report(*fan, geometric_schedule(1, 1000));
  CHECK(rep.sigma0 == Verdict::pass);
  std::uniform_real_distribution<double> u(1e-3, 1000);
  std::vector<double> radii(1000);
  for (auto& s : radii) s = u(rng);
  const auto lengths = integrate_angle(*fan, radii.size(), [&](double th, std::span<double> out) {
    for (std::size_t k = 0; k < radii.size(); ++k) out[k] = fan->sample(radii[k], th).r;
  });
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(lengths.value[k] <= rep.growth_constant * radii[k]);

  auto hyp = RevolutionChart(hyperboloid_profile(1, 1e3));
  const double C = hypotheses_report(hyp, geometric_schedule(1, 1e3)).growth_constant;
  for (double s : radii) CHECK(2 * kPi * hyp.sample(s, 0).r <= C * s);
}

TEST_CASE("angular integration of a peaked periodic function") {
  FanOptions fo;
  fo.theta_samples = 16;
  fo.s_max = 1;
  auto fan = geodesic_fan(flat(), fo);
  // int exp(k cos t) dt = 2 pi I0(k); for k = 40 the integrand is sharply peaked.
  const auto res = integrate_angle(*fan, 1, [](double t, std::span<double> out) { out[0] = std::exp(40 * (std::cos(t) - 1)); }, 1e-12);
  // 2 pi I0(40) e^{-40}
  CHECK(res.value[0] == doctest::Approx(0.39758915837567634).epsilon(1e-10));
}
