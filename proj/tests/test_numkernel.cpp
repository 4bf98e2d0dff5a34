#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "layerspec/error.hpp"
#include "layerspec/num/bessel.hpp"
#include "layerspec/num/kernels.hpp"
#include "layerspec/num/ode.hpp"
#include "layerspec/num/quadrature.hpp"
#include "layerspec/num/sparse.hpp"

using namespace layerspec;
using namespace layerspec::num;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Integral representation K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, summed on
// unit panels until the integrand is negligible.
double k_integral(int order, double x) {
  const double tmax = std::acosh(1.0 + 760.0 / x) + 1.0;
  std::vector<double> panels;
  for (double t = 0.0; t < tmax; t += 0.25) panels.push_back(t);
  panels.push_back(tmax);
  const auto grid = gauss_legendre(30, panels);
  // Factor out exp(-x) to stay in range.
  return grid.integrate([&](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(order * t); });
}

}  // namespace

TEST_CASE("gauss_legendre: single midpoint node") {
  const std::vector<double> panel{-1.0, 1.0};
  const auto g = gauss_legendre(1, panel);
  REQUIRE(g.size() == 1);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.weights[0] == 2.0);
}

TEST_CASE("gauss_legendre: x^2 on [0,1] with two points") {
  const std::vector<double> panel{0.0, 1.0};
  const auto g = gauss_legendre(2, panel);
  CHECK(std::abs(g.integrate([](double x) { return x * x; }) - 1.0 / 3.0) <= 1e-15);
}

TEST_CASE("gauss_legendre: sin on [0,pi]") {
  const std::vector<double> panel{0.0, std::numbers::pi};
  const auto g = gauss_legendre(20, panel);
  CHECK(std::abs(g.integrate([](double x) { return std::sin(x); }) - 2.0) <= 1e-12);
}

TEST_CASE("gauss_legendre: rejects bad input") {
  const std::vector<double> bad{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(gauss_legendre(3, bad), Error);
  const std::vector<double> ok{0.0, 1.0};
  CHECK_THROWS_AS(gauss_legendre(0, ok), Error);
}

TEST_CASE("gauss_legendre: weights, nodes and degree exactness on random polynomials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int n : {1, 2, 3, 5, 8, 13, 24, 40, 64}) {
    const std::vector<double> panels{-0.5, 0.1, 0.3, 2.0};
    const auto g = gauss_legendre(n, panels);
    double wsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      wsum += g.weights[i];
      CHECK(g.weights[i] > 0.0);
      const std::size_t p = i / n;
      CHECK(g.nodes[i] > panels[p]);
      CHECK(g.nodes[i] < panels[p + 1]);
    }
    CHECK(rel(wsum, 2.5) <= 1e-14);
    for (int trial = 0; trial < 10; ++trial) {
      const int degree = 2 * n - 1;
      std::vector<double> c(degree + 1);
      for (double& v : c) v = coef(rng);
      // Polynomial in the panel-local variable t in [-1, 1]; exact integral from the even coefficients.
      for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
        const double lo = panels[p], hi = panels[p + 1], half = 0.5 * (hi - lo);
        auto poly = [&](double x) {
          const double t = (2.0 * x - lo - hi) / (hi - lo);
          double acc = 0.0;
          for (int k = degree; k >= 0; --k) acc = acc * t + c[k];
          return acc;
        };
        double exact = 0.0, scale = 0.0;
        for (int k = 0; k <= degree; k += 2) exact += 2.0 * c[k] / (k + 1);
        for (int k = 0; k <= degree; ++k) scale += std::abs(c[k]);
        exact *= half;
        const std::vector<double> one{lo, hi};
        const auto gp = gauss_legendre(n, one);
        CHECK(std::abs(gp.integrate(poly) - exact) <= 1e-14 * half * scale);
      }
    }
  }
}

TEST_CASE("integrate_adaptive: peaked and kinked integrands") {
  const auto r1 = integrate_adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12);
  CHECK(r1.converged);
  CHECK(rel(r1.value, 2.0 * std::atan(1.0 / 1e-2) / 1e-2) <= 1e-10);
  const auto r2 = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12);
  CHECK(rel(r2.value, 0.5 * 0.09 + 0.5 * 0.49) <= 1e-10);
}

TEST_CASE("integrate_ode: constant solution") {
  const std::vector<double> y0{3.5};
  const auto traj = integrate_ode([](double, std::span<const double>, std::span<double> dy) { dy[0] = 0.0; }, y0, 0.0,
                                  10.0, 1e-10);
  for (double s : {0.0, 0.7, 3.3, 10.0}) CHECK(traj.eval(s, 0) == 3.5);
}

TEST_CASE("integrate_ode: harmonic oscillator and exponential") {
  const double tol = 1e-10;
  const std::vector<double> y0{0.0, 1.0};
  const auto osc = integrate_ode(
      [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
      },
      y0, 0.0, std::numbers::pi / 2, tol);
  CHECK(std::abs(osc.eval(std::numbers::pi / 2, 0) - 1.0) <= 10 * tol);

  const std::vector<double> one{1.0};
  const auto ex = integrate_ode([](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0]; }, one,
                                0.0, 1.0, tol);
  CHECK(std::abs(ex.eval(1.0, 0) - std::numbers::e) <= 10 * tol);
  // Dense output between nodes.
  for (double s : {0.1234, 0.5, 0.987}) CHECK(std::abs(ex.eval(s, 0) - std::exp(s)) <= 10 * tol);
}

TEST_CASE("integrate_ode: dense output reproduces stored samples exactly") {
  const std::vector<double> y0{0.0, 1.0};
  const auto traj = integrate_ode(
      [](double s, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -(1.0 + 0.5 * std::sin(s)) * y[0];
      },
      y0, 0.0, 20.0, 1e-9);
  REQUIRE(traj.steps() > 10);
  for (std::size_t i = 0; i < traj.abscissae().size(); ++i) {
    const auto st = traj.state(i);
    const auto ev = traj.eval(traj.abscissae()[i]);
    CHECK(ev[0] == st[0]);
    CHECK(ev[1] == st[1]);
  }
  CHECK_THROWS_AS(traj.eval(20.5), Error);
}

TEST_CASE("integrate_ode: endpoint error follows the tolerance") {
  std::vector<double> tols, errs;
  for (double tol = 1e-5; tol >= 1e-11; tol /= 4) {
    const std::vector<double> y0{0.0, 1.0};
    const auto traj = integrate_ode(
        [](double, std::span<const double> y, std::span<double> dy) {
          dy[0] = y[1];
          dy[1] = -y[0];
        },
        y0, 0.0, 10.0, tol);
    tols.push_back(std::log(tol));
    errs.push_back(std::log(std::abs(traj.eval(10.0, 0) - std::sin(10.0))));
  }
  // Least-squares slope of log(error) against log(tol).
  const double n = static_cast<double>(tols.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < tols.size(); ++i) {
    sx += tols[i];
    sy += errs[i];
    sxx += tols[i] * tols[i];
    sxy += tols[i] * errs[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  MESSAGE("tolerance proportionality exponent " << slope);
  CHECK(slope > 0.7);
  CHECK(slope < 1.4);
}

TEST_CASE("integrate_ode: step underflow reports the last good abscissa") {
  const std::vector<double> y0{1.0};
  try {
    integrate_ode([](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; }, y0, 0.0, 2.0,
                  1e-10);
    FAIL("expected IntegrationFailure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.kind() == ErrorKind::integration_failure);
    CHECK(e.last_good_s() < 1.0);
    CHECK(e.last_good_s() > 0.99);
  }
}

TEST_CASE("integrate_ode: event stops at the root") {
  const std::vector<double> y0{0.0, 1.0};
  OdeOptions opt;
  opt.event = [](double s, std::span<const double> y) { return s < 1.0 ? 1.0 : y[0]; };
  const auto traj = integrate_ode(
      [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
      },
      y0, 0.0, 10.0, opt);
  CHECK(traj.event_hit());
  CHECK(std::abs(traj.event_s() - std::numbers::pi) <= 1e-8);
  CHECK(traj.back() == traj.event_s());
}

TEST_CASE("bessel_k: reference values") {
  // Oracle computed to 20 digits with an arbitrary-precision library.
  struct Row {
    double x, k0, k1;
  };
  const Row rows[] = {
      {1e-8, 18.536612259610778388, 99999999.999999902725},
      {1e-3, 7.0236888005623813228, 999.99623815608555346},
      {0.5, 0.92441907122766586178, 1.6564411200033008937},
      {1.0, 0.42102443824070833334, 0.60190723019723457474},
      {2.0, 0.11389387274953343565, 0.13986588181652242728},
      {2.0001, 0.11387988708044136641, 0.13984750046881139493},
      {5.0, 0.0036910983340425942747, 0.0040446134454521642084},
      {20.0, 5.7412378153365242927e-10, 5.8830579695570381777e-10},
      {100.0, 4.6566282291759020189e-45, 4.6798537356369092866e-45},
      {700.0, 4.669776431685376881e-306, 4.6731107967079661091e-306},
  };
  for (const Row& r : rows) {
    CAPTURE(r.x);
    CHECK(rel(bessel_k(0, r.x), r.k0) <= 1e-10);
    CHECK(rel(bessel_k(1, r.x), r.k1) <= 1e-10);
  }
  CHECK(std::abs(bessel_k(0, 1.0) - 0.42102443824) <= 1e-10);
}

TEST_CASE("bessel_k: integral representation oracle on a dense grid") {
  for (double x = 1e-2; x <= 700.0; x *= 1.37) {
    CAPTURE(x);
    CHECK(rel(bessel_k_scaled(0, x), k_integral(0, x)) <= 1e-10);
    CHECK(rel(bessel_k_scaled(1, x), k_integral(1, x)) <= 1e-10);
  }
}

TEST_CASE("bessel_k: asymptotic leading term and derivative identity") {
  const double lead = std::sqrt(std::numbers::pi / 40.0) * std::exp(-20.0);
  CHECK(std::abs(bessel_k(0, 20.0) / lead - 1.0) <= 0.02);
  const double h = 1e-5;
  const double fd = (bessel_k(0, 2.0 + h) - bessel_k(0, 2.0 - h)) / (2 * h);
  CHECK(std::abs(fd + bessel_k(1, 2.0)) <= 1e-8);
}

TEST_CASE("bessel_k: domain, positivity, monotone decrease") {
  CHECK_THROWS_AS(bessel_k(0, 0.0), Error);
  CHECK_THROWS_AS(bessel_k(1, -1.0), Error);
  CHECK_THROWS_AS(bessel_k(2, 1.0), Error);
  CHECK(bessel_k(0, 800.0) == 0.0);
  CHECK(bessel_k_underflows(0, 800.0));
  CHECK(bessel_k_scaled(0, 800.0) > 0.0);
  double prev0 = std::numeric_limits<double>::infinity(), prev1 = prev0;
  for (double x = 1e-8; x <= 700.0; x *= 1.01) {
    const double k0 = bessel_k(0, x), k1 = bessel_k(1, x);
    CHECK(bessel_k_scaled(0, x) * bessel_k_scaled(1, x) > 0.0);
    CHECK(k0 < prev0);
    CHECK(k1 < prev1);
    prev0 = k0;
    prev1 = k1;
  }
}

namespace {

SparseSymmetricPair dirichlet_pair(int n, double h) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0 / (h * h)});
    if (i > 0) t.push_back({i, i - 1, -1.0 / (h * h)});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0 / (h * h)});
  }
  std::vector<double> ones(n, 1.0);
  return {CsrMatrix::from_triplets(n, n, t), CsrMatrix::diagonal(ones)};
}

SparseSymmetricPair random_pair(int n, std::uint64_t seed, bool diagonal_mass) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> a, b;
  for (int i = 0; i < n; ++i) {
    a.push_back({i, i, 4.0 + 2.0 * u(rng)});
    b.push_back({i, i, 1.5 + u(rng)});
    for (int j = i + 1; j < std::min(n, i + 6); ++j) {
      if (u(rng) > 0.0) {
        const double v = u(rng);
        a.push_back({i, j, v});
        a.push_back({j, i, v});
      }
      if (!diagonal_mass && j == i + 1) {
        const double v = 0.2 * u(rng);
        b.push_back({i, j, v});
        b.push_back({j, i, v});
      }
    }
  }
  return {CsrMatrix::from_triplets(n, n, a), CsrMatrix::from_triplets(n, n, b)};
}

Eigen::MatrixXd dense(const CsrMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) d(r, m.col_index()[k]) += m.values()[k];
  return d;
}

}  // namespace

TEST_CASE("lowest_eigenpairs: diagonal example") {
  std::vector<double> a{1.0, 2.0, 3.0}, one{1.0, 1.0, 1.0};
  SparseSymmetricPair pair{CsrMatrix::diagonal(a), CsrMatrix::diagonal(one)};
  const auto e = lowest_eigenpairs(pair, 1);
  REQUIRE(e.size() == 1);
  CHECK(std::abs(e[0].value - 1.0) <= 1e-12);
}

TEST_CASE("lowest_eigenpairs: second-difference closed form") {
  const int n = 400;
  const double h = 1.0 / (n + 1);
  const auto e = lowest_eigenpairs(dirichlet_pair(n, h), 3);
  for (int j = 1; j <= 3; ++j) {
    const double exact = 4.0 / (h * h) * std::pow(std::sin(j * std::numbers::pi * h / 2.0), 2);
    CHECK(rel(e[j - 1].value, exact) <= 1e-10);
    CHECK(e[j - 1].residual <= 1e-9);
  }
}

TEST_CASE("lowest_eigenpairs: mass scaling halves the spectrum") {
  const auto p1 = dirichlet_pair(50, 0.1);
  std::vector<double> two(50, 2.0);
  SparseSymmetricPair p2{p1.stiffness, CsrMatrix::diagonal(two)};
  const auto e1 = lowest_eigenpairs(p1, 4), e2 = lowest_eigenpairs(p2, 4);
  for (int i = 0; i < 4; ++i) CHECK(rel(e2[i].value, 0.5 * e1[i].value) <= 1e-12);
}

TEST_CASE("lowest_eigenpairs: input validation") {
  const auto p = dirichlet_pair(5, 0.1);
  CHECK_THROWS_AS(lowest_eigenpairs(p, 5), Error);
  CHECK_THROWS_AS(lowest_eigenpairs(p, 0), Error);
  std::vector<Triplet> asym{{0, 1, 1.0}, {1, 0, 2.0}, {0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  std::vector<double> one(3, 1.0);
  SparseSymmetricPair bad{CsrMatrix::from_triplets(3, 3, asym), CsrMatrix::diagonal(one)};
  CHECK_THROWS_AS(lowest_eigenpairs(bad, 1), Error);
  std::vector<double> zero{1.0, 0.0, 1.0};
  SparseSymmetricPair badmass{CsrMatrix::diagonal(one), CsrMatrix::diagonal(zero)};
  CHECK_THROWS_AS(lowest_eigenpairs(badmass, 1), Error);
}

TEST_CASE("lowest_eigenpairs: agrees with a dense solver on random pairs") {
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 20 + 15 * trial;  // up to 185
    const bool diag = trial % 2 == 0;
    const auto pair = random_pair(n, 100 + trial, diag);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(dense(pair.stiffness), dense(pair.mass));
    const int k = 1 + trial % 5;
    const auto e = lowest_eigenpairs(pair, k);
    for (int i = 0; i < k; ++i) {
      CAPTURE(n);
      CAPTURE(i);
      CHECK(rel(e[i].value, ges.eigenvalues()[i]) <= 1e-10);
      const Eigen::Map<const Eigen::VectorXd> v(e[i].vector.data(), n);
      CHECK(std::abs(v.dot(dense(pair.mass) * v) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("lowest_eigenpairs: negative spectrum, explicit shift, CG fallback, determinism") {
  auto pair = random_pair(120, 9, true);
  std::vector<Triplet> shifted;
  for (int r = 0; r < 120; ++r)
    for (int k = pair.stiffness.row_ptr()[r]; k < pair.stiffness.row_ptr()[r + 1]; ++k)
      shifted.push_back({r, pair.stiffness.col_index()[k], pair.stiffness.values()[k]});
  for (int i = 0; i < 120; ++i) shifted.push_back({i, i, -10.0});
  pair.stiffness = CsrMatrix::from_triplets(120, 120, shifted);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(dense(pair.stiffness), dense(pair.mass));

  const auto automatic = lowest_eigenpairs(pair, 3);
  EigenOptions explicit_shift;
  explicit_shift.shift = ges.eigenvalues()[0] - 1.0;
  const auto given = lowest_eigenpairs(pair, 3, explicit_shift);
  EigenOptions cg;
  cg.method = EigenMethod::cg_inverse_iteration;
  const auto fallback = lowest_eigenpairs(pair, 3, cg);
  for (int i = 0; i < 3; ++i) {
    CHECK(rel(automatic[i].value, ges.eigenvalues()[i]) <= 1e-10);
    CHECK(rel(given[i].value, ges.eigenvalues()[i]) <= 1e-10);
    CHECK(rel(fallback[i].value, ges.eigenvalues()[i]) <= 1e-9);
  }
  CHECK(count_below(pair, ges.eigenvalues()[2] + 1e-9) == 3);

  const auto again = lowest_eigenpairs(pair, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(again[i].value == automatic[i].value);
    CHECK(again[i].vector == automatic[i].vector);
  }
}

TEST_CASE("quadrature: vector adaptive") {
  using namespace layerspec::num;
  const double br[] = {0.0, 1.0, 3.0};
  const auto f = [](double x, std::span<double> out) {
    out[0] = x * x;
    out[1] = std::sin(10.0 * x);
    out[2] = 1.0 / (1e-4 + (x - 0.3) * (x - 0.3));
    out[3] = 0.0;
  };
  // The last component is identically zero; an absolute floor lets it converge.
  VectorQuadratureOptions opt;
  opt.rel_tol = 1e-12;
  opt.tolerance = [](std::span<const double> scale, std::span<double> tol) { tol[3] = 1e-300 + 1e-15 * scale[0]; };
  const auto r = integrate_vector(f, br, 4, opt);
  CHECK(r.converged);
  CHECK(rel(r.value[0], 9.0) <= 1e-14);
  CHECK(rel(r.value[1], (1.0 - std::cos(30.0)) / 10.0) <= 1e-11);
  const double peak = (std::atan(2.7 / 1e-2) + std::atan(0.3 / 1e-2)) / 1e-2;
  CHECK(rel(r.value[2], peak) <= 1e-11);
  CHECK(r.value[3] == 0.0);
  CHECK(r.error[2] <= 1e-12 * peak);

  opt.parallel = true;
  const auto again = integrate_vector(f, br, 4, opt);
  CHECK(again.value == r.value);

  VectorQuadratureOptions tight;
  tight.rel_tol = 1e-15;
  tight.max_panels = 8;
  const auto capped = integrate_vector(f, br, 4, tight);
  CHECK_FALSE(capped.converged);
  CHECK(capped.panels <= 8);
  const double bad[] = {1.0, 0.0};
  CHECK_THROWS_AS(integrate_vector(f, bad, 4), Error);
}

TEST_CASE("simd: backends agree") {
  using namespace layerspec::num::simd;
  if (!backend_available(Backend::avx2)) {
    MESSAGE("AVX2 not available; only the scalar backend is exercised");
    return;
  }
  const KernelTable& s = kernels(Backend::scalar);
  const KernelTable& v = kernels(Backend::avx2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 1000u, 1003u}) {
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
    CHECK(std::abs(s.dot(a, b) - v.dot(a, b)) <= 1e-13 * std::max(scale, 1.0));
    std::vector<double> y1 = b, y2 = b;
    s.axpy(0.37, a, y1);
    v.axpy(0.37, a, y2);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
  }

  const auto pair = random_pair(157, 5, false);
  std::vector<double> x(157), y1(157), y2(157);
  for (auto& e : x) e = u(rng);
  s.csr_spmv(pair.stiffness.view(), x, y1);
  v.csr_spmv(pair.stiffness.view(), x, y2);
  for (int i = 0; i < 157; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13 * (1.0 + std::abs(y1[i])));

  for (int nu : {1, 5, 8, 24, 27}) {
    std::vector<double> uu(nu), w(nu), chi(nu), dchi(nu);
    for (int i = 0; i < nu; ++i) {
      uu[i] = 0.3 * u(rng);
      w[i] = 0.01 + std::abs(u(rng));
      chi[i] = u(rng);
      dchi[i] = u(rng);
    }
    FormColumnCoeffs c{0.4, -0.2, 0.7, 1.3, 0.9, -0.3, 0.5, 0.2, 0.1, -0.4, 27.4};
    const TransverseNodes t{uu, w, chi, dchi};
    const auto r1 = s.form_column(c, t), r2 = v.form_column(c, t);
    CHECK(rel(r2.longitudinal, r1.longitudinal) <= 1e-13);
    CHECK(rel(r2.transverse, r1.transverse) <= 1e-13);
    CHECK(rel(r2.norm, r1.norm) <= 1e-13);
    CHECK(std::abs(r2.curvature_shift - r1.curvature_shift) <= 1e-13 * (1.0 + r1.transverse + 27.4 * r1.norm));
  }
}

TEST_CASE("simd: backend selection") {
  using namespace layerspec::num::simd;
  const Backend before = active_backend();
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  if (!backend_available(Backend::avx2)) CHECK_THROWS_AS(set_backend(Backend::avx2), Error);
  set_backend(before);
}
