#include "layerspec/spectrum/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>

#include "layerspec/error.hpp"
#include "layerspec/surface/revolution.hpp"

namespace layerspec::spectrum {
namespace {

constexpr double kPi = std::numbers::pi;

// Geometry along the meridian: curvatures and the metric factor.
struct Ring {
  double k_s = 0.0, k_t = 0.0, r = 0.0;
};

Ring ring(const surface::PolarChart& chart, double s) {
  const auto cs = chart.sample(s, 0.0);
  return {cs.l_ss, cs.l_tt, cs.r};
}

double weight(const Ring& g, double u) { return (1.0 - u * g.k_s) * (1.0 - u * g.k_t) * g.r; }

// Coefficient of psi_s^2: w / (1 - u k_s)^2.
double s_coefficient(const Ring& g, double u) { return (1.0 - u * g.k_t) * g.r / (1.0 - u * g.k_s); }

void require_positive_weight(double w, double s, double u) {
  if (!(w > 0.0)) {
    throw Error(ErrorKind::hypothesis_violation, "layer weight is not positive at s = " + std::to_string(s) +
                                                     ", u = " + std::to_string(u) + " (<Omega1> fails)");
  }
}

// Lowest eigenvalue of the symmetric tridiagonal matrix (diag, off).
double tridiagonal_lowest(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::factorization, "tridiagonal eigensolve failed");
  return es.eigenvalues()(0);
}

// Generalized tridiagonal problem -(p v')' = lambda q v with Dirichlet ends on
// the vertex grid x_j = lo + (j + 1) h, symmetrized by the lumped mass.
double weighted_lowest(double lo, double hi, int n, const std::function<double(double)>& p,
                       const std::function<double(double)>& q) {
  const double h = (hi - lo) / (n + 1);
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  std::vector<double> m(n);
  for (int j = 0; j < n; ++j) m[j] = q(lo + (j + 1) * h);
  for (int j = 0; j < n; ++j) {
    const double x = lo + (j + 1) * h;
    diag(j) = (p(x - 0.5 * h) + p(x + 0.5 * h)) / (h * h * m[j]);
    if (j + 1 < n) off(j) = -p(x + 0.5 * h) / (h * h * std::sqrt(m[j] * m[j + 1]));
  }
  return tridiagonal_lowest(diag, off);
}

Extrapolated richardson(std::vector<double> levels) {
  Extrapolated e;
  e.levels = levels;
  const std::size_t n = levels.size();
  if (n == 1) {
    e.value = levels[0];
    return e;
  }
  const double fine = levels[n - 1], coarse = levels[n - 2];
  e.value = fine + (fine - coarse) / 3.0;
  e.error = std::abs(fine - coarse) / 3.0;
  if (n >= 3) {
    const double d1 = levels[n - 3] - coarse, d2 = coarse - fine;
    e.order = (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0) ? std::log2(d1 / d2) : 0.0;
  }
  return e;
}

Extrapolated refine_1d(double lo, double hi, int n, int levels, const std::function<double(double)>& p,
                       const std::function<double(double)>& q) {
  if (levels < 1) throw Error(ErrorKind::invalid_input, "need at least one refinement level");
  std::vector<double> vals;
  for (int l = 0; l < levels; ++l) {
    vals.push_back(weighted_lowest(lo, hi, n, p, q));
    n = 2 * n + 1;
  }
  return richardson(vals);
}

}  // namespace

AxisymMesh make_mesh(const layer::LayerSpec& layer, double S, double h_s, int n_u, OuterBoundary outer) {
  if (!(S > 0.0 && h_s > 0.0)) throw Error(ErrorKind::invalid_input, "mesh needs S > 0 and h_s > 0");
  AxisymMesh m;
  m.a = layer.a();
  m.outer = outer;
  m.n_u = n_u;
  m.h_u = 2.0 * layer.a() / (n_u + 1);
  double kink = 0.0;
  for (double k : layer.chart().kinks()) {
    if (k > 0.0 && k < S * (1.0 - 1e-12)) {
      kink = k;
      break;
    }
  }
  if (kink > 0.0) {
    const int k = std::max(1, static_cast<int>(std::lround(kink / h_s)));
    m.h_s = kink / k;
    m.n_s = static_cast<int>(std::lround(S / m.h_s));
    m.interface = kink;
  } else {
    m.n_s = std::max(1, static_cast<int>(std::lround(S / h_s)));
    m.h_s = S / m.n_s;
  }
  m.S = m.n_s * m.h_s;
  if (m.n_s < 16 || m.n_u < 16) throw Error(ErrorKind::invalid_input, "mesh needs at least 16 nodes per direction");
  return m;
}

PartialWaveOperator assemble_partial_wave(const layer::LayerSpec& layer, int m, const AxisymMesh& mesh) {
  const auto& chart = layer.chart();
  if (chart.provenance() != surface::Provenance::revolution) {
    throw Error(ErrorKind::capability, "partial waves need a surface-of-revolution chart");
  }
  if (m < 0) throw Error(ErrorKind::invalid_input, "angular momentum must be >= 0");
  if (mesh.S > chart.s_max() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::truncation, "mesh end S = " + std::to_string(mesh.S) + " passes the chart (s_max = " +
                                           std::to_string(chart.s_max()) + ")");
  }
  if (mesh.n_s < 16 || mesh.n_u < 16) throw Error(ErrorKind::invalid_input, "mesh needs at least 16 nodes per direction");
  const int ns = mesh.n_s, nu = mesh.n_u;
  const double hs = mesh.h_s, hu = mesh.h_u;

  std::vector<Ring> node(ns), face(ns);  // face[i] sits at (i + 1) h_s, right of node i
  for (int i = 0; i < ns; ++i) node[i] = ring(chart, mesh.s_node(i));
  for (int i = 0; i < ns; ++i) {
    const double sf = (i + 1) * hs;
    face[i] = ring(chart, std::min(sf, chart.s_max()));
  }

  PartialWaveOperator op;
  op.m = m;
  op.mesh = mesh;
  op.weight.resize(static_cast<std::size_t>(ns) * nu);
  std::vector<num::Triplet> A, B;
  A.reserve(static_cast<std::size_t>(ns) * nu * 5);
  B.reserve(static_cast<std::size_t>(ns) * nu);
  const auto link = [&](int p, int q, double c) {
    A.push_back({p, p, c});
    A.push_back({q, q, c});
    A.push_back({p, q, -c});
    A.push_back({q, p, -c});
  };

  for (int i = 0; i < ns; ++i) {
    const double s = mesh.s_node(i);
    const double sf = (i + 1) * hs;
    const bool at_interface = mesh.interface > 0.0 && std::abs(sf - mesh.interface) <= 1e-9 * hs;
    Ring left, right;
    if (at_interface) {
      left = ring(chart, sf * (1.0 - 1e-13));
      right = ring(chart, sf * (1.0 + 1e-13));
    }
    for (int j = 0; j < nu; ++j) {
      const double u = mesh.u_node(j);
      const int p = op.index(i, j);
      const double w = weight(node[i], u);
      require_positive_weight(w, s, u);
      op.weight[p] = w;
      B.push_back({p, p, w * hs * hu});
      if (m > 0) {
        A.push_back({p, p,
                     double(m) * m * (1.0 - u * node[i].k_s) / ((1.0 - u * node[i].k_t) * node[i].r) * hs * hu});
      }
      // u faces: below j (and the Dirichlet face at -a), above the last node.
      const double wd = weight(node[i], u - 0.5 * hu);
      require_positive_weight(wd, s, u - 0.5 * hu);
      if (j == 0) {
        A.push_back({p, p, wd * hs / hu});
      } else {
        link(p - 1, p, wd * hs / hu);
      }
      if (j == nu - 1) {
        const double wu = weight(node[i], u + 0.5 * hu);
        require_positive_weight(wu, s, u + 0.5 * hu);
        A.push_back({p, p, wu * hs / hu});
      }
      // s face to the right of node i.
      double c;
      if (at_interface) {
        const double cl = s_coefficient(left, u), cr = s_coefficient(right, u);
        c = 2.0 * cl * cr / (cl + cr);
      } else {
        c = s_coefficient(face[i], u);
      }
      require_positive_weight(c, sf, u);
      if (i + 1 < ns) {
        link(p, op.index(i + 1, j), c * hu / hs);
      } else if (mesh.outer == OuterBoundary::dirichlet) {
        A.push_back({p, p, c * hu / (0.5 * hs)});
      }
    }
  }
  const int n = ns * nu;
  op.pair.stiffness = num::CsrMatrix::from_triplets(n, n, A);
  op.pair.mass = num::CsrMatrix::from_triplets(n, n, B);
  return op;
}

double discrete_flat_threshold(const AxisymMesh& mesh) {
  const double x = std::sin(kPi * mesh.h_u / (4.0 * mesh.a));
  return 4.0 * x * x / (mesh.h_u * mesh.h_u);
}

SpectrumResult solve_spectrum(const PartialWaveOperator& op, int k, double threshold, const num::EigenOptions& options) {
  SpectrumResult res;
  res.m = op.m;
  res.threshold = threshold;
  res.mesh = op.mesh;
  res.discrete_threshold = discrete_flat_threshold(op.mesh);
  const auto pairs = num::lowest_eigenpairs(op.pair, k, options);
  for (const auto& ep : pairs) {
    res.eigenvalues.push_back(ep.value);
    res.residuals.push_back(ep.residual);
    res.below_threshold.push_back(ep.value < res.discrete_threshold * (1.0 - 1e-10));
  }
  return res;
}

Extrapolated refine_lowest(const layer::LayerSpec& layer, int m, double S, double h_s, int n_u, int levels,
                           OuterBoundary outer, std::vector<RefinementRow>* table) {
  if (levels < 1) throw Error(ErrorKind::invalid_input, "need at least one refinement level");
  std::vector<double> vals;
  for (int l = 0; l < levels; ++l) {
    const AxisymMesh mesh = make_mesh(layer, S, h_s, n_u, outer);
    const auto op = assemble_partial_wave(layer, m, mesh);
    const double lowest = num::lowest_eigenpairs(op.pair, 1).front().value;
    vals.push_back(lowest);
    if (table) table->push_back({mesh.h_s, mesh.h_u, lowest});
    S = mesh.S;  // later levels nest inside the first mesh
    h_s = 0.5 * mesh.h_s;
    n_u = 2 * n_u + 1;
  }
  return richardson(vals);
}

RadialResult counterexample_radial(double R, double a, int n, int levels) {
  if (!(a > 0.0 && a < R)) throw Error(ErrorKind::invalid_input, "counterexample needs 0 < a < R");
  RadialResult res;
  res.kappa1_sq = std::pow(kPi / (2.0 * a), 2);
  res.lower = res.kappa1_sq - 1.0 / (4.0 * (R - a) * (R - a));
  res.upper = res.kappa1_sq - 1.0 / (4.0 * (R + a) * (R + a));
  // -f'' - f / (4 r^2): p = 1, q = 1, potential folded into the diagonal.
  std::vector<double> vals;
  for (int l = 0; l < levels; ++l, n = 2 * n + 1) {
    const double h = 2.0 * a / (n + 1);
    Eigen::VectorXd diag(n), off(n - 1);
    for (int j = 0; j < n; ++j) {
      const double r = R - a + (j + 1) * h;
      diag(j) = 2.0 / (h * h) - 1.0 / (4.0 * r * r);
      if (j + 1 < n) off(j) = -1.0 / (h * h);
    }
    vals.push_back(tridiagonal_lowest(diag, off));
  }
  res.eps1 = richardson(vals);
  return res;
}

Extrapolated spherical_shell_ground(double R, double a, int n, int levels) {
  if (!(a > 0.0 && a < R)) throw Error(ErrorKind::invalid_input, "spherical shell needs 0 < a < R");
  const auto rho2 = [](double x) { return x * x; };
  return refine_1d(R - a, R + a, n, levels, rho2, rho2);
}

double discrete_cylinder_threshold(double R, const AxisymMesh& mesh) {
  const auto w = [R](double u) { return R - u; };
  return weighted_lowest(-mesh.a, mesh.a, mesh.n_u, w, w);
}

namespace {

layer::LayerSpec cylinder_layer(double R, double a, double s_max) {
  auto chart = std::make_shared<surface::RevolutionChart>(surface::RevolutionProfile::capped_cylinder(R, s_max));
  return layer::LayerSpec(chart, a);
}

}  // namespace

CounterexampleResult counterexample_full(double R, double a, double S, double h_s, int n_u, int k) {
  if (!(a > 0.0 && a < R)) throw Error(ErrorKind::invalid_input, "counterexample needs 0 < a < R");
  const auto L = cylinder_layer(R, a, S + 2.0 * h_s);
  const AxisymMesh mesh = make_mesh(L, S, h_s, n_u, OuterBoundary::dirichlet);
  CounterexampleResult res;
  res.kappa1_sq = L.threshold();
  res.spectrum = solve_spectrum(assemble_partial_wave(L, 0, mesh), k, res.kappa1_sq);
  res.eps1 = counterexample_radial(R, a).eps1.value;
  res.eps1_discrete = discrete_cylinder_threshold(R, mesh);
  res.lowest_minus_eps1 = res.spectrum.eigenvalues.front() - res.eps1_discrete;
  return res;
}

double hemisphere_neumann_ground(double R, double a, double h_s, int n_u) {
  const double equator = 0.5 * kPi * R;
  const auto L = cylinder_layer(R, a, 2.0 * equator);
  const AxisymMesh mesh = make_mesh(L, equator, h_s, n_u, OuterBoundary::neumann);
  return num::lowest_eigenpairs(assemble_partial_wave(L, 0, mesh).pair, 1).front().value;
}

}  // namespace layerspec::spectrum
