#pragma once

#include <vector>

#include "layerspec/layer/layer.hpp"
#include "layerspec/num/sparse.hpp"

namespace layerspec::spectrum {

enum class OuterBoundary { dirichlet, neumann };

/// Cell-centred grid in s: nodes (i - 1/2) h_s, i = 1..n_s, faces at i h_s,
/// with the outer end S = n_s h_s on the last face (Dirichlet through a
/// half-cell ghost, or no flux for Neumann), so halving h_s nests exactly.
/// The pole face s = 0 carries no flux since the weight vanishes there.
/// u nodes -a + j h_u, j = 1..n_u, Dirichlet at +-a.
struct AxisymMesh {
  double S = 0.0;
  int n_s = 0, n_u = 0;
  double h_s = 0.0, h_u = 0.0;
  double a = 0.0;
  OuterBoundary outer = OuterBoundary::dirichlet;
  double interface = 0.0;  // curvature kink on a face (0: none)

  double s_node(int i) const { return (i + 0.5) * h_s; }  // i = 0..n_s-1
  double u_node(int j) const { return -a + (j + 1) * h_u; }  // j = 0..n_u-1
};

/// Mesh of spacing close to h_s over (0, S]. When the chart has a kink inside
/// (0, S) the spacing is adjusted so that a face lands on it and S moves to
/// the nearest admissible value. Throws invalid_input for fewer than 16 nodes
/// in either direction.
AxisymMesh make_mesh(const layer::LayerSpec& layer, double S, double h_s, int n_u,
                     OuterBoundary outer = OuterBoundary::dirichlet);

struct PartialWaveOperator {
  int m = 0;
  AxisymMesh mesh;
  num::SparseSymmetricPair pair;
  std::vector<double> weight;  // (1 - u k_s)(1 - u k_theta) r at the nodes, s-major
  int index(int i, int j) const { return i * mesh.n_u + j; }
};

/// Discretizes the angular-momentum-m form with face fluxes and lumped mass.
/// Throws capability off surfaces of revolution, truncation when S passes the
/// chart and hypothesis_violation when the weight is not positive.
PartialWaveOperator assemble_partial_wave(const layer::LayerSpec& layer, int m, const AxisymMesh& mesh);

struct RefinementRow {
  double h_s = 0.0, h_u = 0.0;
  double lowest = 0.0;
};

/// Lowest eigenvalue of the flat transverse operator on the mesh's u grid,
/// (4 / h_u^2) sin^2(pi h_u / 4a). It is the bottom of the discrete continuum
/// wherever the layer is asymptotically flat and sits below kappa_1^2 by the
/// second-order u error, so bound states are judged against it.
double discrete_flat_threshold(const AxisymMesh& mesh);

struct SpectrumResult {
  int m = 0;
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;
  std::vector<bool> below_threshold;  // against discrete_threshold
  double threshold = 0.0;             // kappa_1^2
  double discrete_threshold = 0.0;
  AxisymMesh mesh;
  std::vector<RefinementRow> convergence;
};

SpectrumResult solve_spectrum(const PartialWaveOperator& op, int k, double threshold,
                              const num::EigenOptions& options = {});

struct Extrapolated {
  double value = 0.0;
  double error = 0.0;   // size of the Richardson correction
  double order = 0.0;   // observed order from the last three levels (0 if fewer)
  std::vector<double> levels;
};

/// Lowest eigenvalue on `levels` meshes, halving both spacings each time, with
/// the convergence table and a Richardson value of the assumed order 2.
Extrapolated refine_lowest(const layer::LayerSpec& layer, int m, double S, double h_s, int n_u, int levels,
                           OuterBoundary outer = OuterBoundary::dirichlet, std::vector<RefinementRow>* table = nullptr);

struct RadialResult {
  Extrapolated eps1;
  double kappa1_sq = 0.0;
  double lower = 0.0, upper = 0.0;  // kappa_1^2 - 1/(4 (R -+ a)^2)
};

/// Lowest Dirichlet eigenvalue of -d^2/dr^2 - 1/(4 r^2) on (R - a, R + a).
RadialResult counterexample_radial(double R, double a, int n = 400, int levels = 4);

/// Ground state between concentric spheres of radii R -+ a (l = 0 reduction).
Extrapolated spherical_shell_ground(double R, double a, int n = 400, int levels = 4);

/// Discrete epsilon_1: lowest eigenvalue of the cylinder transverse operator on
/// the mesh's u grid (the same discretization the 2D operator uses there).
double discrete_cylinder_threshold(double R, const AxisymMesh& mesh);

struct CounterexampleResult {
  SpectrumResult spectrum;
  double eps1 = 0.0;           // extrapolated
  double eps1_discrete = 0.0;  // on the same u grid
  double kappa1_sq = 0.0;
  double lowest_minus_eps1 = 0.0;  // against the discrete value
};

/// m = 0 spectrum of the layer over the capped cylinder of radius R truncated at S.
CounterexampleResult counterexample_full(double R, double a, double S, double h_s, int n_u, int k = 3);

/// Ground state over the hemisphere alone with a Neumann end at the equator.
double hemisphere_neumann_ground(double R, double a, double h_s, int n_u);

}  // namespace layerspec::spectrum
