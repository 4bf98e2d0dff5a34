#include "layerspec/num/kernels.hpp"

namespace layerspec::num::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  for (std::int32_t row = 0; row < a.rows; ++row) {
    double sum = 0.0;
    for (std::int32_t k = a.row_ptr[row]; k < a.row_ptr[row + 1]; ++k) {
      sum += a.values[k] * x[a.col_index[k]];
    }
    y[row] = sum;
  }
}

FormColumnSums form_column(const FormColumnCoeffs& c, const TransverseNodes& t) {
  const double trace = c.l_ss + c.l_tt;
  const double det = c.l_ss * c.l_tt - c.l_st * c.l_st;
  const double inv_r = 1.0 / c.r;
  double longitudinal = 0.0, transverse = 0.0, norm = 0.0, shift = 0.0;
  for (std::size_t k = 0; k < t.u.size(); ++k) {
    const double u = t.u[k];
    const double chi = t.chi[k];
    const double f = 1.0 - u * trace + u * u * det;
    const double amp = c.alpha + c.beta * u;
    const double psi = amp * chi;
    const double ps = (c.alpha_s + c.beta_s * u) * chi;
    const double pt = (c.alpha_t + c.beta_t * u) * chi * inv_r;
    const double pu = c.beta * chi + amp * t.dchi[k];
    // (I - uL)^{-1} applied to the frame gradient (ps, pt).
    const double inv_f = 1.0 / f;
    const double w1 = ((1.0 - u * c.l_tt) * ps + u * c.l_st * pt) * inv_f;
    const double w2 = (u * c.l_st * ps + (1.0 - u * c.l_ss) * pt) * inv_f;
    const double wf = t.weight[k] * f;
    longitudinal += wf * (w1 * w1 + w2 * w2);
    transverse += wf * pu * pu;
    norm += wf * psi * psi;
    shift += t.weight[k] * (pu * pu - c.kappa_sq * psi * psi) * (u * (u * det - trace));
  }
  return {longitudinal * c.r, transverse * c.r, norm * c.r, shift * c.r};
}

}  // namespace layerspec::num::simd::scalar
