// Compiled with -mavx2 -mfma; only called after a CPUID check.

#include <immintrin.h>

#include "layerspec/num/kernels.hpp"

namespace layerspec::num::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i + 4]), _mm256_loadu_pd(&b[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const double* xp = x.data();
  for (std::int32_t row = 0; row < a.rows; ++row) {
    std::int32_t k = a.row_ptr[row];
    const std::int32_t end = a.row_ptr[row + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&a.col_index[k]));
      const __m256d xv = _mm256_i32gather_pd(xp, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(&a.values[k]), xv, acc);
    }
    double sum = hsum(acc);
    for (; k < end; ++k) sum += a.values[k] * xp[a.col_index[k]];
    y[row] = sum;
  }
}

FormColumnSums form_column(const FormColumnCoeffs& c, const TransverseNodes& t) {
  const std::size_t n = t.u.size();
  const double trace = c.l_ss + c.l_tt;
  const double det = c.l_ss * c.l_tt - c.l_st * c.l_st;
  const double inv_r = 1.0 / c.r;

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d v_trace = _mm256_set1_pd(trace);
  const __m256d v_det = _mm256_set1_pd(det);
  const __m256d v_lss = _mm256_set1_pd(c.l_ss);
  const __m256d v_lst = _mm256_set1_pd(c.l_st);
  const __m256d v_ltt = _mm256_set1_pd(c.l_tt);
  const __m256d v_alpha = _mm256_set1_pd(c.alpha);
  const __m256d v_beta = _mm256_set1_pd(c.beta);
  const __m256d v_alpha_s = _mm256_set1_pd(c.alpha_s);
  const __m256d v_beta_s = _mm256_set1_pd(c.beta_s);
  const __m256d v_alpha_t = _mm256_set1_pd(c.alpha_t * inv_r);
  const __m256d v_beta_t = _mm256_set1_pd(c.beta_t * inv_r);
  const __m256d v_ksq = _mm256_set1_pd(c.kappa_sq);

  __m256d acc_long = _mm256_setzero_pd();
  __m256d acc_trans = _mm256_setzero_pd();
  __m256d acc_norm = _mm256_setzero_pd();
  __m256d acc_shift = _mm256_setzero_pd();

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d u = _mm256_loadu_pd(&t.u[k]);
    const __m256d chi = _mm256_loadu_pd(&t.chi[k]);
    const __m256d dchi = _mm256_loadu_pd(&t.dchi[k]);
    const __m256d w = _mm256_loadu_pd(&t.weight[k]);

    // f = 1 - u*trace + u^2*det
    const __m256d f = _mm256_fmadd_pd(_mm256_mul_pd(u, u), v_det, _mm256_fnmadd_pd(u, v_trace, one));
    const __m256d amp = _mm256_fmadd_pd(v_beta, u, v_alpha);
    const __m256d psi = _mm256_mul_pd(amp, chi);
    const __m256d ps = _mm256_mul_pd(_mm256_fmadd_pd(v_beta_s, u, v_alpha_s), chi);
    const __m256d pt = _mm256_mul_pd(_mm256_fmadd_pd(v_beta_t, u, v_alpha_t), chi);
    const __m256d pu = _mm256_fmadd_pd(amp, dchi, _mm256_mul_pd(v_beta, chi));

    const __m256d inv_f = _mm256_div_pd(one, f);
    const __m256d ulst = _mm256_mul_pd(u, v_lst);
    const __m256d a11 = _mm256_fnmadd_pd(u, v_ltt, one);
    const __m256d a22 = _mm256_fnmadd_pd(u, v_lss, one);
    const __m256d w1 = _mm256_mul_pd(_mm256_fmadd_pd(a11, ps, _mm256_mul_pd(ulst, pt)), inv_f);
    const __m256d w2 = _mm256_mul_pd(_mm256_fmadd_pd(ulst, ps, _mm256_mul_pd(a22, pt)), inv_f);

    const __m256d wf = _mm256_mul_pd(w, f);
    acc_long = _mm256_fmadd_pd(wf, _mm256_fmadd_pd(w1, w1, _mm256_mul_pd(w2, w2)), acc_long);
    acc_trans = _mm256_fmadd_pd(wf, _mm256_mul_pd(pu, pu), acc_trans);
    acc_norm = _mm256_fmadd_pd(wf, _mm256_mul_pd(psi, psi), acc_norm);
    // (pu^2 - ksq psi^2) * u (u det - trace)
    const __m256d energy = _mm256_fmsub_pd(pu, pu, _mm256_mul_pd(v_ksq, _mm256_mul_pd(psi, psi)));
    const __m256d fm1 = _mm256_mul_pd(u, _mm256_fmsub_pd(u, v_det, v_trace));
    acc_shift = _mm256_fmadd_pd(_mm256_mul_pd(w, energy), fm1, acc_shift);
  }

  double longitudinal = hsum(acc_long);
  double transverse = hsum(acc_trans);
  double norm = hsum(acc_norm);
  double shift = hsum(acc_shift);
  for (; k < n; ++k) {
    const double u = t.u[k];
    const double chi = t.chi[k];
    const double f = 1.0 - u * trace + u * u * det;
    const double amp = c.alpha + c.beta * u;
    const double psi = amp * chi;
    const double ps = (c.alpha_s + c.beta_s * u) * chi;
    const double pt = (c.alpha_t + c.beta_t * u) * chi * inv_r;
    const double pu = c.beta * chi + amp * t.dchi[k];
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

}  // namespace layerspec::num::simd::avx2
