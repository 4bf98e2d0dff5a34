#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2/FMA variant. The active variant is chosen once at startup from CPUID
// and can be pinned with LAYERSPEC_SIMD=scalar|avx2 or set_backend().

#include <cstddef>
#include <cstdint>
#include <span>

namespace layerspec::num::simd {

enum class Backend { scalar, avx2 };

const char* to_string(Backend backend) noexcept;

bool backend_available(Backend backend) noexcept;
Backend detect_best_backend() noexcept;
Backend active_backend() noexcept;
/// Throws Error(invalid_input) when the backend is not compiled in or not supported by the CPU.
void set_backend(Backend backend);

/// Read-only CSR view; column indices are 32-bit to allow hardware gathers.
struct CsrView {
  std::int32_t rows = 0;
  std::span<const std::int32_t> row_ptr;
  std::span<const std::int32_t> col_index;
  std::span<const double> values;
};

/// Per-(s,theta) column data of a trial of the form (alpha + beta*u) * chi(u).
/// Shape operator entries are in the orthonormal frame (e_s, e_theta).
struct FormColumnCoeffs {
  double l_ss = 0.0, l_st = 0.0, l_tt = 0.0;
  double r = 1.0;
  double alpha = 0.0, alpha_s = 0.0, alpha_t = 0.0;
  double beta = 0.0, beta_s = 0.0, beta_t = 0.0;
  double kappa_sq = 0.0;  // transverse threshold used by curvature_shift
};

/// Transverse quadrature: abscissae, weights, and the mode with its derivative at the abscissae.
struct TransverseNodes {
  std::span<const double> u;
  std::span<const double> weight;
  std::span<const double> chi;
  std::span<const double> dchi;
};

/// u-integrals of one column, already multiplied by the surface density r.
struct FormColumnSums {
  double longitudinal = 0.0;  // |grad_q psi|^2_G * sqrt(G)
  double transverse = 0.0;    // |psi_u|^2 * sqrt(G)
  double norm = 0.0;          // |psi|^2 * sqrt(G)
  /// (|psi_u|^2 - kappa_sq |psi|^2) (f - 1) * r: the curvature part of the
  /// shifted transverse energy, free of the flat-part cancellation.
  double curvature_shift = 0.0;
};

struct KernelTable {
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*csr_spmv)(const CsrView&, std::span<const double>, std::span<double>);
  FormColumnSums (*form_column)(const FormColumnCoeffs&, const TransverseNodes&);
};

/// Kernels of a specific backend; used by the equivalence tests.
const KernelTable& kernels(Backend backend);
const KernelTable& active_kernels() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a, b);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x, y);
}
inline void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  active_kernels().csr_spmv(a, x, y);
}
inline FormColumnSums form_column(const FormColumnCoeffs& c, const TransverseNodes& t) {
  return active_kernels().form_column(c, t);
}

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
FormColumnSums form_column(const FormColumnCoeffs& c, const TransverseNodes& t);
}  // namespace scalar

#if defined(LAYERSPEC_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
FormColumnSums form_column(const FormColumnCoeffs& c, const TransverseNodes& t);
}  // namespace avx2
#endif

}  // namespace layerspec::num::simd
