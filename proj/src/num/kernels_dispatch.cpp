#include <atomic>
#include <cstdlib>
#include <string_view>

#include "layerspec/error.hpp"
#include "layerspec/num/kernels.hpp"

namespace layerspec::num::simd {
namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::axpy, &scalar::csr_spmv, &scalar::form_column};
#if defined(LAYERSPEC_HAVE_AVX2)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::csr_spmv, &avx2::form_column};
#endif

bool cpu_has_avx2() noexcept {
#if defined(LAYERSPEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("LAYERSPEC_SIMD")) {
    const std::string_view choice(env);
    if (choice == "scalar") return Backend::scalar;
    if (choice == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return detect_best_backend();
}

std::atomic<Backend>& active() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

const char* to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) noexcept {
  return backend == Backend::scalar || (backend == Backend::avx2 && cpu_has_avx2());
}

Backend detect_best_backend() noexcept {
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() noexcept { return active().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw Error(ErrorKind::invalid_input, std::string("SIMD backend not available: ") + to_string(backend));
  }
  active().store(backend, std::memory_order_relaxed);
}

const KernelTable& kernels(Backend backend) {
  if (!backend_available(backend)) {
    throw Error(ErrorKind::invalid_input, std::string("SIMD backend not available: ") + to_string(backend));
  }
#if defined(LAYERSPEC_HAVE_AVX2)
  if (backend == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active_kernels() noexcept {
#if defined(LAYERSPEC_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

}  // namespace layerspec::num::simd
