#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "layerspec/num/kernels.hpp"

namespace layerspec::num {

inline constexpr double kDefaultEigenTol = 1e-9;

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free columns in each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Duplicates are summed in input order. Throws Error(invalid_input) on out-of-range entries.
  static CsrMatrix from_triplets(std::int32_t rows, std::int32_t cols, std::span<const Triplet> entries);
  static CsrMatrix diagonal(std::span<const double> diag);

  std::int32_t rows() const noexcept { return rows_; }
  std::int32_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  const std::vector<std::int32_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::int32_t>& col_index() const noexcept { return col_index_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double at(std::int32_t row, std::int32_t col) const;
  std::vector<double> diagonal_values() const;
  simd::CsrView view() const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// max |a_ij - a_ji| / max |a_ij|; 0 for an empty matrix.
  double asymmetry() const;
  bool is_diagonal() const;

 private:
  std::int32_t rows_ = 0, cols_ = 0;
  std::vector<std::int32_t> row_ptr_{0};
  std::vector<std::int32_t> col_index_;
  std::vector<double> values_;
};

/// Generalized symmetric problem A v = lambda B v with B positive definite.
struct SparseSymmetricPair {
  CsrMatrix stiffness;
  CsrMatrix mass;
  std::int32_t dimension() const noexcept { return stiffness.rows(); }
  /// Throws Error(invalid_input) on shape mismatch, asymmetry above 1e-13 or a non-positive mass diagonal.
  void validate() const;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // B-normalized
  double residual = 0.0;       // |Av - lambda Bv| / (max(1,|lambda|) |Bv|)
};

enum class EigenMethod { shift_invert, cg_inverse_iteration };

struct EigenOptions {
  double tol = kDefaultEigenTol;
  std::optional<double> shift;  // empty selects the shift automatically
  EigenMethod method = EigenMethod::shift_invert;
  int krylov_dim = 0;           // 0 picks max(2k+30, 60)
  int max_restarts = 8;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// k smallest eigenpairs, ascending. Throws Error(invalid_input) for k < 1 or
/// k >= dimension and Error(factorization) when the shifted matrix cannot be factored.
std::vector<EigenPair> lowest_eigenpairs(const SparseSymmetricPair& pair, int k, const EigenOptions& options = {});

/// Number of eigenvalues strictly below sigma, from the LDL^T inertia of A - sigma B.
int count_below(const SparseSymmetricPair& pair, double sigma);

}  // namespace layerspec::num
