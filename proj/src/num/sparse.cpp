#include "layerspec/num/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::num {

CsrMatrix CsrMatrix::from_triplets(std::int32_t rows, std::int32_t cols, std::span<const Triplet> entries) {
  if (rows < 0 || cols < 0) throw Error(ErrorKind::invalid_input, "CsrMatrix: negative shape");
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  std::vector<std::int32_t> count(rows + 1, 0);
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw Error(ErrorKind::invalid_input, "CsrMatrix: triplet index out of range");
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  // Stable bucket sort by row, then by column within each row.
  std::vector<std::size_t> order(entries.size());
  std::vector<std::int32_t> fill(count.begin(), count.end() - 1);
  for (std::size_t k = 0; k < entries.size(); ++k) order[fill[entries[k].row]++] = k;
  m.row_ptr_.assign(rows + 1, 0);
  m.col_index_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::int32_t r = 0; r < rows; ++r) {
    auto first = order.begin() + count[r], last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) { return entries[a].col < entries[b].col; });
    for (auto it = first; it != last; ++it) {
      const Triplet& t = entries[*it];
      if (!m.col_index_.empty() && static_cast<std::int32_t>(m.col_index_.size()) > m.row_ptr_[r] &&
          m.col_index_.back() == t.col) {
        m.values_.back() += t.value;
      } else {
        m.col_index_.push_back(t.col);
        m.values_.push_back(t.value);
      }
    }
    m.row_ptr_[r + 1] = static_cast<std::int32_t>(m.col_index_.size());
  }
  return m;
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    t.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), diag[i]});
  }
  const auto n = static_cast<std::int32_t>(diag.size());
  return from_triplets(n, n, t);
}

double CsrMatrix::at(std::int32_t row, std::int32_t col) const {
  const auto first = col_index_.begin() + row_ptr_[row], last = col_index_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  return (it != last && *it == col) ? values_[it - col_index_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal_values() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

simd::CsrView CsrMatrix::view() const { return {rows_, row_ptr_, col_index_, values_}; }

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const { simd::csr_spmv(view(), x, y); }

double CsrMatrix::asymmetry() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double biggest = 0.0, worst = 0.0;
  for (std::int32_t r = 0; r < rows_; ++r) {
    for (std::int32_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      biggest = std::max(biggest, std::abs(values_[k]));
      worst = std::max(worst, std::abs(values_[k] - at(col_index_[k], r)));
    }
  }
  return biggest == 0.0 ? 0.0 : worst / biggest;
}

bool CsrMatrix::is_diagonal() const {
  for (std::int32_t r = 0; r < rows_; ++r) {
    for (std::int32_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_index_[k] != r && values_[k] != 0.0) return false;
    }
  }
  return true;
}

void SparseSymmetricPair::validate() const {
  const auto n = stiffness.rows();
  if (stiffness.cols() != n || mass.rows() != n || mass.cols() != n) {
    throw Error(ErrorKind::invalid_input, "SparseSymmetricPair: stiffness and mass must be square of equal size");
  }
  if (stiffness.asymmetry() > 1e-13) throw Error(ErrorKind::invalid_input, "SparseSymmetricPair: stiffness not symmetric");
  if (mass.asymmetry() > 1e-13) throw Error(ErrorKind::invalid_input, "SparseSymmetricPair: mass not symmetric");
  const auto d = mass.diagonal_values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      std::ostringstream msg;
      msg << "SparseSymmetricPair: mass diagonal entry " << i << " is not positive";
      throw Error(ErrorKind::invalid_input, msg.str());
    }
  }
}

}  // namespace layerspec::num
