#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "layerspec/error.hpp"
#include "layerspec/num/kernels.hpp"
#include "layerspec/num/sparse.hpp"

namespace layerspec::num {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

SpMat to_eigen(const CsrMatrix& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.nonzeros());
  for (std::int32_t r = 0; r < m.rows(); ++r) {
    for (std::int32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      t.emplace_back(r, m.col_index()[k], m.values()[k]);
    }
  }
  SpMat out(m.rows(), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

std::span<const double> span_of(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> span_of(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

struct Problem {
  const SparseSymmetricPair& pair;
  SpMat a, b;
  std::int32_t n;

  Vec apply_a(const Vec& x) const {
    Vec y(n);
    pair.stiffness.multiply(span_of(x), span_of(y));
    return y;
  }
  Vec apply_b(const Vec& x) const {
    Vec y(n);
    pair.mass.multiply(span_of(x), span_of(y));
    return y;
  }
};

// LDL^T of A - sigma B with its inertia.
struct Shifted {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  double sigma = 0.0;
  int negatives = 0;
};

bool factor(const Problem& p, double sigma, Shifted& out) {
  SpMat shifted = p.a - sigma * p.b;
  out.ldlt.compute(shifted);
  if (out.ldlt.info() != Eigen::Success) return false;
  const Vec d = out.ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  int neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || std::abs(d[i]) <= 1e-15 * scale) return false;
    if (d[i] < 0.0) ++neg;
  }
  out.sigma = sigma;
  out.negatives = neg;
  return true;
}

// Factor at sigma, retrying once at a perturbed shift.
void factor_or_throw(const Problem& p, double sigma, Shifted& out) {
  if (factor(p, sigma, out)) return;
  const double perturbed = sigma - 1e-6 * (1.0 + std::abs(sigma));
  if (factor(p, perturbed, out)) return;
  std::ostringstream msg;
  msg << "lowest_eigenpairs: factorization of A - sigma B failed at sigma = " << sigma;
  throw Error(ErrorKind::factorization, msg.str());
}

Vec start_vector(std::int32_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (std::int32_t i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

struct Ritz {
  std::vector<double> lambda;    // ascending
  std::vector<double> estimate;  // residual bound in the shift-invert operator
  Mat vectors;                   // n x count, B-orthonormal
  bool exhausted = false;        // Krylov space became invariant
};

// Lanczos for (A - sigma B)^{-1} B in the B-inner product with full reorthogonalization.
Ritz lanczos(const Problem& p, const Shifted& op, const Vec& start, int m, int want) {
  const std::int32_t n = p.n;
  m = std::min<int>(m, n);
  Mat q(n, m), bq(n, m);
  std::vector<double> alpha, beta;

  Vec w = op.ldlt.solve(p.apply_b(start));
  Vec bw = p.apply_b(w);
  double norm = std::sqrt(std::max(w.dot(bw), 0.0));
  if (!(norm > 0.0)) throw Error(ErrorKind::evaluation, "lowest_eigenpairs: degenerate start vector");
  q.col(0) = w / norm;
  bq.col(0) = bw / norm;

  int steps = 0;
  bool exhausted = false;
  for (int j = 0; j < m; ++j) {
    steps = j + 1;
    Vec v = op.ldlt.solve(bq.col(j));
    std::span<double> vs = span_of(v);
    // Two passes of classical Gram-Schmidt against all previous vectors.
    double a_j = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double c = simd::dot({bq.col(i).data(), static_cast<std::size_t>(n)}, vs);
        simd::axpy(-c, {q.col(i).data(), static_cast<std::size_t>(n)}, vs);
        if (i == j) a_j += c;
      }
    }
    alpha.push_back(a_j);
    Vec bv = p.apply_b(v);
    const double b_j = std::sqrt(std::max(v.dot(bv), 0.0));
    beta.push_back(b_j);
    const double scale = std::abs(a_j) + (j > 0 ? beta[j - 1] : 0.0);
    if (b_j <= 1e-14 * scale) {
      exhausted = true;
      break;
    }
    if (j + 1 < m) {
      q.col(j + 1) = v / b_j;
      bq.col(j + 1) = bv / b_j;
    }
  }

  Mat t = Mat::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(t);
  const int count = std::min(want, steps);
  Ritz out;
  out.exhausted = exhausted || steps == n;
  out.vectors.resize(n, count);
  // Largest theta first gives the smallest lambda first.
  for (int c = 0; c < count; ++c) {
    const int idx = steps - 1 - c;
    const double theta = es.eigenvalues()[idx];
    out.lambda.push_back(op.sigma + 1.0 / theta);
    out.estimate.push_back(out.exhausted ? 0.0 : std::abs(beta[steps - 1] * es.eigenvectors()(steps - 1, idx)));
    out.vectors.col(c) = q.leftCols(steps) * es.eigenvectors().col(idx);
  }
  return out;
}

double residual_of(const Problem& p, const Vec& v, double lambda) {
  const Vec bv = p.apply_b(v);
  const Vec r = p.apply_a(v) - lambda * bv;
  return r.norm() / (std::max(1.0, std::abs(lambda)) * bv.norm());
}

// Rayleigh-Ritz of (A, B) on span(X); returns pairs sorted ascending.
std::vector<EigenPair> rayleigh_ritz(const Problem& p, const Mat& x) {
  const Eigen::Index cols = x.cols();
  Mat ax(p.n, cols), bx(p.n, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    ax.col(c) = p.apply_a(x.col(c));
    bx.col(c) = p.apply_b(x.col(c));
  }
  Mat ar = x.transpose() * ax;
  Mat br = x.transpose() * bx;
  ar = 0.5 * (ar + ar.transpose()).eval();
  br = 0.5 * (br + br.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(ar, br);
  if (ges.info() != Eigen::Success) throw Error(ErrorKind::evaluation, "lowest_eigenpairs: Rayleigh-Ritz failed");
  std::vector<EigenPair> out;
  for (Eigen::Index c = 0; c < cols; ++c) {
    Vec v = x * ges.eigenvectors().col(c);
    const Vec bv = p.apply_b(v);
    v /= std::sqrt(v.dot(bv));
    EigenPair e;
    e.value = v.dot(p.apply_a(v));
    e.residual = residual_of(p, v, e.value);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v[big] < 0.0) v = -v;
    e.vector.assign(v.data(), v.data() + v.size());
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const EigenPair& l, const EigenPair& r) { return l.value < r.value; });
  return out;
}

Mat as_matrix(const std::vector<EigenPair>& pairs, std::int32_t n) {
  Mat x(n, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t c = 0; c < pairs.size(); ++c) x.col(c) = Eigen::Map<const Vec>(pairs[c].vector.data(), n);
  return x;
}

bool converged(const std::vector<EigenPair>& pairs, int k, double tol) {
  for (int i = 0; i < k; ++i) {
    if (!(pairs[i].residual <= tol)) return false;
  }
  return true;
}

double lowest_safe_shift(const Problem& p, double start, Shifted& op) {
  double sigma = start;
  for (int attempt = 0; attempt < 40; ++attempt) {
    if (factor(p, sigma, op) && op.negatives == 0) return sigma;
    sigma = sigma - std::ldexp(1.0, attempt) * (1.0 + std::abs(start));
  }
  throw Error(ErrorKind::factorization, "lowest_eigenpairs: no shift below the spectrum found");
}

std::vector<EigenPair> shift_invert(const Problem& p, int k, const EigenOptions& opt) {
  const std::int32_t n = p.n;
  const int extra = std::min<int>(n - k, std::max(k, 8));
  const int want = k + extra;
  int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * k + 30, 60);
  const long cap = std::max<long>(2L * want + 10, std::min<long>(n, 40'000'000L / std::max<std::int32_t>(n, 1)));
  m = static_cast<int>(std::min<long>({static_cast<long>(m), static_cast<long>(n), cap}));

  Shifted op;
  const Vec start = start_vector(n, opt.seed);
  double sigma0 = lowest_safe_shift(p, opt.shift.value_or(0.0), op);

  // Move the shift toward the lowest Ritz value so that the wanted eigenvalues separate.
  if (!opt.shift.has_value() || op.sigma != *opt.shift) {
    const Ritz rough = lanczos(p, op, start, std::min(m, 40), std::min(want, n));
    if (!rough.exhausted) {
      const double l1 = rough.lambda.front();
      const double gap = rough.lambda.size() > 1 ? rough.lambda[1] - l1 : l1 - sigma0;
      const double theta1 = 1.0 / (l1 - sigma0);
      const double lower = sigma0 + 1.0 / (theta1 + rough.estimate.front());
      double delta = std::max({1e-3 * (l1 - sigma0), std::min(0.5 * gap, 0.1 * (l1 - sigma0)), 2.0 * (l1 - lower)});
      double lo = sigma0, hi = l1 - delta;
      if (hi > lo) {
        Shifted trial;
        double chosen = sigma0;
        for (int it = 0; it < 12; ++it) {
          if (factor(p, hi, trial) && trial.negatives == 0) {
            chosen = hi;
            break;
          }
          hi = lo + 0.5 * (hi - lo);
        }
        if (chosen != sigma0) factor_or_throw(p, chosen, op);
      }
    }
  }

  std::vector<EigenPair> pairs;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    const Ritz ritz = lanczos(p, op, start, m, want);
    pairs = rayleigh_ritz(p, ritz.vectors);
    if (static_cast<int>(pairs.size()) >= k && converged(pairs, k, opt.tol)) break;
    // Block refinement: a few steps of subspace iteration on the Ritz block.
    Mat x = as_matrix(pairs, n);
    for (int it = 0; it < 30; ++it) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) x.col(c) = op.ldlt.solve(p.apply_b(x.col(c)));
      Eigen::HouseholderQR<Mat> qr(x);
      x = qr.householderQ() * Mat::Identity(n, x.cols());
      pairs = rayleigh_ritz(p, x);
      x = as_matrix(pairs, n);
      if (converged(pairs, k, opt.tol)) break;
    }
    if (converged(pairs, k, opt.tol) || m >= n) break;
    m = static_cast<int>(std::min<long>({2L * m, static_cast<long>(n), std::max(cap, 2L * m)}));
  }
  pairs.resize(k);
  return pairs;
}

// Preconditioned CG on (A - sigma B) x = rhs with Jacobi preconditioner.
Vec pcg(const Problem& p, double sigma, const Vec& diag, const Vec& rhs, double tol) {
  auto apply = [&](const Vec& x) { return Vec(p.apply_a(x) - sigma * p.apply_b(x)); };
  Vec x = Vec::Zero(p.n);
  Vec r = rhs;
  Vec z = r.cwiseQuotient(diag);
  Vec d = z;
  double rz = r.dot(z);
  const double target = tol * rhs.norm();
  for (int it = 0; it < 20 * p.n + 100 && r.norm() > target; ++it) {
    const Vec ad = apply(d);
    const double step = rz / d.dot(ad);
    x += step * d;
    r -= step * ad;
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  return x;
}

std::vector<EigenPair> cg_inverse_iteration(const Problem& p, int k, const EigenOptions& opt) {
  const std::int32_t n = p.n;
  double sigma;
  if (opt.shift.has_value()) {
    sigma = *opt.shift;
  } else {
    if (!p.pair.mass.is_diagonal()) {
      throw Error(ErrorKind::capability, "lowest_eigenpairs: automatic CG shift needs a diagonal mass matrix");
    }
    // Gershgorin bound for B^{-1/2} A B^{-1/2}.
    const auto bd = p.pair.mass.diagonal_values();
    const auto& a = p.pair.stiffness;
    double lower = std::numeric_limits<double>::infinity(), upper = 0.0;
    for (std::int32_t r = 0; r < n; ++r) {
      double centre = 0.0, radius = 0.0;
      for (std::int32_t j = a.row_ptr()[r]; j < a.row_ptr()[r + 1]; ++j) {
        const std::int32_t c = a.col_index()[j];
        const double v = a.values()[j] / std::sqrt(bd[r] * bd[c]);
        if (c == r) centre = v;
        else radius += std::abs(v);
      }
      lower = std::min(lower, centre - radius);
      upper = std::max(upper, std::abs(centre) + radius);
    }
    sigma = lower - 1e-3 * (1.0 + upper);
  }
  Vec diag(n);
  for (std::int32_t i = 0; i < n; ++i) diag[i] = p.pair.stiffness.at(i, i) - sigma * p.pair.mass.at(i, i);
  if (diag.minCoeff() <= 0.0) throw Error(ErrorKind::factorization, "lowest_eigenpairs: CG shift is not below the spectrum");

  const int block = std::min<int>(n, k + std::max(k, 4));
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat x(n, block);
  for (Eigen::Index c = 0; c < block; ++c)
    for (std::int32_t i = 0; i < n; ++i) x(i, c) = dist(rng);
  std::vector<EigenPair> pairs;
  for (int it = 0; it < 20000; ++it) {
    for (Eigen::Index c = 0; c < block; ++c) x.col(c) = pcg(p, sigma, diag, p.apply_b(x.col(c)), 1e-14);
    Eigen::HouseholderQR<Mat> qr(x);
    x = qr.householderQ() * Mat::Identity(n, block);
    pairs = rayleigh_ritz(p, x);
    x = as_matrix(pairs, n);
    if (converged(pairs, k, opt.tol)) break;
  }
  pairs.resize(k);
  return pairs;
}

}  // namespace

int count_below(const SparseSymmetricPair& pair, double sigma) {
  pair.validate();
  Problem p{pair, to_eigen(pair.stiffness), to_eigen(pair.mass), pair.dimension()};
  Shifted op;
  factor_or_throw(p, sigma, op);
  return op.negatives;
}

std::vector<EigenPair> lowest_eigenpairs(const SparseSymmetricPair& pair, int k, const EigenOptions& options) {
  pair.validate();
  const std::int32_t n = pair.dimension();
  if (k < 1 || k >= n) {
    std::ostringstream msg;
    msg << "lowest_eigenpairs: need 1 <= k < dimension, got k = " << k << ", dimension = " << n;
    throw Error(ErrorKind::invalid_input, msg.str());
  }
  if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_input, "lowest_eigenpairs: tol must be > 0");
  Problem p{pair, to_eigen(pair.stiffness), to_eigen(pair.mass), n};
  return options.method == EigenMethod::cg_inverse_iteration ? cg_inverse_iteration(p, k, options)
                                                              : shift_invert(p, k, options);
}

}  // namespace layerspec::num
