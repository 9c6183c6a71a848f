#pragma once

// Dense matrix primitives shared by every module: constraint-set
// projections and the operator norm that drives the PALM step sizes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "spsu/error.hpp"
#include "spsu/rng.hpp"

namespace spsu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Elementwise clamp onto the non-negative orthant.
inline Matrix project_nonneg(const Matrix& x) { return x.cwiseMax(0.0); }

inline void project_nonneg_inplace(Matrix& x) { x = x.cwiseMax(0.0); }

namespace detail {

// Feasible inputs are returned untouched. This makes the projection an
// exact fixed point on its own output; the full pass below re-normalizes
// the column sum, which would otherwise perturb the last few bits.
inline bool on_simplex(const Eigen::Ref<const Vector>& v) {
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) return false;
    sum += v[i];
  }
  const double tol =
      std::min(8.0 * std::numeric_limits<double>::epsilon() *
                   static_cast<double>(v.size()),
               5e-13);
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace detail

/// Euclidean projection of a vector onto the probability simplex by
/// sort-then-threshold. O(n log n); the vectors in this problem are short.
inline void project_simplex_inplace(Eigen::Ref<Vector> v,
                                    std::vector<double>& scratch) {
  const Index n = v.size();
  if (n == 0) return;
  if (detail::on_simplex(v)) return;

  scratch.assign(v.data(), v.data() + n);
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());

  double running = -1.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    running += scratch[static_cast<std::size_t>(j)];
    const double candidate = running / static_cast<double>(j + 1);
    if (scratch[static_cast<std::size_t>(j)] - candidate <= 0.0) break;
    theta = candidate;
  }

  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    v[i] = std::max(v[i] - theta, 0.0);
    sum += v[i];
  }
  // Pin the column sum to 1 even after cancellation in v - theta.
  v /= sum;
}

inline Vector project_simplex(Vector v) {
  std::vector<double> scratch;
  project_simplex_inplace(v, scratch);
  return v;
}

/// Projects every column onto the probability simplex.
inline void project_simplex_columns_inplace(Matrix& x) {
  if (x.rows() < 1)
    throw DimensionError("project_simplex_columns: matrix has no rows");
  std::vector<double> scratch;
  scratch.reserve(static_cast<std::size_t>(x.rows()));
  for (Index j = 0; j < x.cols(); ++j) {
    project_simplex_inplace(x.col(j), scratch);
  }
}

inline Matrix project_simplex_columns(Matrix x) {
  project_simplex_columns_inplace(x);
  return x;
}

/// Sum of squared entries.
inline double frobenius_sq(const Matrix& x) { return x.squaredNorm(); }

/// Largest singular value via power iteration on the Gram matrix of the
/// smaller side. The start vector comes from a fixed seed so repeated
/// calls on the same matrix are bit-identical.
inline double spectral_norm(const Matrix& x, double tol = 1e-9) {
  if (x.size() == 0) throw DimensionError("spectral_norm: empty matrix");
  if (!(tol > 0.0)) throw ConfigError("spectral_norm: tol must be positive");

  const Matrix gram = (x.cols() <= x.rows()) ? Matrix(x.transpose() * x)
                                             : Matrix(x * x.transpose());
  const Index n = gram.rows();

  std::mt19937_64 rng(0x5b5ad4602d9c1a7eULL);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = gaussian(rng);
  const double v0 = v.norm();
  if (v0 > 0.0) {
    v /= v0;
  } else {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  }

  double lambda = -1.0;
  constexpr int kMaxIters = 10000;
  for (int it = 0; it < kMaxIters; ++it) {
    const Vector w = gram * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;  // Gram annihilates a generic vector: zero matrix
    v = w / wn;
    if (std::abs(wn - lambda) <=
        tol * std::max(wn, std::numeric_limits<double>::min())) {
      return std::sqrt(wn);
    }
    lambda = wn;
  }
  throw SolverError(
      "spectral_norm: power iteration did not converge (ill-conditioned "
      "input)");
}

}  // namespace spsu
