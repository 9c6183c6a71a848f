#pragma once

// Starting-point construction: pure-pixel endmember extraction, FCLS
// abundances, k-means for the spatial dictionary and for the cluster
// centroids/assignments. Everything is deterministic given the seed.

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "spsu/error.hpp"
#include "spsu/matrix.hpp"
#include "spsu/model.hpp"
#include "spsu/rng.hpp"
#include "spsu/solver.hpp"

namespace spsu {

struct KMeansResult {
  Matrix centroids;              // dim x k
  std::vector<int> assignments;  // nearest centroid per column, ties to lowest index
  double inertia = 0.0;          // sum of squared distances to assigned centroids
};

/// Lloyd's algorithm with ++-style seeding. Empty clusters are re-seeded
/// at the point farthest from its assigned centroid. Inertia is checked
/// to be non-increasing; a violation is raised as a solver bug.
inline KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed,
                           int max_iters = 300) {
  const Index n = x.cols();
  if (k < 1) throw ConfigError("kmeans: k must be at least 1");
  if (n < k)
    throw DimensionError("kmeans: k = " + std::to_string(k) +
                         " exceeds the number of columns " +
                         std::to_string(n));

  std::mt19937_64 rng(seed);
  Matrix centroids(x.rows(), k);
  std::vector<double> nearest_sq(static_cast<std::size_t>(n));

  centroids.col(0) = x.col(static_cast<Index>(
      uniform_index(rng, static_cast<std::size_t>(n))));
  for (Index p = 0; p < n; ++p)
    nearest_sq[static_cast<std::size_t>(p)] =
        (x.col(p) - centroids.col(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total =
        std::accumulate(nearest_sq.begin(), nearest_sq.end(), 0.0);
    Index pick = 0;
    if (total > 0.0) {
      // distance-squared weighted draw
      double u = uniform01(rng) * total;
      for (Index p = 0; p < n; ++p) {
        u -= nearest_sq[static_cast<std::size_t>(p)];
        if (u <= 0.0) { pick = p; break; }
        pick = p;
      }
    } else {
      pick = static_cast<Index>(uniform_index(rng, static_cast<std::size_t>(n)));
    }
    centroids.col(j) = x.col(pick);
    for (Index p = 0; p < n; ++p) {
      const double d = (x.col(p) - centroids.col(j)).squaredNorm();
      auto& cur = nearest_sq[static_cast<std::size_t>(p)];
      if (d < cur) cur = d;
    }
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist_sq(static_cast<std::size_t>(n), 0.0);
  auto assign_all = [&]() {
    double inertia = 0.0;
    for (Index p = 0; p < n; ++p) {
      int best = 0;
      double best_d = (x.col(p) - centroids.col(0)).squaredNorm();
      for (int j = 1; j < k; ++j) {
        const double d = (x.col(p) - centroids.col(j)).squaredNorm();
        if (d < best_d) { best_d = d; best = j; }
      }
      assign[static_cast<std::size_t>(p)] = best;
      dist_sq[static_cast<std::size_t>(p)] = best_d;
      inertia += best_d;
    }
    return inertia;
  };

  double inertia = assign_all();
  std::vector<int> counts(static_cast<std::size_t>(k));
  for (int it = 0; it < max_iters; ++it) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Index p = 0; p < n; ++p) ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])];

    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] != 0) continue;
      Index farthest = -1;
      double far_d = -1.0;
      for (Index p = 0; p < n; ++p) {
        const int owner = assign[static_cast<std::size_t>(p)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        if (dist_sq[static_cast<std::size_t>(p)] > far_d) {
          far_d = dist_sq[static_cast<std::size_t>(p)];
          farthest = p;
        }
      }
      if (farthest < 0) continue;  // fewer distinct points than clusters
      centroids.col(j) = x.col(farthest);
      --counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(farthest)])];
      assign[static_cast<std::size_t>(farthest)] = j;
      dist_sq[static_cast<std::size_t>(farthest)] = 0.0;
      ++counts[static_cast<std::size_t>(j)];
      reseeded = true;
    }

    Matrix sums = Matrix::Zero(x.rows(), k);
    for (Index p = 0; p < n; ++p)
      sums.col(assign[static_cast<std::size_t>(p)]) += x.col(p);
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0)
        centroids.col(j) =
            sums.col(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }

    const std::vector<int> prev = assign;
    const double next_inertia = assign_all();
    if (next_inertia > inertia + 1e-9 * (1.0 + inertia))
      throw SolverError("kmeans: inertia increased across an iteration");
    inertia = next_inertia;
    if (!reseeded && assign == prev) break;
  }
  return {std::move(centroids), std::move(assign), inertia};
}

/// Pure-pixel endmember extraction by iterative orthogonal-subspace
/// projection: repeatedly select the column with the largest residual
/// after projecting out the span of the columns already selected. The
/// seed is accepted for interface stability; selection is deterministic
/// with ties broken by lowest column index.
inline Matrix vca_extract(const Matrix& y, int r1, std::uint64_t /*seed*/) {
  const Index d1 = y.rows();
  const Index p = y.cols();
  if (r1 < 1 || r1 > std::min(d1, p))
    throw DimensionError("vca_extract: R1 = " + std::to_string(r1) +
                         " must lie in [1, min(d1, P)] = [1, " +
                         std::to_string(std::min(d1, p)) + "]");

  Vector residual_sq = y.colwise().squaredNorm();
  const double scale = residual_sq.maxCoeff();
  if (scale <= 0.0) throw DataError("vca_extract: all columns are zero");

  Matrix basis(d1, r1);
  Matrix endmembers(d1, r1);
  for (int r = 0; r < r1; ++r) {
    Index pick = 0;
    const double best = residual_sq.maxCoeff(&pick);
    if (best <= scale * 1e-24)
      throw DataError("vca_extract: rank-deficient data, only " +
                      std::to_string(r) + " independent columns found");
    endmembers.col(r) = y.col(pick).cwiseMax(0.0);

    Vector q = y.col(pick);
    if (r > 0) {
      // two Gram-Schmidt passes keep the basis orthonormal
      q -= basis.leftCols(r) * (basis.leftCols(r).transpose() * q);
      q -= basis.leftCols(r) * (basis.leftCols(r).transpose() * q);
    }
    q /= q.norm();
    basis.col(r) = q;

    const Eigen::RowVectorXd proj = q.transpose() * y;
    residual_sq -= proj.array().square().matrix().transpose();
    residual_sq = residual_sq.cwiseMax(0.0);
  }
  return endmembers;
}

namespace detail {

inline Matrix indicator_columns(const std::vector<int>& assignments, int k) {
  Matrix z = Matrix::Zero(k, static_cast<Index>(assignments.size()));
  for (std::size_t p = 0; p < assignments.size(); ++p)
    z(assignments[p], static_cast<Index>(p)) = 1.0;
  return z;
}

inline void normalize_columns_l1(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double s = m.col(j).sum();
    if (s <= 0.0)
      throw DataError("initialize: endmember column " + std::to_string(j) +
                      " has non-positive mass, cannot normalize");
    m.col(j) /= s;
  }
}

}  // namespace detail

/// Builds the feasible starting point: endmembers from pure-pixel
/// extraction, abundances from FCLS, spatial dictionary/coding from a
/// k-means on the feature columns and cluster centroids/assignments from
/// a k-means on the stacked coding matrices.
inline FactorState initialize(const ProblemSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 master(seed);
  const std::uint64_t seed_spatial = master();
  const std::uint64_t seed_cluster = master();

  FactorState st;
  st.M = vca_extract(spec.Y, static_cast<int>(spec.dims.R1), seed);
  if (!spec.sum_to_one_on_A) detail::normalize_columns_l1(st.M);
  st.A = solve_fcls(spec.Y, st.M);

  switch (spec.variant) {
    case Variant::sp2u: {
      const KMeansResult spatial =
          kmeans(spec.S, static_cast<int>(spec.dims.R2), seed_spatial);
      st.D = spatial.centroids.cwiseMax(0.0);
      st.U = detail::indicator_columns(spatial.assignments,
                                       static_cast<int>(spec.dims.R2));
      Matrix stacked(spec.dims.R1 + spec.dims.R2, spec.dims.P);
      stacked.topRows(spec.dims.R1) = st.A;
      stacked.bottomRows(spec.dims.R2) = st.U;
      const KMeansResult cluster =
          kmeans(stacked, static_cast<int>(spec.dims.K), seed_cluster);
      st.B = cluster.centroids.cwiseMax(0.0);
      st.Z = detail::indicator_columns(cluster.assignments,
                                       static_cast<int>(spec.dims.K));
      break;
    }
    case Variant::nsp2u: {
      const KMeansResult spatial =
          kmeans(spec.S, static_cast<int>(spec.dims.R1), seed_spatial);
      st.D = spatial.centroids.cwiseMax(0.0);
      break;
    }
    case Variant::cspu: {
      const KMeansResult cluster =
          kmeans(st.A, static_cast<int>(spec.dims.K), seed_cluster);
      st.B = cluster.centroids.cwiseMax(0.0);
      st.Z = detail::indicator_columns(cluster.assignments,
                                       static_cast<int>(spec.dims.K));
      break;
    }
    case Variant::nmf:
    case Variant::fcls:
      break;
  }
  return st;
}

}  // namespace spsu
