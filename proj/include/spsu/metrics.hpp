#pragma once

// Evaluation metrics: average spectral angle, abundance RMSE,
// reconstruction error, minimum-angle endmember relabeling and
// per-cluster reporting.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spsu/error.hpp"
#include "spsu/matrix.hpp"
#include "spsu/model.hpp"

namespace spsu {

/// Mean angle (radians) between matching columns of the reference and
/// estimate. Invariant to positive per-column scaling of either side.
inline double asam(const Matrix& m_ref, const Matrix& m) {
  if (m_ref.rows() != m.rows() || m_ref.cols() != m.cols())
    throw DimensionError("asam: reference is " +
                         std::to_string(m_ref.rows()) + "x" +
                         std::to_string(m_ref.cols()) + " but estimate is " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  if (m.cols() < 1) throw DimensionError("asam: no columns");
  double sum = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    const double nr = m_ref.col(j).norm();
    const double ne = m.col(j).norm();
    if (nr == 0.0 || ne == 0.0)
      throw DataError("asam: column " + std::to_string(j) + " is zero");
    const double c = std::clamp(m_ref.col(j).dot(m.col(j)) / (nr * ne), -1.0, 1.0);
    sum += std::acos(c);
  }
  return sum / static_cast<double>(m.cols());
}

/// sqrt(||A_ref - A||_F^2 / (P * R1)).
inline double rmse(const Matrix& a_ref, const Matrix& a) {
  if (a_ref.rows() != a.rows() || a_ref.cols() != a.cols())
    throw DimensionError("rmse: shapes differ (" +
                         std::to_string(a_ref.rows()) + "x" +
                         std::to_string(a_ref.cols()) + " vs " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ")");
  return std::sqrt((a_ref - a).squaredNorm() /
                   static_cast<double>(a.size()));
}

/// sqrt(||Y - M A||_F^2 / (P * d1)).
inline double reconstruction_error(const Matrix& y, const Matrix& m,
                                   const Matrix& a) {
  if (m.rows() != y.rows() || m.cols() != a.rows() || a.cols() != y.cols())
    throw DimensionError(
        "reconstruction_error: inconsistent shapes, Y " +
        std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ", M " +
        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", A " +
        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  return std::sqrt((y - m * a).squaredNorm() / static_cast<double>(y.size()));
}

/// Exact minimum-cost assignment on a square cost matrix (shortest
/// augmenting paths with potentials, O(n^3)). Returns the column assigned
/// to each row.
inline std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1)
    throw DimensionError("hungarian: cost matrix must be square and non-empty");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

/// Permutation of estimate columns that minimizes the mean spectral angle
/// against the reference: entry r is the estimate column matched to
/// reference column r.
inline std::vector<int> match_endmembers(const Matrix& m_ref, const Matrix& m) {
  if (m_ref.cols() != m.cols())
    throw DimensionError("match_endmembers: column counts differ (" +
                         std::to_string(m_ref.cols()) + " vs " +
                         std::to_string(m.cols()) + ")");
  const Index n = m.cols();
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i) {
    const double nr = m_ref.col(i).norm();
    if (nr == 0.0)
      throw DataError("match_endmembers: reference column " +
                      std::to_string(i) + " is zero");
    for (Index j = 0; j < n; ++j) {
      const double ne = m.col(j).norm();
      if (ne == 0.0)
        throw DataError("match_endmembers: estimate column " +
                        std::to_string(j) + " is zero");
      const double c =
          std::clamp(m_ref.col(i).dot(m.col(j)) / (nr * ne), -1.0, 1.0);
      cost(i, j) = std::acos(c);
    }
  }
  return hungarian(cost);
}

/// Applies a match_endmembers permutation: reorders estimate columns of M
/// (and the corresponding rows of A) to align with the reference.
inline Matrix permute_columns(const Matrix& m, const std::vector<int>& perm) {
  if (static_cast<Index>(perm.size()) != m.cols())
    throw DimensionError("permute_columns: permutation length " +
                         std::to_string(perm.size()) + " vs " +
                         std::to_string(m.cols()) + " columns");
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    out.col(j) = m.col(perm[static_cast<std::size_t>(j)]);
  return out;
}

inline Matrix permute_rows(const Matrix& m, const std::vector<int>& perm) {
  if (static_cast<Index>(perm.size()) != m.rows())
    throw DimensionError("permute_rows: permutation length " +
                         std::to_string(perm.size()) + " vs " +
                         std::to_string(m.rows()) + " rows");
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    out.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

struct EvalReport {
  double asam = 0.0;
  double rmse = 0.0;
  double re = 0.0;
  std::vector<int> permutation;
  double wall_time = 0.0;
};

struct ClusterSummary {
  int cluster = 0;          // column index in B
  int population = 0;       // pixels whose Z column peaks at this cluster
  std::vector<int> pixels;
  Vector spectral;          // mean spectral signature M * B1 column
  Vector spatial;           // mean spatial signature D * B2 column (may be empty)
};

/// Per-cluster report: pixel membership by column-wise argmax of Z (ties
/// to the lowest index) and the spatial-spectral signature columns.
/// Ordered by population, largest first; empty clusters keep their
/// signatures, which do not depend on membership.
inline std::vector<ClusterSummary> summarize_clusters(const FactorState& st) {
  if (st.Z.size() == 0 || st.B.size() == 0)
    throw DimensionError("summarize_clusters: state has no clustering blocks");
  const int k = static_cast<int>(st.Z.rows());
  const Matrix sig = cluster_signatures(st);
  const Index d1 = st.M.rows();

  std::vector<ClusterSummary> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    out[static_cast<std::size_t>(j)].cluster = j;
    out[static_cast<std::size_t>(j)].spectral = sig.col(j).head(d1);
    out[static_cast<std::size_t>(j)].spatial = sig.col(j).tail(sig.rows() - d1);
  }
  for (Index p = 0; p < st.Z.cols(); ++p) {
    Index best = 0;
    st.Z.col(p).maxCoeff(&best);  // first maximum = lowest index on ties
    auto& summary = out[static_cast<std::size_t>(best)];
    summary.pixels.push_back(static_cast<int>(p));
    ++summary.population;
  }
  std::sort(out.begin(), out.end(),
            [](const ClusterSummary& a, const ClusterSummary& b) {
              if (a.population != b.population)
                return a.population > b.population;
              return a.cluster < b.cluster;
            });
  return out;
}

}  // namespace spsu
