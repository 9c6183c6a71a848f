#pragma once

// Problem data, the six-block factor state, the smooth objective and its
// per-block gradients and Lipschitz moduli.
//
// The full objective is
//   f = l0/2 ||Y - M A||_F^2 + l1/2 ||S - D U||_F^2
//     + l2/2 ||[A; U] - B Z||_F^2 + lz/2 Tr(Z^T V Z)
// with V = 11^T - I, plus non-negativity on M, D, B and column-simplex
// constraints on A, U, Z. Variants drop terms and blocks:
//   nmf   keeps only the spectral term (blocks M, A);
//   nsp2u ties U = A and drops the clustering (blocks M, A, D with D
//         holding R1 atoms);
//   cspu  drops the spatial term and clusters A alone (blocks M, A, B, Z
//         with B holding R1 rows);
//   fcls  tags the VCA+FCLS baseline (no iterative refinement).
// When sum_to_one_on_A is false, the sum-to-one constraint moves from the
// columns of A to the columns of M and A keeps non-negativity only.

#include <string>

#include "spsu/error.hpp"
#include "spsu/matrix.hpp"

namespace spsu {

enum class Variant { sp2u, nmf, nsp2u, cspu, fcls };
enum class Block { M, A, D, U, B, Z };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::sp2u: return "sp2u";
    case Variant::nmf: return "nmf";
    case Variant::nsp2u: return "nsp2u";
    case Variant::cspu: return "cspu";
    case Variant::fcls: return "fcls";
  }
  return "?";
}

inline const char* to_string(Block b) {
  switch (b) {
    case Block::M: return "M";
    case Block::A: return "A";
    case Block::D: return "D";
    case Block::U: return "U";
    case Block::B: return "B";
    case Block::Z: return "Z";
  }
  return "?";
}

struct Dims {
  Index d1 = 0;  // spectral bands
  Index d2 = 0;  // spatial feature length
  Index P = 0;   // pixels
  Index R1 = 0;  // endmembers
  Index R2 = 0;  // spatial atoms
  Index K = 0;   // clusters
};

struct Weights {
  double lambda0 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda_z = 0.1;
};

struct ProblemSpec {
  Matrix Y;  // d1 x P observed spectra
  Matrix S;  // d2 x P spatial features; may be empty for nmf/cspu/fcls
  Dims dims;
  Weights weights;
  bool sum_to_one_on_A = true;
  Variant variant = Variant::sp2u;

  void validate() const;
};

/// The six estimated factors. Blocks that a variant does not use stay
/// empty (0 x 0).
struct FactorState {
  Matrix M;  // d1 x R1, non-negative (column-simplex when the sum-to-one moves here)
  Matrix A;  // R1 x P, column-simplex (non-negative under the relaxed variant)
  Matrix D;  // d2 x R2 (d2 x R1 for nsp2u), non-negative
  Matrix U;  // R2 x P, column-simplex
  Matrix B;  // (R1+R2) x K (R1 x K for cspu), non-negative
  Matrix Z;  // K x P, column-simplex
};

inline bool block_active(Variant v, Block b) {
  switch (v) {
    case Variant::sp2u:
      return true;
    case Variant::nmf:
    case Variant::fcls:
      return b == Block::M || b == Block::A;
    case Variant::nsp2u:
      return b == Block::M || b == Block::A || b == Block::D;
    case Variant::cspu:
      return b != Block::D && b != Block::U;
  }
  return false;
}

/// True when the spatial data term couples into the clustering stack,
/// i.e. the stack is [A; U] rather than A alone.
inline bool couples_spatial(Variant v) { return v == Variant::sp2u; }

inline bool uses_spatial_term(Variant v) {
  return v == Variant::sp2u || v == Variant::nsp2u;
}

inline bool uses_coupling_term(Variant v) {
  return v == Variant::sp2u || v == Variant::cspu;
}

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

inline std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace detail

inline void ProblemSpec::validate() const {
  if (dims.d1 < 1 || dims.P < 1 || dims.R1 < 1)
    throw ConfigError("ProblemSpec: d1, P and R1 must be positive");
  if (dims.R1 >= dims.d1)
    throw ConfigError("ProblemSpec: R1 = " + std::to_string(dims.R1) +
                      " must be smaller than d1 = " + std::to_string(dims.d1));
  if (weights.lambda0 < 0 || weights.lambda1 < 0 || weights.lambda2 < 0 ||
      weights.lambda_z < 0)
    throw ConfigError("ProblemSpec: weights must be non-negative");
  detail::require(Y.rows() == dims.d1 && Y.cols() == dims.P,
                  "ProblemSpec: Y is " + detail::shape(Y) + " but dims say " +
                      std::to_string(dims.d1) + "x" + std::to_string(dims.P));
  if (uses_spatial_term(variant)) {
    if (dims.d2 < 1) throw ConfigError("ProblemSpec: d2 must be positive");
    detail::require(
        S.rows() == dims.d2 && S.cols() == dims.P,
        "ProblemSpec: S is " + detail::shape(S) + " but dims say " +
            std::to_string(dims.d2) + "x" + std::to_string(dims.P) +
            " (Y and S must share the pixel count)");
  }
  if (variant == Variant::sp2u && dims.R2 < 1)
    throw ConfigError("ProblemSpec: R2 must be positive");
  if (uses_coupling_term(variant) && dims.K < 1)
    throw ConfigError("ProblemSpec: K must be positive");
}

namespace detail {

// Rows of B available for the spectral half of the stack.
inline Index coupled_rows(const ProblemSpec& spec) {
  return couples_spatial(spec.variant) ? spec.dims.R1 + spec.dims.R2
                                       : spec.dims.R1;
}

inline void check_state(const ProblemSpec& spec, const FactorState& st) {
  const Dims& d = spec.dims;
  require(st.M.rows() == d.d1 && st.M.cols() == d.R1,
          "state: M is " + shape(st.M) + ", expected " +
              std::to_string(d.d1) + "x" + std::to_string(d.R1));
  require(st.A.rows() == d.R1 && st.A.cols() == d.P,
          "state: A is " + shape(st.A) + ", expected " +
              std::to_string(d.R1) + "x" + std::to_string(d.P));
  if (uses_spatial_term(spec.variant)) {
    const Index atoms = (spec.variant == Variant::nsp2u) ? d.R1 : d.R2;
    require(st.D.rows() == d.d2 && st.D.cols() == atoms,
            "state: D is " + shape(st.D) + ", expected " +
                std::to_string(d.d2) + "x" + std::to_string(atoms));
  }
  if (spec.variant == Variant::sp2u) {
    require(st.U.rows() == d.R2 && st.U.cols() == d.P,
            "state: U is " + shape(st.U) + ", expected " +
                std::to_string(d.R2) + "x" + std::to_string(d.P));
  }
  if (uses_coupling_term(spec.variant)) {
    const Index rows = coupled_rows(spec);
    require(st.B.rows() == rows && st.B.cols() == d.K,
            "state: B is " + shape(st.B) + ", expected " +
                std::to_string(rows) + "x" + std::to_string(d.K));
    require(st.Z.rows() == d.K && st.Z.cols() == d.P,
            "state: Z is " + shape(st.Z) + ", expected " +
                std::to_string(d.K) + "x" + std::to_string(d.P));
  }
}

}  // namespace detail

/// V Z with V = 11^T - I applied as an operator: broadcast column sums
/// minus Z itself. V is never materialized outside of tests.
inline Matrix coupling_apply_v(const Matrix& z) {
  const Eigen::RowVectorXd colsum = z.colwise().sum();
  Matrix vz = -z;
  vz.rowwise() += colsum;
  return vz;
}

/// Tr(Z^T V Z) = sum over distinct row pairs of their scalar products.
/// Zero exactly when rows of Z have pairwise disjoint supports; for a
/// column-stochastic Z this rewards hard cluster assignments.
inline double coupling_penalty(const Matrix& z) {
  const double s = z.colwise().sum().squaredNorm() - z.squaredNorm();
  return std::max(s, 0.0);  // guards roundoff; the exact value is >= 0 for Z >= 0
}

/// Value of the smooth objective for the variant's active terms. Terms
/// with zero weight are skipped.
inline double eval_smooth(const ProblemSpec& spec, const FactorState& st) {
  detail::check_state(spec, st);
  const Weights& w = spec.weights;
  double f = 0.0;
  if (w.lambda0 != 0.0)
    f += 0.5 * w.lambda0 * (spec.Y - st.M * st.A).squaredNorm();
  if (uses_spatial_term(spec.variant) && w.lambda1 != 0.0) {
    const Matrix& coding = (spec.variant == Variant::nsp2u) ? st.A : st.U;
    f += 0.5 * w.lambda1 * (spec.S - st.D * coding).squaredNorm();
  }
  if (uses_coupling_term(spec.variant)) {
    if (w.lambda2 != 0.0) {
      const Index r1 = spec.dims.R1;
      double fit = (st.A - st.B.topRows(r1) * st.Z).squaredNorm();
      if (couples_spatial(spec.variant))
        fit += (st.U - st.B.bottomRows(spec.dims.R2) * st.Z).squaredNorm();
      f += 0.5 * w.lambda2 * fit;
    }
    if (w.lambda_z != 0.0) f += 0.5 * w.lambda_z * coupling_penalty(st.Z);
  }
  return f;
}

/// Partial gradient of the smooth objective with respect to one block,
/// all other blocks held fixed.
inline Matrix grad_block(const ProblemSpec& spec, const FactorState& st,
                         Block block) {
  if (!block_active(spec.variant, block))
    throw Error(std::string("grad_block: block ") + to_string(block) +
                " is inactive under variant " + to_string(spec.variant));
  detail::check_state(spec, st);
  const Weights& w = spec.weights;
  const Index r1 = spec.dims.R1;

  switch (block) {
    case Block::M: {
      Matrix g = Matrix::Zero(st.M.rows(), st.M.cols());
      if (w.lambda0 != 0.0)
        g += w.lambda0 *
             (st.M * (st.A * st.A.transpose()) - spec.Y * st.A.transpose());
      return g;
    }
    case Block::A: {
      Matrix g = Matrix::Zero(st.A.rows(), st.A.cols());
      if (w.lambda0 != 0.0)
        g += w.lambda0 * ((st.M.transpose() * st.M) * st.A -
                          st.M.transpose() * spec.Y);
      if (spec.variant == Variant::nsp2u && w.lambda1 != 0.0)
        g += w.lambda1 * ((st.D.transpose() * st.D) * st.A -
                          st.D.transpose() * spec.S);
      if (uses_coupling_term(spec.variant) && w.lambda2 != 0.0)
        g += w.lambda2 * (st.A - st.B.topRows(r1) * st.Z);
      return g;
    }
    case Block::D: {
      const Matrix& coding = (spec.variant == Variant::nsp2u) ? st.A : st.U;
      Matrix g = Matrix::Zero(st.D.rows(), st.D.cols());
      if (w.lambda1 != 0.0)
        g += w.lambda1 * (st.D * (coding * coding.transpose()) -
                          spec.S * coding.transpose());
      return g;
    }
    case Block::U: {
      Matrix g = Matrix::Zero(st.U.rows(), st.U.cols());
      if (w.lambda1 != 0.0)
        g += w.lambda1 * ((st.D.transpose() * st.D) * st.U -
                          st.D.transpose() * spec.S);
      if (w.lambda2 != 0.0)
        g += w.lambda2 * (st.U - st.B.bottomRows(spec.dims.R2) * st.Z);
      return g;
    }
    case Block::B: {
      Matrix g = Matrix::Zero(st.B.rows(), st.B.cols());
      if (w.lambda2 != 0.0) {
        g += w.lambda2 * (st.B * (st.Z * st.Z.transpose()));
        g.topRows(r1) -= w.lambda2 * (st.A * st.Z.transpose());
        if (couples_spatial(spec.variant))
          g.bottomRows(spec.dims.R2) -=
              w.lambda2 * (st.U * st.Z.transpose());
      }
      return g;
    }
    case Block::Z: {
      Matrix g = Matrix::Zero(st.Z.rows(), st.Z.cols());
      if (w.lambda2 != 0.0) {
        g += w.lambda2 * ((st.B.transpose() * st.B) * st.Z);
        g -= w.lambda2 * (st.B.topRows(r1).transpose() * st.A);
        if (couples_spatial(spec.variant))
          g -= w.lambda2 *
               (st.B.bottomRows(spec.dims.R2).transpose() * st.U);
      }
      if (w.lambda_z != 0.0) g += w.lambda_z * coupling_apply_v(st.Z);
      return g;
    }
  }
  throw Error("grad_block: unknown block");
}

/// Degenerate moduli (an all-zero companion block) are floored so the
/// PALM step 1/(alpha L) stays finite.
constexpr double kLipschitzFloor = 1e-12;

/// Lipschitz modulus of the block gradient, recomputed from the current
/// companion blocks. The gradient maps are linear in their own block, so
/// each modulus is the spectral norm of the corresponding system matrix.
inline double lipschitz_block(const ProblemSpec& spec, const FactorState& st,
                              Block block) {
  if (!block_active(spec.variant, block))
    throw Error(std::string("lipschitz_block: block ") + to_string(block) +
                " is inactive under variant " + to_string(spec.variant));
  const Weights& w = spec.weights;
  double value = 0.0;

  switch (block) {
    case Block::M:
      value = spectral_norm(w.lambda0 * (st.A * st.A.transpose()));
      break;
    case Block::A: {
      Matrix h = w.lambda0 * (st.M.transpose() * st.M);
      if (spec.variant == Variant::nsp2u && w.lambda1 != 0.0)
        h += w.lambda1 * (st.D.transpose() * st.D);
      if (uses_coupling_term(spec.variant) && w.lambda2 != 0.0)
        h.diagonal().array() += w.lambda2;
      value = spectral_norm(h);
      break;
    }
    case Block::D: {
      const Matrix& coding = (spec.variant == Variant::nsp2u) ? st.A : st.U;
      value = spectral_norm(w.lambda1 * (coding * coding.transpose()));
      break;
    }
    case Block::U: {
      Matrix h = w.lambda1 * (st.D.transpose() * st.D);
      if (w.lambda2 != 0.0) h.diagonal().array() += w.lambda2;
      value = spectral_norm(h);
      break;
    }
    case Block::B:
      value = spectral_norm(w.lambda2 * (st.Z * st.Z.transpose()));
      break;
    case Block::Z: {
      Matrix h = w.lambda2 * (st.B.transpose() * st.B);
      if (w.lambda_z != 0.0) {
        h.array() += w.lambda_z;             // lz * 11^T
        h.diagonal().array() -= w.lambda_z;  // - lz * I
      }
      value = spectral_norm(h);
      break;
    }
  }
  return std::max(value, kLipschitzFloor);
}

/// Spatial-spectral signature of each cluster: blockdiag(M, D) * B.
/// Column k stacks the mean spectral signature over the mean spatial
/// signature. D (and the matching rows of B) may be absent.
inline Matrix cluster_signatures(const FactorState& st) {
  const Index r1 = st.M.cols();
  const Index r2 = st.D.cols();
  if (st.B.rows() != r1 + r2)
    throw DimensionError("cluster_signatures: B has " +
                         std::to_string(st.B.rows()) + " rows, expected " +
                         std::to_string(r1 + r2));
  Matrix sig(st.M.rows() + st.D.rows(), st.B.cols());
  sig.topRows(st.M.rows()) = st.M * st.B.topRows(r1);
  if (r2 > 0) sig.bottomRows(st.D.rows()) = st.D * st.B.bottomRows(r2);
  return sig;
}

/// Weight renormalization for the data-fit terms: the raw weights are
/// divided by the ambient dimension and squared dynamic range so that
/// the terms are comparable across datasets.
inline Weights renormalize_weights(const Weights& tilde, const Matrix& Y,
                                   const Matrix& S) {
  Weights w = tilde;
  const double ymax = Y.cwiseAbs().maxCoeff();
  if (ymax <= 0.0)
    throw DataError("renormalize_weights: Y has zero dynamic range");
  w.lambda0 = tilde.lambda0 / (static_cast<double>(Y.rows()) * ymax * ymax);
  if (S.size() > 0) {
    const double smax = S.cwiseAbs().maxCoeff();
    if (smax <= 0.0)
      throw DataError("renormalize_weights: S has zero dynamic range");
    w.lambda1 = tilde.lambda1 / (static_cast<double>(S.rows()) * smax * smax);
  }
  return w;
}

}  // namespace spsu
