#pragma once

// Cyclic proximal-gradient solver over the six factor blocks. Each sweep
// updates the active blocks in the fixed order M, A, D, U, B, Z; a block
// moves by an explicit-step gradient descent followed by the projection
// onto its constraint set. Step sizes are 1/(alpha * L) with L the block
// Lipschitz modulus recomputed from the freshest companion blocks.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "spsu/error.hpp"
#include "spsu/matrix.hpp"
#include "spsu/model.hpp"

namespace spsu {

struct SolverConfig {
  double alpha = 2.0;     // step-size safety factor, must exceed 1
  double rel_tol = 1e-4;  // stop when the relative objective gap drops below
  int max_iters = 10000;
  int trace_every = 1;    // trace-file thinning used by the experiment driver
  std::uint64_t seed = 0;

  void validate() const {
    if (!(alpha > 1.0)) throw ConfigError("SolverConfig: alpha must exceed 1");
    if (!(rel_tol > 0.0))
      throw ConfigError("SolverConfig: rel_tol must be positive");
    if (max_iters < 1)
      throw ConfigError("SolverConfig: max_iters must be positive");
    if (trace_every < 0)
      throw ConfigError("SolverConfig: trace_every must be non-negative");
  }
};

struct SolveResult {
  FactorState state;
  std::vector<double> objective_trace;  // value at start plus one per sweep
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
};

/// Any objective increase beyond this is treated as a gradient or
/// Lipschitz bug and raised as an error instead of silently accepted.
constexpr double kDescentSlack = 1e-9;

/// Constraint sets are enforced to this tolerance.
constexpr double kFeasibilityTol = 1e-12;

inline bool simplex_constrained(const ProblemSpec& spec, Block b) {
  switch (b) {
    case Block::M: return !spec.sum_to_one_on_A;
    case Block::A: return spec.sum_to_one_on_A;
    case Block::U:
    case Block::Z: return true;
    case Block::D:
    case Block::B: return false;
  }
  return false;
}

/// Worst violation of the active constraint sets: negative entries for
/// non-negative blocks, negative entries or column-sum error for simplex
/// blocks.
inline double constraint_violation(const ProblemSpec& spec,
                                   const FactorState& st) {
  double worst = 0.0;
  auto nonneg = [&](const Matrix& x) {
    if (x.size() > 0) worst = std::max(worst, -x.minCoeff());
  };
  auto simplex = [&](const Matrix& x) {
    if (x.size() == 0) return;
    worst = std::max(worst, -x.minCoeff());
    for (Index j = 0; j < x.cols(); ++j)
      worst = std::max(worst, std::abs(x.col(j).sum() - 1.0));
  };
  auto check = [&](const Matrix& x, Block b) {
    if (simplex_constrained(spec, b)) simplex(x); else nonneg(x);
  };
  check(st.M, Block::M);
  check(st.A, Block::A);
  if (uses_spatial_term(spec.variant)) check(st.D, Block::D);
  if (spec.variant == Variant::sp2u) check(st.U, Block::U);
  if (uses_coupling_term(spec.variant)) {
    check(st.B, Block::B);
    check(st.Z, Block::Z);
  }
  return worst;
}

namespace detail {

inline Matrix& state_block(FactorState& st, Block b) {
  switch (b) {
    case Block::M: return st.M;
    case Block::A: return st.A;
    case Block::D: return st.D;
    case Block::U: return st.U;
    case Block::B: return st.B;
    case Block::Z: return st.Z;
  }
  throw Error("state_block: unknown block");
}

inline void update_block(const ProblemSpec& spec, FactorState& st, Block b,
                         double alpha, int iteration) {
  const double lip = lipschitz_block(spec, st, b);
  const Matrix grad = grad_block(spec, st, b);
  if (!grad.allFinite())
    throw SolverError(std::string("non-finite gradient in block ") +
                      to_string(b) + " at iteration " +
                      std::to_string(iteration));
  Matrix& x = state_block(st, b);
  x -= (1.0 / (alpha * lip)) * grad;
  if (simplex_constrained(spec, b)) {
    project_simplex_columns_inplace(x);
  } else {
    project_nonneg_inplace(x);
  }
}

}  // namespace detail

/// One proximal-gradient update of a single block; all other blocks are
/// left untouched.
inline FactorState palm_step(const ProblemSpec& spec, const FactorState& st,
                             Block block, double alpha = 2.0) {
  if (!(alpha > 1.0)) throw ConfigError("palm_step: alpha must exceed 1");
  FactorState next = st;
  detail::update_block(spec, next, block, alpha, 0);
  return next;
}

/// Runs the cyclic block updates until the relative objective gap drops
/// below cfg.rel_tol or cfg.max_iters sweeps have been performed. The
/// starting point must satisfy all active constraints.
inline SolveResult solve(const ProblemSpec& spec, const FactorState& st0,
                         const SolverConfig& cfg = {}) {
  spec.validate();
  cfg.validate();
  const double violation = constraint_violation(spec, st0);
  if (violation > kFeasibilityTol)
    throw SolverError("solve: infeasible starting point (violation " +
                      std::to_string(violation) + ")");

  const auto start = std::chrono::steady_clock::now();
  SolveResult res;
  res.state = st0;
  res.objective_trace.push_back(eval_smooth(spec, res.state));

  if (spec.variant == Variant::fcls) {
    // Baseline: the initialization is the estimate.
    res.converged = true;
    res.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return res;
  }

  static constexpr Block kOrder[] = {Block::M, Block::A, Block::D,
                                     Block::U, Block::B, Block::Z};
  for (int k = 1; k <= cfg.max_iters; ++k) {
    for (Block b : kOrder) {
      if (block_active(spec.variant, b))
        detail::update_block(spec, res.state, b, cfg.alpha, k);
    }
    const double f_prev = res.objective_trace.back();
    const double f = eval_smooth(spec, res.state);
    if (f > f_prev + kDescentSlack)
      throw SolverError("solve: objective increased at iteration " +
                        std::to_string(k) + " (" + std::to_string(f_prev) +
                        " -> " + std::to_string(f) + ")");
    res.objective_trace.push_back(f);
    res.iterations = k;
    const double gap = std::abs(f - f_prev) / std::max(std::abs(f_prev), 1e-30);
    if (gap < cfg.rel_tol) {
      res.converged = true;
      break;
    }
  }
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return res;
}

/// Fully constrained least squares: minimizes ||Y - M A||_F^2 over
/// column-stochastic A by simplex-projected gradient descent with step
/// 1/||M^T M||. Used both as the abundance initializer and as the
/// VCA+FCLS baseline estimator.
inline Matrix solve_fcls(const Matrix& Y, const Matrix& M,
                         double rel_tol = 1e-8, int max_iters = 50000) {
  if (M.rows() != Y.rows())
    throw DimensionError("solve_fcls: Y has " + std::to_string(Y.rows()) +
                         " rows but M has " + std::to_string(M.rows()));
  if (M.cols() < 1 || Y.cols() < 1)
    throw DimensionError("solve_fcls: M and Y must be non-empty");

  const Index r = M.cols();
  const Index p = Y.cols();
  const Matrix mtm = M.transpose() * M;
  const Matrix mty = M.transpose() * Y;
  const double lip = std::max(spectral_norm(mtm), kLipschitzFloor);
  const double y2 = Y.squaredNorm();

  Matrix a = Matrix::Constant(r, p, 1.0 / static_cast<double>(r));
  Matrix h = mtm * a;
  auto objective = [&](const Matrix& coeff, const Matrix& gram_a) {
    return 0.5 * (y2 - 2.0 * coeff.cwiseProduct(mty).sum() +
                  coeff.cwiseProduct(gram_a).sum());
  };
  double f_prev = objective(a, h);
  for (int it = 0; it < max_iters; ++it) {
    a -= (1.0 / lip) * (h - mty);
    project_simplex_columns_inplace(a);
    h = mtm * a;
    const double f = objective(a, h);
    const double gap = std::abs(f - f_prev) / std::max(std::abs(f_prev), 1e-30);
    f_prev = f;
    if (gap < rel_tol) break;
  }
  return a;
}

}  // namespace spsu
