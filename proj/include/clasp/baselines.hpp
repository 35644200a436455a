#pragma once

// Comparison algorithms for constrained online convex optimization. These
// reproduce the behaviour of each method (what it projects onto, how its
// multiplier or queue evolves, how it scales steps), not the tuning of the
// original publications.
//
//   Recoo       x_{t+1} = P_K(x_t - eta_t (grad f_t + lambda_{t+1} grad g_t^+)),
//               lambda_{t+1} = lambda_t + g_t^+(x_t)
//   DppAdagrad  Q_{t+1} = max(0, Q_t + g_t^+(x_t)),
//               s_t = V grad f_t + Phi'(Q_{t+1}) grad g_t^+,
//               Phi(Q) = exp(lambda Q) - 1, lambda = 1 / (2 sqrt(T)),
//               x_{t+1} = P_K(x_t - D / sqrt(2 sum |s|^2) s_t)
//   Switch      x_{t+1} = P_{K ∩ C_1 ∩ ... ∩ C_t}(x_t - eta_t grad f_t)
//
// grad g_t^+ is grad g_t when g_t(x_t) > 0 and zero otherwise.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "clasp/clasp.hpp"
#include "clasp/errors.hpp"
#include "clasp/geometry.hpp"
#include "clasp/oracles.hpp"
#include "clasp/record.hpp"

namespace clasp::baselines {

enum class Algorithm { kRecoo, kDppAdagrad, kSwitch };

inline std::string_view name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRecoo: return "recoo";
    case Algorithm::kDppAdagrad: return "dpp-adagrad";
    case Algorithm::kSwitch: return "switch";
  }
  return "unknown";
}

struct BaselineConfig {
  /// Primal steps for Recoo and Switch.
  StepSchedule schedule = StepSchedule::convex(0.5);
  /// Loss weight V in the drift-plus-penalty surrogate.
  double penalty_scale = 1.0;
  /// Diameter used by the AdaGrad step; derived from K when unset.
  std::optional<double> diameter;
  /// Rate lambda of the exponential Lyapunov potential of DppAdagrad.
  /// run() sets 1 / (2 sqrt(T)) when unset; a bare baseline_step falls back
  /// to the anytime value 1 / (2 sqrt(t)).
  std::optional<double> lyapunov_rate;
};

struct BaselineState {
  Algorithm algorithm = Algorithm::kRecoo;
  std::size_t t = 1;
  Vector x;
  /// Recoo multiplier or DppAdagrad virtual queue, always >= 0.
  double queue = 0.0;
  /// Running sum of squared surrogate-gradient norms (DppAdagrad).
  double grad_sq_sum = 0.0;
  /// Step length used by the last update.
  double last_step = 0.0;
  /// Revealed constraint sets (Switch).
  std::vector<FeasibleSet> history;
};

inline BaselineState initial_state(Algorithm algorithm, Vector x1) {
  BaselineState state;
  state.algorithm = algorithm;
  state.x = std::move(x1);
  return state;
}

namespace detail {

inline Vector rectified_gradient(const ConvexOracle& g, const Vector& x) {
  if (g.value(x) > 0.0) return g.subgradient(x);
  return Vector::Zero(x.size());
}

inline Vector project_onto_k(const FeasibleSet& K, const Vector& u,
                             const ProjectionSettings& settings, std::size_t t) {
  ProjectionResult p = project(K, u, settings);
  if (p.infeasible) throw InfeasibleError(t, "action set is empty");
  return std::move(p.point);
}

}  // namespace detail

/// One round of the chosen baseline after observing (f_t, g_t) at x_t.
inline BaselineState baseline_step(const BaselineState& state, const ConvexOracle& loss,
                                   const ConvexOracle& constraint, const FeasibleSet& K,
                                   const ProjectionSettings& settings = {},
                                   const BaselineConfig& config = {}) {
  clasp::detail::require(state.x.size() == K.dimension(), "baseline_step: dimension mismatch");
  BaselineState next = state;
  next.t = state.t + 1;
  const Vector& x = state.x;
  const double violation = constraint.positive_part(x);

  switch (state.algorithm) {
    case Algorithm::kRecoo: {
      next.queue = state.queue + violation;
      const double eta = config.schedule(state.t);
      const Vector direction =
          loss.subgradient(x) + next.queue * detail::rectified_gradient(constraint, x);
      next.x = detail::project_onto_k(K, x - eta * direction, settings, state.t);
      next.last_step = eta;
      break;
    }
    case Algorithm::kDppAdagrad: {
      next.queue = std::max(0.0, state.queue + violation);
      const double rate = config.lyapunov_rate
                              ? *config.lyapunov_rate
                              : 0.5 / std::sqrt(static_cast<double>(state.t));
      // Phi'(Q) = lambda exp(lambda Q); the exponent is capped to stay finite.
      const double weight = rate * std::exp(std::min(rate * next.queue, 700.0));
      const Vector surrogate = config.penalty_scale * loss.subgradient(x) +
                               weight * detail::rectified_gradient(constraint, x);
      next.grad_sq_sum = state.grad_sq_sum + surrogate.squaredNorm();
      const double diameter = config.diameter ? *config.diameter : set_diameter(K);
      const double step =
          next.grad_sq_sum > 0.0 ? diameter / std::sqrt(2.0 * next.grad_sq_sum) : 0.0;
      next.x = detail::project_onto_k(K, x - step * surrogate, settings, state.t);
      next.last_step = step;
      break;
    }
    case Algorithm::kSwitch: {
      next.history.push_back(sublevel_set(constraint));
      std::vector<FeasibleSet> parts;
      parts.reserve(next.history.size() + 1);
      parts.push_back(K);
      parts.insert(parts.end(), next.history.begin(), next.history.end());
      const double eta = config.schedule(state.t);
      ProjectionResult p =
          project(Intersection{std::move(parts)}, x - eta * loss.subgradient(x), settings);
      if (p.infeasible) {
        throw InfeasibleError(state.t,
                              "historical constraint intersection is empty; switch cannot run");
      }
      next.x = std::move(p.point);
      next.last_step = eta;
      break;
    }
  }
  return next;
}

/// Runs a baseline for T rounds against a source revealing one scalar
/// constraint per round (a multi-row constraint arrives as its pointwise
/// maximum). No distance diagnostics are recorded.
inline RunRecord run(Algorithm algorithm, const RoundSource& source, const FeasibleSet& K,
                     std::size_t T, const Vector& x1, const ProjectionSettings& settings = {},
                     const BaselineConfig& config = {}) {
  clasp::detail::require(T >= 1, "baseline run: T must be >= 1");
  clasp::detail::require(contains(K, x1, settings.tol), "baseline run: x_1 must lie in K");
  RunRecord record;
  record.persistent = algorithm == Algorithm::kSwitch;
  record.rounds.reserve(T);
  record.log.reserve(T);
  BaselineConfig tuned = config;
  if (!tuned.lyapunov_rate) tuned.lyapunov_rate = 0.5 / std::sqrt(static_cast<double>(T));
  BaselineState state = initial_state(algorithm, x1);
  for (std::size_t t = 1; t <= T; ++t) {
    Round round = source(t, state.x);
    clasp::detail::require(round.constraints.size() == 1,
                           "baseline run: expected a single (scalar) constraint per round");
    RoundLog entry;
    entry.action = state.x;
    entry.loss = round.loss.value(state.x);
    entry.violation = round.violation(state.x);
    state = baseline_step(state, round.loss, round.constraints.front(), K, settings, tuned);
    entry.eta = state.last_step;
    entry.next_action = state.x;
    record.rounds.push_back(std::move(round));
    record.log.push_back(std::move(entry));
  }
  return record;
}

}  // namespace clasp::baselines
