#pragma once

// CLASP: a subgradient step on the latest loss followed by a single
// projection onto K_t = K ∩ C_t.
//
//   x^_{t+1} = x_t - eta_t * grad f_t(x_t)
//   x_{t+1}  = P_{K_t}(x^_{t+1})
//
// The round set K_t depends on the constraint mode: the latest constraint
// (transient), the most violated of several (multi-transient), or every
// constraint revealed so far (persistent).

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "clasp/errors.hpp"
#include "clasp/geometry.hpp"
#include "clasp/oracles.hpp"
#include "clasp/record.hpp"

namespace clasp {

/// eta_t = t^-beta (convex losses) or 1 / (m t) (m-strongly convex losses).
class StepSchedule {
 public:
  enum class Mode { kConvex, kStronglyConvex };

  static StepSchedule convex(double beta) {
    detail::require(beta > 0.0 && beta < 1.0, "convex schedule requires beta in (0, 1)");
    return StepSchedule(Mode::kConvex, beta);
  }

  static StepSchedule strongly_convex(double modulus) {
    detail::require(modulus > 0.0 && std::isfinite(modulus),
                    "strongly convex schedule requires m > 0");
    return StepSchedule(Mode::kStronglyConvex, modulus);
  }

  Mode mode() const noexcept { return mode_; }
  bool is_convex() const noexcept { return mode_ == Mode::kConvex; }
  /// beta for the convex mode, m for the strongly convex mode.
  double parameter() const noexcept { return parameter_; }

  double operator()(std::size_t t) const {
    detail::require(t >= 1, "step size: rounds are numbered from 1");
    const auto tt = static_cast<double>(t);
    return mode_ == Mode::kConvex ? std::pow(tt, -parameter_) : 1.0 / (parameter_ * tt);
  }

  /// eta_t^2 <= theta * eta_t holds with theta = eta_1 for any
  /// non-increasing schedule.
  double theta() const { return (*this)(1); }

 private:
  StepSchedule(Mode mode, double parameter) : mode_(mode), parameter_(parameter) {}

  Mode mode_;
  double parameter_;
};

inline double step_size(const StepSchedule& schedule, std::size_t t) { return schedule(t); }

enum class ConstraintMode { kTransient, kPersistent, kMultiTransient };

struct LearnerState {
  std::size_t t = 1;
  Vector x;
  /// Revealed constraint sets; only populated in persistent mode.
  std::vector<FeasibleSet> history;
};

/// argmax_m g_{t;m}^+(x), lowest index on ties (including all-zero).
inline std::size_t select_active_constraint(std::span<const ConvexOracle> constraints,
                                            const Vector& x) {
  detail::require(!constraints.empty(), "select_active_constraint: empty constraint list");
  std::size_t best = 0;
  double best_violation = constraints[0].positive_part(x);
  for (std::size_t m = 1; m < constraints.size(); ++m) {
    const double v = constraints[m].positive_part(x);
    if (v > best_violation) {
      best_violation = v;
      best = m;
    }
  }
  return best;
}

/// K_t for the given mode. Persistent mode appends this round's constraint
/// sets to `state.history`.
inline FeasibleSet build_round_set(ConstraintMode mode, const FeasibleSet& K,
                                   std::span<const ConvexOracle> revealed, LearnerState& state) {
  detail::require(!revealed.empty(), "build_round_set: no constraint revealed");
  switch (mode) {
    case ConstraintMode::kTransient: {
      std::vector<FeasibleSet> parts{K};
      for (const auto& g : revealed) parts.push_back(sublevel_set(g));
      return Intersection{std::move(parts)};
    }
    case ConstraintMode::kMultiTransient: {
      const std::size_t m = select_active_constraint(revealed, state.x);
      return Intersection{{K, sublevel_set(revealed[m])}};
    }
    case ConstraintMode::kPersistent: {
      for (const auto& g : revealed) state.history.push_back(sublevel_set(g));
      std::vector<FeasibleSet> parts;
      parts.reserve(state.history.size() + 1);
      parts.push_back(K);
      parts.insert(parts.end(), state.history.begin(), state.history.end());
      return Intersection{std::move(parts)};
    }
  }
  throw ContractViolation("build_round_set: unknown constraint mode");
}

struct StepOutcome {
  LearnerState next;
  Vector gradient_step;  ///< x^_{t+1}
  ProjectionResult projection;
};

/// One CLASP update. Throws InfeasibleError when the round set is empty;
/// a projection that merely ran out of sweeps is returned with
/// `projection.converged == false`.
inline StepOutcome clasp_step(const LearnerState& state, const ConvexOracle& loss,
                              const FeasibleSet& round_set, double eta,
                              const ProjectionSettings& settings = {}) {
  detail::require(eta > 0.0 && std::isfinite(eta), "clasp_step: eta must be > 0");
  StepOutcome out;
  out.gradient_step = state.x - eta * loss.subgradient(state.x);
  out.projection = project(round_set, out.gradient_step, settings);
  if (out.projection.infeasible) {
    throw InfeasibleError(state.t, "round feasible set is empty");
  }
  out.next.t = state.t + 1;
  out.next.x = out.projection.point;
  out.next.history = state.history;
  return out;
}

/// Runs CLASP for T rounds. Round t is requested from `source` only after
/// x_t is fixed. Every round logs x_t, f_t(x_t), g_t^+(x_t), eta_t and the
/// distances d_{K_t}(x_t), d_{K_t}(x^_{t+1}).
inline RunRecord run(const RoundSource& source, const FeasibleSet& K,
                     const StepSchedule& schedule, ConstraintMode mode, std::size_t T,
                     const Vector& x1, const ProjectionSettings& settings = {}) {
  detail::require(T >= 1, "run: T must be >= 1");
  detail::require(x1.size() == K.dimension(), "run: x_1 dimension mismatch");
  detail::require(contains(K, x1, settings.tol), "run: x_1 must lie in K");

  RunRecord record;
  record.persistent = mode == ConstraintMode::kPersistent;
  record.rounds.reserve(T);
  record.log.reserve(T);

  LearnerState state;
  state.x = x1;
  for (std::size_t t = 1; t <= T; ++t) {
    Round round = source(t, state.x);
    detail::require(round.loss.dimension() == K.dimension(), "run: loss dimension mismatch");

    RoundLog entry;
    entry.action = state.x;
    entry.loss = round.loss.value(state.x);
    entry.violation = round.violation(state.x);
    entry.eta = schedule(t);

    const FeasibleSet round_set = build_round_set(mode, K, round.constraints, state);
    entry.dist_action = distance(round_set, state.x, settings);

    StepOutcome step = clasp_step(state, round.loss, round_set, entry.eta, settings);
    entry.dist_gradient_step = (step.gradient_step - step.projection.point).norm();
    entry.gradient_step = std::move(step.gradient_step);
    entry.next_action = step.projection.point;
    entry.projection_converged = step.projection.converged;

    state = std::move(step.next);
    record.rounds.push_back(std::move(round));
    record.log.push_back(std::move(entry));
  }
  return record;
}

}  // namespace clasp
