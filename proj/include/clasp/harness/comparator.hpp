#pragma once

// Hindsight comparator x*_T = argmin over K ∩ C_1 ∩ ... ∩ C_T of sum_t f_t.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "clasp/errors.hpp"
#include "clasp/geometry.hpp"
#include "clasp/oracles.hpp"
#include "clasp/record.hpp"

namespace clasp::harness {

struct ComparatorSettings {
  /// Total projected-subgradient iterations, split evenly across stages.
  std::size_t iterations = 2000;
  /// Each stage restarts from the best point with half the step radius.
  std::size_t stages = 4;
  ProjectionSettings projection;
};

struct ComparatorResult {
  bool feasible = false;
  Vector point;
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// Upper bound on objective - optimum (infinite when no bound is known).
  double gap_bound = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

inline double total_loss(std::span<const Round> rounds, const Vector& x) {
  double sum = 0.0;
  for (const auto& r : rounds) sum += r.loss.value(x);
  return sum;
}

/// K intersected with the sublevel set of every constraint in `rounds`.
inline FeasibleSet hindsight_set(std::span<const Round> rounds, const FeasibleSet& K) {
  std::vector<FeasibleSet> parts{K};
  for (const auto& r : rounds)
    for (const auto& g : r.constraints) parts.push_back(sublevel_set(g));
  return Intersection{std::move(parts)};
}

namespace detail {

inline Vector set_center(const FeasibleSet& K) {
  if (const auto* box = K.get_if<Box>()) return 0.5 * (box->lo + box->hi);
  if (const auto* ball = K.get_if<Ball>()) return ball->center;
  return Vector::Zero(K.dimension());
}

}  // namespace detail

/// Offline projected subgradient with normalized steps r_s / sqrt(k) and
/// restarts from the best iterate with r_{s+1} = r_s / 2. The reported gap
/// is the standard bound for the first stage,
///   G (D^2 + sum a_k^2) / (2 sum a_k),  G = sum_t L_t,
/// which later stages can only improve on. An empty hindsight set yields
/// `feasible == false`.
inline ComparatorResult comparator_solve(std::span<const Round> rounds, const FeasibleSet& K,
                                         const ComparatorSettings& settings = {}) {
  clasp::detail::require(!rounds.empty(), "comparator_solve: no rounds");
  clasp::detail::require(settings.stages >= 1, "comparator_solve: at least one stage");
  const Projector project_hindsight(hindsight_set(rounds, K));

  ComparatorResult result;
  ProjectionResult start = project_hindsight(detail::set_center(K), settings.projection);
  if (start.infeasible) return result;

  double diameter = 0.0;
  try {
    diameter = set_diameter(K);
  } catch (const DiameterUnavailable&) {
    diameter = 1.0;
  }
  double lipschitz = 0.0;
  for (const auto& r : rounds) lipschitz += r.loss.lipschitz_bound();

  Vector best = start.point;
  double best_value = total_loss(rounds, best);
  const std::size_t per_stage = std::max<std::size_t>(1, settings.iterations / settings.stages);
  double stage0_sum = 0.0;
  double stage0_sum_sq = 0.0;
  double radius = diameter;
  for (std::size_t stage = 0; stage < settings.stages; ++stage, radius *= 0.5) {
    Vector x = best;
    for (std::size_t k = 1; k <= per_stage; ++k) {
      Vector g = Vector::Zero(x.size());
      for (const auto& r : rounds) g += r.loss.subgradient(x);
      const double norm = g.norm();
      ++result.iterations;
      if (norm == 0.0) {
        // 0 is in the subdifferential of the sum: x is a global minimizer.
        result.feasible = true;
        result.point = x;
        result.objective = total_loss(rounds, x);
        result.gap_bound = 0.0;
        return result;
      }
      const double step = radius / std::sqrt(static_cast<double>(k));
      if (stage == 0) {
        stage0_sum += step;
        stage0_sum_sq += step * step;
      }
      ProjectionResult next = project_hindsight(x - (step / norm) * g, settings.projection);
      if (next.infeasible) return result;
      x = std::move(next.point);
      const double value = total_loss(rounds, x);
      if (value < best_value) {
        best_value = value;
        best = x;
      }
    }
  }
  result.feasible = true;
  result.point = std::move(best);
  result.objective = best_value;
  result.gap_bound = stage0_sum > 0.0
                         ? lipschitz * (diameter * diameter + stage0_sum_sq) / (2.0 * stage0_sum)
                         : std::numeric_limits<double>::infinity();
  return result;
}

/// Exact comparator for one-dimensional instances whose losses are
/// Quadratic1D and whose constraints are affine: the hindsight set is an
/// interval and the minimizer of sum (x - c_t)^2 over it is the clamped
/// mean of the centers. Rounds can be added incrementally, so prefix
/// comparators x*_1, x*_2, ... cost O(1) each.
class IntervalQuadraticComparator {
 public:
  explicit IntervalQuadraticComparator(const FeasibleSet& K) {
    const auto* box = K.get_if<Box>();
    clasp::detail::require(box != nullptr && K.dimension() == 1,
                           "interval comparator: K must be a one-dimensional box");
    lo_ = box->lo(0);
    hi_ = box->hi(0);
  }

  void add(const Round& round) {
    const auto* loss = std::get_if<Quadratic1D>(&round.loss.family());
    clasp::detail::require(loss != nullptr, "interval comparator: losses must be Quadratic1D");
    ++count_;
    sum_ += loss->center;
    sum_sq_ += loss->center * loss->center;
    for (const auto& g : round.constraints) {
      const auto* affine = std::get_if<Affine>(&g.family());
      clasp::detail::require(affine != nullptr, "interval comparator: constraints must be affine");
      const double a = affine->a(0);
      const double b = affine->b;
      if (a > 0.0) {
        hi_ = std::min(hi_, b / a);
      } else if (a < 0.0) {
        lo_ = std::max(lo_, b / a);
      } else if (b < 0.0) {
        empty_ = true;
      }
    }
  }

  ComparatorResult current() const {
    ComparatorResult result;
    result.iterations = 0;
    if (empty_ || lo_ > hi_ || count_ == 0) return result;
    const double mean = sum_ / static_cast<double>(count_);
    const double x = std::clamp(mean, lo_, hi_);
    result.feasible = true;
    result.point = Vector::Constant(1, x);
    result.objective = sum_sq_ - 2.0 * x * sum_ + static_cast<double>(count_) * x * x;
    result.gap_bound = 0.0;
    return result;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = false;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

inline ComparatorResult interval_quadratic_comparator(std::span<const Round> rounds,
                                                      const FeasibleSet& K) {
  IntervalQuadraticComparator comparator(K);
  for (const auto& r : rounds) comparator.add(r);
  return comparator.current();
}

}  // namespace clasp::harness
