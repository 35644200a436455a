#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "clasp/geometry.hpp"
#include "clasp/oracles.hpp"

namespace clasp {

/// What the adversary reveals after the learner commits to x_t: the loss
/// f_t and one or more constraints g_{t;m}.
struct Round {
  ConvexOracle loss;
  std::vector<ConvexOracle> constraints;

  /// max_m g_{t;m}^+(x); with a single constraint this is g_t^+(x).
  double violation(const Vector& x) const {
    double worst = 0.0;
    for (const auto& g : constraints) worst = std::max(worst, g.positive_part(x));
    return worst;
  }
};

/// Produces round t after seeing the committed action x_t. Sources that
/// ignore x_t model an oblivious adversary.
using RoundSource = std::function<Round(std::size_t t, const Vector& x_t)>;

struct RoundLog {
  Vector action;           ///< x_t
  double loss = 0.0;       ///< f_t(x_t)
  double violation = 0.0;  ///< g_t^+(x_t)
  double eta = 0.0;        ///< step size used after round t
  std::optional<double> dist_action;         ///< d_{K_t}(x_t)
  std::optional<double> dist_gradient_step;  ///< d_{K_t}(x^_{t+1})
  Vector gradient_step;                      ///< x^_{t+1}, empty when not tracked
  /// x_{t+1}. For t = T this point is computed for the diagnostics but
  /// never played.
  Vector next_action;
  bool projection_converged = true;
};

/// A run's trajectory plus the cumulative metrics filled by
/// harness::compute_metrics.
struct RunRecord {
  std::vector<Round> rounds;
  std::vector<RoundLog> log;
  bool persistent = false;

  std::vector<double> cum_loss;
  std::vector<double> ccv1;      ///< sum g_t^+(x_t)
  std::vector<double> ccv2;      ///< sum (g_t^+(x_t))^2
  std::vector<double> ccv_hist;  ///< sum_t sum_{tau<=t} (g_tau^+(x_t))^2, persistent runs only
  /// Running regret against the final comparator x*_T; the last entry is
  /// Regret_T. Empty when no comparator exists.
  std::vector<double> regret;
  std::optional<Vector> comparator;

  std::size_t horizon() const noexcept { return log.size(); }
  bool has_diagnostics() const {
    return !log.empty() && std::all_of(log.begin(), log.end(), [](const RoundLog& r) {
      return r.dist_action.has_value() && r.dist_gradient_step.has_value();
    });
  }
};

}  // namespace clasp
