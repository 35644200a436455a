#pragma once

// Cumulative metrics (loss, regret, CCV_{T,1}, CCV_{T,2}, CCV^hist), the
// explicit non-asymptotic bounds on them, log-log rate fitting, and
// aggregation across trials.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clasp/clasp.hpp"
#include "clasp/errors.hpp"
#include "clasp/record.hpp"

namespace clasp::harness {

/// Fills the cumulative series of `record`. CCV_{T,2} is computed a
/// posteriori from the logged violations. Regret is filled only when a
/// comparator is given; CCV^hist only for persistent-mode runs.
inline RunRecord compute_metrics(RunRecord record, const std::optional<Vector>& comparator = {}) {
  const std::size_t T = record.horizon();
  record.cum_loss.assign(T, 0.0);
  record.ccv1.assign(T, 0.0);
  record.ccv2.assign(T, 0.0);
  record.regret.clear();
  record.ccv_hist.clear();
  record.comparator = comparator;

  double loss = 0.0, ccv1 = 0.0, ccv2 = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& entry = record.log[t];
    loss += entry.loss;
    ccv1 += entry.violation;
    ccv2 += entry.violation * entry.violation;
    record.cum_loss[t] = loss;
    record.ccv1[t] = ccv1;
    record.ccv2[t] = ccv2;
  }

  if (comparator) {
    record.regret.assign(T, 0.0);
    double comparator_loss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      comparator_loss += record.rounds[t].loss.value(*comparator);
      record.regret[t] = record.cum_loss[t] - comparator_loss;
    }
  }

  if (record.persistent) {
    record.ccv_hist.assign(T, 0.0);
    double hist = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const Vector& x = record.log[t].action;
      for (std::size_t tau = 0; tau <= t; ++tau) {
        const double v = record.rounds[tau].violation(x);
        hist += v * v;
      }
      record.ccv_hist[t] = hist;
    }
  }
  return record;
}

/// Instance constants: diameter D of K, common Lipschitz bound L of losses
/// and constraints on K, and theta with eta_t^2 <= theta eta_t.
struct BoundConstants {
  double diameter = 0.0;
  double lipschitz = 0.0;
  double theta = 1.0;
};

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Checks the explicit inequalities at horizon T (0 means the full record)
/// against the comparator x*_T for that horizon:
///
///   regret_convex           Regret_T <= D^2 T^beta / 2 + (L^2/2) sum t^-beta
///   regret_strongly_convex  Regret_T <= (L^2/2) sum 1/t
///   regret_step_sum         Regret_T <= (L^2/2) sum eta_t   (strongly convex)
///   lemma1                  sum d(x^_{t+1})^2 <= |x_1 - x*|^2 + (2LD + theta L^2) sum eta_t
///   lemma2                  sum d(x_t)^2 <= 2 sum d(x^_{t+1})^2 + 2 theta L^2 sum eta_t
///   lemma3                  CCV_{T,2} <= L^2 sum d(x_t)^2
///   ccv2_chain              CCV_{T,2} <= L^2 (2|x_1 - x*|^2 + (4LD + 4 theta L^2) sum eta_t)
///
/// with distances to K_t. Each check passes when lhs <= rhs + slack.
inline std::vector<BoundCheck> verify_bounds(const RunRecord& record, const BoundConstants& constants,
                                             const StepSchedule& schedule, const Vector& comparator,
                                             std::size_t horizon = 0, double slack = 0.0) {
  if (!record.has_diagnostics()) {
    throw MissingDiagnostics("verify_bounds: record lacks distance diagnostics");
  }
  const std::size_t T = horizon == 0 ? record.horizon() : horizon;
  clasp::detail::require(T <= record.horizon(), "verify_bounds: horizon exceeds the record");
  clasp::detail::require(comparator.size() == record.log.front().action.size(),
                         "verify_bounds: comparator dimension mismatch");

  const double D = constants.diameter;
  const double L = constants.lipschitz;
  const double theta = constants.theta;
  const double L2 = L * L;

  double regret = 0.0, sum_eta = 0.0, sum_dist_hat = 0.0, sum_dist = 0.0, ccv2 = 0.0;
  double sum_harmonic = 0.0, sum_power = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    const auto& entry = record.log[i];
    const double t = static_cast<double>(i + 1);
    regret += entry.loss - record.rounds[i].loss.value(comparator);
    sum_eta += entry.eta;
    sum_dist_hat += *entry.dist_gradient_step * *entry.dist_gradient_step;
    sum_dist += *entry.dist_action * *entry.dist_action;
    ccv2 += entry.violation * entry.violation;
    sum_harmonic += 1.0 / t;
    if (schedule.is_convex()) sum_power += std::pow(t, -schedule.parameter());
  }
  const double start_gap = (record.log.front().action - comparator).squaredNorm();

  std::vector<BoundCheck> checks;
  auto add = [&](std::string name, double lhs, double rhs) {
    checks.push_back({std::move(name), lhs, rhs, lhs <= rhs + slack});
  };
  if (schedule.is_convex()) {
    const double beta = schedule.parameter();
    add("regret_convex", regret,
        D * D * std::pow(static_cast<double>(T), beta) / 2.0 + L2 / 2.0 * sum_power);
  } else {
    add("regret_strongly_convex", regret, L2 / 2.0 * sum_harmonic);
    add("regret_step_sum", regret, L2 / 2.0 * sum_eta);
  }
  add("lemma1", sum_dist_hat, start_gap + (2.0 * L * D + theta * L2) * sum_eta);
  add("lemma2", sum_dist, 2.0 * sum_dist_hat + 2.0 * theta * L2 * sum_eta);
  add("lemma3", ccv2, L2 * sum_dist);
  add("ccv2_chain", ccv2, L2 * (2.0 * start_gap + (4.0 * L * D + 4.0 * theta * L2) * sum_eta));
  return checks;
}

/// Least-squares slope of log(value) against log(T).
inline double fit_rate(std::span<const std::pair<double, double>> series) {
  clasp::detail::require(series.size() >= 3, "fit_rate: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto [T, value] = series[i];
    clasp::detail::require(T > 0.0 && value > 0.0, "fit_rate: horizons and values must be positive");
    if (i > 0) clasp::detail::require(T > series[i - 1].first, "fit_rate: horizons must increase");
    sx += std::log(T);
    sy += std::log(value);
  }
  const double n = static_cast<double>(series.size());
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [T, value] : series) {
    const double dx = std::log(T) - mx;
    sxy += dx * (std::log(value) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct MetricSeries {
  std::string name;
  std::vector<double> mean;
  std::vector<double> ci95;  ///< 1.96 sd / sqrt(n), sample sd; 0 for n = 1
};

struct TrialSummary {
  std::size_t trials = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricSeries> metrics;

  const MetricSeries* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
};

namespace detail {

inline MetricSeries summarize(std::string name, std::span<const std::vector<double>* const> columns) {
  const std::size_t T = columns.front()->size();
  const double n = static_cast<double>(columns.size());
  MetricSeries series{std::move(name), std::vector<double>(T), std::vector<double>(T)};
  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (const auto* c : columns) sum += (*c)[t];
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto* c : columns) sq += ((*c)[t] - mean) * ((*c)[t] - mean);
    series.mean[t] = mean;
    series.ci95[t] = columns.size() > 1 ? 1.96 * std::sqrt(sq / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  return series;
}

}  // namespace detail

/// Per-round mean and normal-approximation 95% half-width for cum_loss,
/// ccv1, ccv2, plus regret and ccv_hist when every record carries them.
inline TrialSummary aggregate_trials(std::span<const RunRecord> records,
                                     std::vector<std::uint64_t> seeds = {}) {
  clasp::detail::require(!records.empty(), "aggregate_trials: no records");
  const std::size_t T = records.front().horizon();
  for (const auto& r : records) {
    clasp::detail::require(r.horizon() == T, "aggregate_trials: records differ in horizon");
    clasp::detail::require(r.cum_loss.size() == T, "aggregate_trials: run compute_metrics first");
  }
  TrialSummary summary;
  summary.trials = records.size();
  summary.seeds = std::move(seeds);

  auto collect = [&](std::string name, auto member) {
    std::vector<const std::vector<double>*> columns;
    for (const auto& r : records) {
      if ((r.*member).size() != T) return;
      columns.push_back(&(r.*member));
    }
    summary.metrics.push_back(detail::summarize(std::move(name), columns));
  };
  collect("cum_loss", &RunRecord::cum_loss);
  collect("regret", &RunRecord::regret);
  collect("ccv1", &RunRecord::ccv1);
  collect("ccv2", &RunRecord::ccv2);
  collect("ccv_hist", &RunRecord::ccv_hist);
  return summary;
}

/// Summary of plain per-trial values (one column): same estimator.
inline MetricSeries summarize_values(std::string name, const std::vector<double>& values) {
  clasp::detail::require(!values.empty(), "summarize_values: no values");
  std::vector<std::vector<double>> columns;
  columns.reserve(values.size());
  for (double v : values) columns.push_back({v});
  std::vector<const std::vector<double>*> pointers;
  for (const auto& c : columns) pointers.push_back(&c);
  return detail::summarize(std::move(name), pointers);
}

}  // namespace clasp::harness
