#pragma once

// Seeded multi-trial experiment driver shared by the CLI and the
// acceptance suite. Trial i draws everything from
// Rng::for_trial(master_seed, i), so results do not depend on the worker
// count or on completion order.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "clasp/baselines.hpp"
#include "clasp/clasp.hpp"
#include "clasp/harness/comparator.hpp"
#include "clasp/harness/metrics.hpp"
#include "clasp/harness/problems.hpp"
#include "clasp/random.hpp"

namespace clasp::harness {

enum class Algorithm { kClasp, kRecoo, kDppAdagrad, kSwitch };
enum class Problem { kLinreg, kLinregLong, kSvm, kSynthetic1D };

inline std::string_view name(Algorithm a) {
  switch (a) {
    case Algorithm::kClasp: return "clasp";
    case Algorithm::kRecoo: return "recoo";
    case Algorithm::kDppAdagrad: return "dpp-adagrad";
    case Algorithm::kSwitch: return "switch";
  }
  return "unknown";
}

inline std::string_view name(Problem p) {
  switch (p) {
    case Problem::kLinreg: return "linreg";
    case Problem::kLinregLong: return "linreg-long";
    case Problem::kSvm: return "svm";
    case Problem::kSynthetic1D: return "synthetic-1d";
  }
  return "unknown";
}

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::kClasp;
  Problem problem = Problem::kLinreg;
  StepSchedule schedule = StepSchedule::convex(0.5);
  ConstraintMode mode = ConstraintMode::kTransient;
  std::size_t rounds = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  ProjectionSettings projection;
  std::shared_ptr<const std::vector<WineSample>> dataset;  ///< svm only
  /// Run the offline comparator (linreg, svm). synthetic-1d always uses
  /// its exact interval comparator.
  bool compute_comparator = false;
  ComparatorSettings comparator;
  std::size_t workers = 1;
};

struct ProblemInstance {
  FeasibleSet K;
  RoundSource source;
  Vector x1;
  BoundConstants constants;
};

/// Builds trial `trial`'s instance: x_1 is drawn first, then the round
/// stream gets its own generator seeded from the trial stream.
inline ProblemInstance make_instance(const ExperimentSpec& spec, std::size_t trial) {
  Rng rng = Rng::for_trial(spec.seed, trial);
  const double theta = spec.schedule.theta();
  switch (spec.problem) {
    case Problem::kLinreg:
    case Problem::kLinregLong: {
      Vector x1 = uniform_start(rng, LinearRegressionShape::kDimension, 0.0, 1.0);
      auto stream = std::make_shared<Rng>(rng.next());
      const bool split = spec.mode == ConstraintMode::kMultiTransient &&
                         spec.algorithm == Algorithm::kClasp;
      RoundSource source = [stream, split](std::size_t, const Vector&) {
        Round round = gen_linear_regression_round(*stream);
        if (split) round.constraints = split_rows(round.constraints.front());
        return round;
      };
      const FeasibleSet K = linear_regression_domain();
      return {K, std::move(source), std::move(x1),
              {set_diameter(K), linear_regression_lipschitz(), theta}};
    }
    case Problem::kSvm: {
      clasp::detail::require(spec.dataset && !spec.dataset->empty(),
                             "svm experiment requires a loaded dataset");
      Vector x1 = uniform_start(rng, SvmShape::kDimension, -1.0, 1.0);
      auto order = std::make_shared<const std::vector<std::size_t>>(
          shuffled_indices(spec.dataset->size(), rng));
      auto data = spec.dataset;
      RoundSource source = [data, order](std::size_t t, const Vector&) {
        return gen_svm_round((*data)[(*order)[(t - 1) % order->size()]]);
      };
      const FeasibleSet K = svm_domain();
      return {K, std::move(source), std::move(x1), {set_diameter(K), svm_radius(), theta}};
    }
    case Problem::kSynthetic1D: {
      Vector x1 = uniform_start(rng, 1, 0.0, 1.0);
      RoundSource source = Synthetic1D::source(Rng(rng.next()));
      return {Synthetic1D::domain(), std::move(source), std::move(x1),
              {Synthetic1D::kDiameter, Synthetic1D::kLipschitz, theta}};
    }
  }
  throw ContractViolation("make_instance: unknown problem");
}

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  RunRecord record;
  std::optional<ComparatorResult> comparator;
  BoundConstants constants;
};

inline baselines::Algorithm to_baseline(Algorithm a) {
  switch (a) {
    case Algorithm::kRecoo: return baselines::Algorithm::kRecoo;
    case Algorithm::kDppAdagrad: return baselines::Algorithm::kDppAdagrad;
    case Algorithm::kSwitch: return baselines::Algorithm::kSwitch;
    case Algorithm::kClasp: break;
  }
  throw ContractViolation("not a baseline algorithm");
}

inline TrialResult run_trial(const ExperimentSpec& spec, std::size_t trial) {
  clasp::detail::require(spec.rounds >= 1, "experiment: rounds must be >= 1");
  ProblemInstance instance = make_instance(spec, trial);
  TrialResult result;
  result.trial = trial;
  result.seed = Rng::derive_seed(spec.seed, trial);
  result.constants = instance.constants;

  RunRecord record;
  if (spec.algorithm == Algorithm::kClasp) {
    record = clasp::run(instance.source, instance.K, spec.schedule, spec.mode, spec.rounds,
                        instance.x1, spec.projection);
  } else {
    baselines::BaselineConfig config;
    if (spec.schedule.is_convex()) config.schedule = spec.schedule;
    record = baselines::run(to_baseline(spec.algorithm), instance.source, instance.K, spec.rounds,
                            instance.x1, spec.projection, config);
  }

  if (spec.problem == Problem::kSynthetic1D) {
    result.comparator = interval_quadratic_comparator(record.rounds, instance.K);
  } else if (spec.compute_comparator) {
    result.comparator = comparator_solve(record.rounds, instance.K, spec.comparator);
  }
  std::optional<Vector> point;
  if (result.comparator && result.comparator->feasible) point = result.comparator->point;
  result.record = compute_metrics(std::move(record), point);
  return result;
}

/// Runs every trial on a pool of `spec.workers` threads. Results are
/// indexed by trial; the first failing trial's exception is rethrown.
inline std::vector<TrialResult> run_trials(const ExperimentSpec& spec) {
  clasp::detail::require(spec.trials >= 1, "experiment: trials must be >= 1");
  std::vector<TrialResult> results(spec.trials);
  std::vector<std::exception_ptr> errors(spec.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.trials; i = next++) {
      try {
        results[i] = run_trial(spec, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.workers, spec.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline TrialSummary summarize(const std::vector<TrialResult>& results) {
  std::vector<RunRecord> records;
  std::vector<std::uint64_t> seeds;
  records.reserve(results.size());
  for (const auto& r : results) {
    records.push_back(r.record);
    seeds.push_back(r.seed);
  }
  return aggregate_trials(records, std::move(seeds));
}

}  // namespace clasp::harness
