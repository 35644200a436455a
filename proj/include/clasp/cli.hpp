#pragma once

// Command-line front end. `run` executes seeded trials and writes
// trials.csv / summary.csv; `verify` checks the explicit regret and
// constraint-violation bounds on a geometric grid of horizons.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure or infeasibility.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clasp/errors.hpp"
#include "clasp/harness/experiment.hpp"

namespace clasp::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Rounds used by the long-horizon linear regression preset when --rounds
/// is not given.
inline constexpr std::size_t kLongHorizonRounds = 10000;

class UsageError : public std::invalid_argument {
 public:
  UsageError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Thrown for --help; carries the formatted help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kRun, kVerify };

struct RunConfig {
  Command command = Command::kRun;
  harness::Algorithm algorithm = harness::Algorithm::kClasp;
  harness::Problem problem = harness::Problem::kLinreg;
  StepSchedule schedule = StepSchedule::convex(0.5);
  ConstraintMode mode = ConstraintMode::kTransient;
  std::size_t rounds = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  ProjectionSettings projection;
  std::string dataset;
  std::string output = ".";
  std::size_t workers = 1;
  bool comparator = false;
  std::size_t comparator_iterations = 2000;
};

namespace detail {

template <typename E>
const std::map<std::string, E>& choices();

template <>
inline const std::map<std::string, harness::Algorithm>& choices() {
  static const std::map<std::string, harness::Algorithm> m{
      {"clasp", harness::Algorithm::kClasp},
      {"recoo", harness::Algorithm::kRecoo},
      {"dpp-adagrad", harness::Algorithm::kDppAdagrad},
      {"switch", harness::Algorithm::kSwitch}};
  return m;
}

template <>
inline const std::map<std::string, harness::Problem>& choices() {
  static const std::map<std::string, harness::Problem> m{
      {"linreg", harness::Problem::kLinreg},
      {"linreg-long", harness::Problem::kLinregLong},
      {"svm", harness::Problem::kSvm},
      {"synthetic-1d", harness::Problem::kSynthetic1D}};
  return m;
}

template <>
inline const std::map<std::string, ConstraintMode>& choices() {
  static const std::map<std::string, ConstraintMode> m{
      {"transient", ConstraintMode::kTransient},
      {"persistent", ConstraintMode::kPersistent},
      {"multi", ConstraintMode::kMultiTransient}};
  return m;
}

template <typename E>
E lookup(const std::string& key, const std::string& value) {
  const auto& m = choices<E>();
  if (auto it = m.find(value); it != m.end()) return it->second;
  std::string allowed;
  for (const auto& [name, _] : m) allowed += (allowed.empty() ? "" : ", ") + name;
  throw UsageError(key, "unknown value '" + value + "' (expected one of: " + allowed + ")");
}

}  // namespace detail

/// Parses argv. Options may come from a flat key=value file given with
/// --config; command-line flags take precedence and unknown keys are
/// rejected. Throws UsageError, or HelpRequested for --help.
inline RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Constrained online convex optimization benchmarks", "clasp_bench"};
  app.require_subcommand(1, 1);
  app.allow_config_extras(false);
  app.set_config("--config", "", "Flat key=value configuration file");

  std::string algo = "clasp", problem = "linreg", mode = "transient";
  double beta = 0.5, modulus = 0.0, tol = 1e-8;
  long long rounds = 1000, trials = 100, max_iter = 10000, workers = 1, comparator_iters = 2000;
  std::uint64_t seed = 1;
  std::string dataset, output = ".";
  bool comparator = false;

  app.add_option("--algo,--algorithm", algo, "clasp | recoo | dpp-adagrad | switch");
  app.add_option("--problem", problem, "linreg | linreg-long | svm | synthetic-1d");
  auto* o_beta = app.add_option("--beta", beta, "Convex step exponent, eta_t = t^-beta");
  auto* o_m = app.add_option("--m", modulus, "Strong convexity modulus, eta_t = 1/(m t)");
  app.add_option("--mode", mode, "transient | persistent | multi");
  auto* o_rounds = app.add_option("--rounds", rounds, "Horizon T");
  app.add_option("--trials", trials, "Number of seeded trials");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--tol", tol, "Projection tolerance");
  app.add_option("--max-iter,--max_iter", max_iter, "Projection iteration cap");
  app.add_option("--dataset", dataset, "Wine quality file (svm)");
  app.add_option("--out,--output", output, "Output directory");
  app.add_option("--workers", workers, "Worker threads");
  app.add_flag("--comparator", comparator, "Compute the offline comparator (linreg, svm)");
  app.add_option("--comparator-iter", comparator_iters, "Comparator iterations");

  app.add_subcommand("run", "Execute trials and write CSV output")->fallthrough();
  auto* verify = app.add_subcommand("verify", "Check the explicit bounds on a horizon grid")->fallthrough();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::Error& e) {
    throw UsageError("arguments", e.what());
  }

  RunConfig config;
  config.command = verify->parsed() ? Command::kVerify : Command::kRun;
  config.algorithm = detail::lookup<harness::Algorithm>("algo", algo);
  config.problem = detail::lookup<harness::Problem>("problem", problem);
  config.mode = detail::lookup<ConstraintMode>("mode", mode);

  if (o_beta->count() > 0 && o_m->count() > 0) {
    throw UsageError("beta", "conflicts with m; choose one step schedule");
  }
  if (o_m->count() > 0) {
    if (!(modulus > 0.0) || !std::isfinite(modulus)) throw UsageError("m", "must be > 0");
    config.schedule = StepSchedule::strongly_convex(modulus);
  } else {
    if (!(beta > 0.0 && beta < 1.0)) throw UsageError("beta", "must lie in (0, 1)");
    config.schedule = StepSchedule::convex(beta);
  }

  if (rounds < 1) throw UsageError("rounds", "must be >= 1");
  if (trials < 1) throw UsageError("trials", "must be >= 1");
  if (!(tol > 0.0)) throw UsageError("tol", "must be > 0");
  if (max_iter < 1) throw UsageError("max-iter", "must be >= 1");
  if (workers < 1) throw UsageError("workers", "must be >= 1");
  if (comparator_iters < 1) throw UsageError("comparator-iter", "must be >= 1");

  config.rounds = static_cast<std::size_t>(rounds);
  if (config.problem == harness::Problem::kLinregLong && o_rounds->count() == 0) {
    config.rounds = kLongHorizonRounds;
  }
  config.trials = static_cast<std::size_t>(trials);
  config.seed = seed;
  config.projection.tol = tol;
  config.projection.max_iter = static_cast<std::size_t>(max_iter);
  config.dataset = dataset;
  config.output = output;
  config.workers = static_cast<std::size_t>(workers);
  config.comparator = comparator;
  config.comparator_iterations = static_cast<std::size_t>(comparator_iters);

  if (config.problem == harness::Problem::kLinregLong &&
      config.algorithm == harness::Algorithm::kSwitch) {
    throw UsageError("algo", "switch is excluded from the linreg-long preset");
  }
  if (config.problem == harness::Problem::kSvm && config.dataset.empty()) {
    throw UsageError("dataset", "the svm problem requires --dataset");
  }
  if (config.problem != harness::Problem::kSvm && !config.dataset.empty()) {
    throw UsageError("dataset", "only the svm problem reads a dataset");
  }
  if (config.mode == ConstraintMode::kMultiTransient &&
      config.problem != harness::Problem::kLinreg && config.problem != harness::Problem::kLinregLong) {
    throw UsageError("mode", "multi mode needs a multi-row constraint (linreg problems)");
  }
  if (config.algorithm != harness::Algorithm::kClasp && config.mode != ConstraintMode::kTransient) {
    throw UsageError("mode", "baselines run in transient mode only");
  }
  if (config.command == Command::kVerify && config.algorithm != harness::Algorithm::kClasp) {
    throw UsageError("algo", "verify applies to clasp only");
  }
  return config;
}

inline harness::ExperimentSpec to_spec(const RunConfig& config) {
  harness::ExperimentSpec spec;
  spec.algorithm = config.algorithm;
  spec.problem = config.problem;
  spec.schedule = config.schedule;
  spec.mode = config.mode;
  spec.rounds = config.rounds;
  spec.trials = config.trials;
  spec.seed = config.seed;
  spec.projection = config.projection;
  spec.workers = config.workers;
  spec.compute_comparator = config.comparator;
  spec.comparator.iterations = config.comparator_iterations;
  spec.comparator.projection = config.projection;
  if (config.problem == harness::Problem::kSvm) {
    spec.dataset = std::make_shared<const std::vector<harness::WineSample>>(
        harness::load_wine_dataset(config.dataset));
  }
  return spec;
}

namespace detail {

inline std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

inline std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

}  // namespace detail

/// trial,t,cum_loss,regret_or_blank,ccv1,ccv2,eta,dist_xt,dist_xhat
inline void write_trials_csv(std::ostream& out, const std::vector<harness::TrialResult>& results) {
  out << "trial,t,cum_loss,regret_or_blank,ccv1,ccv2,eta,dist_xt,dist_xhat\n";
  for (const auto& result : results) {
    const RunRecord& r = result.record;
    for (std::size_t i = 0; i < r.horizon(); ++i) {
      const auto& entry = r.log[i];
      out << result.trial << ',' << (i + 1) << ',' << detail::format_number(r.cum_loss[i]) << ','
          << (r.regret.empty() ? std::string() : detail::format_number(r.regret[i])) << ','
          << detail::format_number(r.ccv1[i]) << ',' << detail::format_number(r.ccv2[i]) << ','
          << detail::format_number(entry.eta) << ',' << detail::format_optional(entry.dist_action)
          << ',' << detail::format_optional(entry.dist_gradient_step) << '\n';
    }
  }
}

/// t,metric,mean,ci95 grouped by metric.
inline void write_summary_csv(std::ostream& out, const harness::TrialSummary& summary) {
  out << "t,metric,mean,ci95\n";
  for (const auto& series : summary.metrics) {
    for (std::size_t i = 0; i < series.mean.size(); ++i) {
      out << (i + 1) << ',' << series.name << ',' << detail::format_number(series.mean[i]) << ','
          << detail::format_number(series.ci95[i]) << '\n';
    }
  }
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline std::string comparator_note(const std::vector<harness::TrialResult>& results) {
  std::size_t infeasible = 0, computed = 0;
  for (const auto& r : results) {
    if (!r.comparator) continue;
    ++computed;
    if (!r.comparator->feasible) ++infeasible;
  }
  if (computed == 0) return "comparator: not computed (regret column left blank)";
  if (infeasible == 0) return "comparator: feasible in all " + std::to_string(computed) + " trials";
  return "comparator: infeasible in " + std::to_string(infeasible) + " of " +
         std::to_string(computed) + " trials (regret column left blank there)";
}

}  // namespace detail

inline int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const harness::ExperimentSpec spec = to_spec(config);
  const auto results = harness::run_trials(spec);
  const auto summary = harness::summarize(results);

  std::filesystem::create_directories(config.output);
  std::ostringstream trials, summary_csv;
  write_trials_csv(trials, results);
  write_summary_csv(summary_csv, summary);
  const std::filesystem::path dir(config.output);
  detail::write_file(dir / "trials.csv", trials.str());
  detail::write_file(dir / "summary.csv", summary_csv.str());

  out << harness::name(config.algorithm) << " on " << harness::name(config.problem) << ": "
      << config.trials << " trials x " << config.rounds << " rounds\n";
  for (const char* metric : {"cum_loss", "regret", "ccv1", "ccv2", "ccv_hist"}) {
    if (const auto* s = summary.find(metric)) {
      out << "  " << metric << "(T) = " << detail::format_number(s->mean.back()) << " +/- "
          << detail::format_number(s->ci95.back()) << '\n';
    }
  }
  out << "  " << detail::comparator_note(results) << '\n';
  out << "wrote " << (dir / "trials.csv").string() << " and " << (dir / "summary.csv").string()
      << '\n';
  (void)err;
  return kExitSuccess;
}

/// Powers of two from 2^8 up to T (T itself closes the grid when it is
/// not a power of two).
inline std::vector<std::size_t> horizon_grid(std::size_t T) {
  std::vector<std::size_t> grid;
  for (std::size_t h = 256; h <= T; h *= 2) grid.push_back(h);
  if (grid.empty() || grid.back() != T) grid.push_back(T);
  return grid;
}

inline int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  harness::ExperimentSpec spec = to_spec(config);
  const auto grid = horizon_grid(config.rounds);
  bool all_pass = true;
  std::vector<double> mean_ccv2(grid.size(), 0.0);

  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    harness::ProblemInstance instance = harness::make_instance(spec, trial);
    const RunRecord record = clasp::run(instance.source, instance.K, spec.schedule, spec.mode,
                                        spec.rounds, instance.x1, spec.projection);

    std::optional<harness::IntervalQuadraticComparator> exact;
    if (spec.problem == harness::Problem::kSynthetic1D) exact.emplace(instance.K);
    std::size_t added = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const std::size_t h = grid[k];
      const std::span<const Round> prefix(record.rounds.data(), h);
      harness::ComparatorResult comparator;
      if (exact) {
        for (; added < h; ++added) exact->add(record.rounds[added]);
        comparator = exact->current();
      } else {
        comparator = harness::comparator_solve(prefix, instance.K, spec.comparator);
      }
      if (!comparator.feasible) {
        err << "trial " << trial << ", T = " << h
            << ": comparator infeasible (the hindsight set K ∩ C_1 ∩ ... ∩ C_T is empty); "
               "the bounds do not apply\n";
        return kExitRuntime;
      }
      const double slack = 1e-6 * static_cast<double>(h);
      for (const auto& check : harness::verify_bounds(record, instance.constants, spec.schedule,
                                                      comparator.point, h, slack)) {
        if (!check.pass) all_pass = false;
        if (trial == 0 || !check.pass) {
          out << "trial " << trial << " T=" << h << ' ' << check.name
              << ": lhs=" << detail::format_number(check.lhs)
              << " rhs=" << detail::format_number(check.rhs) << (check.pass ? " PASS" : " FAIL")
              << '\n';
        }
      }
      double ccv2 = 0.0;
      for (std::size_t i = 0; i < h; ++i) ccv2 += record.log[i].violation * record.log[i].violation;
      mean_ccv2[k] += ccv2 / static_cast<double>(spec.trials);
    }
  }

  std::vector<std::pair<double, double>> series;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (mean_ccv2[k] > 0.0) series.emplace_back(static_cast<double>(grid[k]), mean_ccv2[k]);
  }
  if (series.size() >= 3) {
    const double slope = harness::fit_rate(series);
    out << "ccv2 log-log slope over the grid: " << detail::format_number(slope);
    if (spec.schedule.is_convex()) {
      const double limit = 1.0 - spec.schedule.parameter() + 0.1;
      const bool pass = slope <= limit;
      all_pass = all_pass && pass;
      out << " (limit " << detail::format_number(limit) << ")" << (pass ? " PASS" : " FAIL");
    }
    out << '\n';
  } else {
    out << "ccv2 slope: not enough positive grid points to fit\n";
  }
  out << (all_pass ? "all bounds hold\n" : "some bounds FAILED\n");
  return all_pass ? kExitSuccess : kExitRuntime;
}

/// Full entry point with exit-code mapping.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr) {
  RunConfig config;
  try {
    config = parse_config(argc, argv);
  } catch (const HelpRequested& e) {
    out << e.what();
    return kExitSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    return config.command == Command::kRun ? cmd_run(config, out, err) : cmd_verify(config, out, err);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const ParseError& e) {
    err << "dataset error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace clasp::cli
