#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "clasp/harness/experiment.hpp"
#include "support/oracles.hpp"
#include "support/random_sets.hpp"

using namespace clasp;
using namespace clasp::harness;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Vector scalar(double x) { return Vector::Constant(1, x); }

const char* kHeader =
    "\"fixed acidity\";\"volatile acidity\";\"citric acid\";\"residual sugar\";\"chlorides\";"
    "\"free sulfur dioxide\";\"total sulfur dioxide\";\"density\";\"pH\";\"sulphates\";"
    "\"alcohol\";\"quality\"\n";

Round quadratic_round(double center, std::optional<double> upper = {}) {
  Round r{make_quadratic_1d(center, 2.0), {}};
  r.constraints.push_back(make_affine(scalar(1), upper.value_or(1e9)));
  return r;
}

/// A raw trajectory with the given per-round violations and unit losses.
RunRecord trajectory(const std::vector<double>& violations) {
  RunRecord record;
  for (double v : violations) {
    record.rounds.push_back(quadratic_round(0.0));
    RoundLog entry;
    entry.action = scalar(1.0);
    entry.loss = 1.0;
    entry.violation = v;
    record.log.push_back(entry);
  }
  return record;
}

RunRecord synthetic_run(std::size_t T, const StepSchedule& schedule, std::uint64_t seed = 3) {
  return clasp::run(Synthetic1D::source(Rng(seed)), Synthetic1D::domain(), schedule,
                    ConstraintMode::kTransient, T, scalar(0.5));
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators and data
// ---------------------------------------------------------------------------

TEST(LinearRegression, ShapesAndDeterminism) {
  Rng a(5), b(5);
  const Round r = gen_linear_regression_round(a);
  const Round s = gen_linear_regression_round(b);
  const auto& loss = std::get<NormResidual>(r.loss.family());
  EXPECT_EQ(loss.H.rows(), 4);
  EXPECT_EQ(loss.H.cols(), 10);
  ASSERT_EQ(r.constraints.size(), 1u);
  const auto& rows = std::get<AffineMax>(r.constraints.front().family());
  EXPECT_EQ(rows.rows.rows(), 4);
  EXPECT_EQ(rows.rows.cols(), 10);
  EXPECT_EQ(loss.H, std::get<NormResidual>(s.loss.family()).H);
  EXPECT_EQ(loss.y, std::get<NormResidual>(s.loss.family()).y);
  EXPECT_EQ(rows.offsets, std::get<AffineMax>(s.constraints.front().family()).offsets);
}

TEST(LinearRegression, SampledEntriesRespectTheirRanges) {
  Rng rng(6);
  double h_lo = 1, h_hi = -1, a_lo = 2, a_hi = 0, b_lo = 1, b_hi = 0;
  for (int k = 0; k < 2500; ++k) {  // 10^5 entries of H
    const Round r = gen_linear_regression_round(rng);
    const auto& H = std::get<NormResidual>(r.loss.family()).H;
    const auto& g = std::get<AffineMax>(r.constraints.front().family());
    h_lo = std::min(h_lo, H.minCoeff());
    h_hi = std::max(h_hi, H.maxCoeff());
    a_lo = std::min(a_lo, g.rows.minCoeff());
    a_hi = std::max(a_hi, g.rows.maxCoeff());
    b_lo = std::min(b_lo, g.offsets.minCoeff());
    b_hi = std::max(b_hi, g.offsets.maxCoeff());
    EXPECT_LE(r.loss.lipschitz_bound(), linear_regression_lipschitz());
    EXPECT_LE(r.constraints.front().lipschitz_bound(), linear_regression_lipschitz());
  }
  EXPECT_GT(h_lo, -1.0);
  EXPECT_LT(h_hi, 1.0);
  EXPECT_LT(h_lo, -0.999);
  EXPECT_GT(h_hi, 0.999);
  EXPECT_GT(a_lo, 0.0);
  EXPECT_LT(a_hi, 2.0);
  EXPECT_GT(b_lo, 0.0);
  EXPECT_LT(b_hi, 1.0);
}

TEST(WineDataset, ParsesLabelsAndUnits) {
  std::stringstream in;
  in << kHeader << "7.4;0.7;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4;5\n"
     << "7.3;0.65;0;1.2;0.065;15;21;0.9946;3.39;0.47;10;7\n";
  const auto samples = parse_wine_dataset(in);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].label, -1);
  EXPECT_EQ(samples[1].label, 1);
  EXPECT_EQ(samples[1].quality, 7);
  EXPECT_DOUBLE_EQ(samples[0].features[0], 7.4);
  EXPECT_DOUBLE_EQ(samples[0].features[5], 0.011);  // mg/dm^3 -> g/dm^3
  EXPECT_DOUBLE_EQ(samples[0].features[6], 0.034);
}

TEST(WineDataset, ErrorsNameTheRow) {
  std::stringstream bad_value;
  bad_value << kHeader << "7.4;0.7;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4;5\n"
            << "7.4;abc;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4;5\n";
  try {
    parse_wine_dataset(bad_value);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
  std::stringstream short_row;
  short_row << kHeader << "7.4;0.7;0\n";
  EXPECT_THROW(parse_wine_dataset(short_row), ParseError);
  std::stringstream fractional;
  fractional << kHeader << "7.4;0.7;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4;5.5\n";
  EXPECT_THROW(parse_wine_dataset(fractional), ParseError);
  std::stringstream empty;
  EXPECT_THROW(parse_wine_dataset(empty), ParseError);
  EXPECT_THROW(load_wine_dataset("/nonexistent/wine.csv"), ParseError);
}

TEST(WineDataset, BundledRedSubsetLoads) {
  const auto samples = load_wine_dataset(std::string(CLASP_DATA_DIR) + "/winequality-red.csv");
  EXPECT_EQ(samples.size(), 1599u);
  for (const auto& s : samples) {
    for (double f : s.features) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, SvmShape::kFeatureBound);
    }
  }
}

TEST(SvmRound, Examples) {
  WineSample sample;
  sample.features.fill(1.5);
  sample.label = -1;
  const Round r = gen_svm_round(sample);
  EXPECT_DOUBLE_EQ(r.constraints.front().value(Vector::Zero(12)), 1.0);

  WineSample zero;
  zero.label = 1;
  Vector x = Vector::Zero(12);
  x.head(11).setConstant(3.0);
  x(11) = -1.0;
  EXPECT_DOUBLE_EQ(gen_svm_round(zero).constraints.front().value(x), 0.0);
  EXPECT_DOUBLE_EQ(gen_svm_round(zero).loss.value(x), 0.5 * 9.0 * 11.0);

  EXPECT_NEAR(svm_radius(), 232.16, 5e-3);
  EXPECT_NEAR(r.constraints.front().lipschitz_bound(), 70.0 * std::sqrt(11.0), 1e-9);
  EXPECT_THROW(r.loss.value(Vector::Zero(11)), ContractViolation);
}

// ---------------------------------------------------------------------------
// Comparator
// ---------------------------------------------------------------------------

TEST(Comparator, SymmetricAndClampedExamples) {
  const FeasibleSet K = make_box(1, -2.0, 2.0);
  auto round = [](double c, double upper) {
    Round r{make_quadratic_1d(c, 6.0), {}};
    r.constraints.push_back(make_affine(scalar(1), upper));
    return r;
  };
  std::vector<Round> free{round(1, 5), round(-1, 5)};
  const auto a = comparator_solve(free, K);
  ASSERT_TRUE(a.feasible);
  EXPECT_NEAR(a.point(0), 0.0, 1e-3);
  std::vector<Round> clamped{round(1, -0.5), round(-1, -0.5)};
  const auto b = comparator_solve(clamped, K);
  ASSERT_TRUE(b.feasible);
  EXPECT_NEAR(b.point(0), -0.5, 1e-6);
}

TEST(Comparator, MatchesDenseGridOnRandomPlanarInstances) {
  testing_support::Sampler s(21);
  const FeasibleSet K = make_box(2, -1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Round> rounds;
    for (int t = 0; t < 5; ++t) {
      Matrix H(2, 2);
      H.row(0) = s.vector(2, -1, 1).transpose();
      H.row(1) = s.vector(2, -1, 1).transpose();
      Round r{make_norm_residual(H, s.vector(2, -1, 1)), {}};
      const Vector a = s.direction(2);
      r.constraints.push_back(make_affine(a, s.uniform(0.0, 0.5)));  // contains the origin
      rounds.push_back(std::move(r));
    }
    ComparatorSettings settings;
    settings.iterations = 20000;
    const auto result = comparator_solve(rounds, K, settings);
    ASSERT_TRUE(result.feasible);
    auto objective = [&](const Vector& x) { return total_loss(rounds, x); };
    auto feasible = [&](const Vector& x) {
      for (const auto& r : rounds)
        if (r.violation(x) > 0.0) return false;
      return true;
    };
    const auto grid =
        oracle::grid_minimize_2d(objective, feasible, Vector::Constant(2, -1), Vector::Constant(2, 1), 1e-6);
    ASSERT_TRUE(grid);
    EXPECT_NEAR(result.objective, objective(*grid), 1e-3) << "trial " << trial;
    EXPECT_NEAR(result.objective, objective(result.point), 1e-12);
  }
}

TEST(Comparator, EmptyHindsightSetIsReportedInfeasible) {
  const FeasibleSet K = make_box(1, 0.0, 1.0);
  std::vector<Round> rounds{quadratic_round(0.5, 0.2)};
  Round lower{make_quadratic_1d(0.5, 2.0), {}};
  lower.constraints.push_back(make_affine(scalar(-1), -0.5));  // x >= 0.5
  rounds.push_back(std::move(lower));
  EXPECT_FALSE(comparator_solve(rounds, K).feasible);
  EXPECT_FALSE(interval_quadratic_comparator(rounds, K).feasible);
}

TEST(Comparator, IntervalFormMatchesTheIterativeSolver) {
  Rng rng(2);
  auto source = Synthetic1D::source(Rng(4));
  std::vector<Round> rounds;
  for (std::size_t t = 1; t <= 30; ++t) rounds.push_back(source(t, scalar(rng.uniform())));
  const auto exact = interval_quadratic_comparator(rounds, Synthetic1D::domain());
  const auto iterative = comparator_solve(rounds, Synthetic1D::domain());
  ASSERT_TRUE(exact.feasible && iterative.feasible);
  EXPECT_NEAR(exact.objective, total_loss(rounds, exact.point), 1e-9);
  EXPECT_LE(exact.objective, iterative.objective + 1e-12);
  EXPECT_NEAR(exact.objective, iterative.objective, 1e-3);
}

// ---------------------------------------------------------------------------
// Metrics and bounds
// ---------------------------------------------------------------------------

TEST(Metrics, Examples) {
  const auto one = compute_metrics(trajectory({0.5}));
  EXPECT_DOUBLE_EQ(one.ccv1.back(), 0.5);
  EXPECT_DOUBLE_EQ(one.ccv2.back(), 0.25);
  EXPECT_TRUE(one.regret.empty());

  const auto clean = compute_metrics(trajectory({0, 0, 0}));
  EXPECT_EQ(clean.ccv1.back(), 0.0);
  EXPECT_EQ(clean.ccv2.back(), 0.0);
  EXPECT_DOUBLE_EQ(clean.cum_loss.back(), 3.0);

  // Comparator equal to every action.
  const auto zero_regret = compute_metrics(trajectory({0.1, 0.2}), scalar(1.0));
  ASSERT_EQ(zero_regret.regret.size(), 2u);
  EXPECT_DOUBLE_EQ(zero_regret.regret.back(), 0.0);
}

TEST(Metrics, HistoricalScoreForPersistentRuns) {
  RunRecord record = trajectory({0, 0});
  record.persistent = true;
  record.rounds[0] = quadratic_round(0.0, 0.5);  // g_1(1) = 0.5
  record.rounds[1] = quadratic_round(0.0, 0.8);  // g_2(1) = 0.2
  const auto m = compute_metrics(record);
  ASSERT_EQ(m.ccv_hist.size(), 2u);
  EXPECT_DOUBLE_EQ(m.ccv_hist[0], 0.25);
  EXPECT_DOUBLE_EQ(m.ccv_hist[1], 0.25 + 0.25 + 0.04);
}

TEST(Metrics, SeriesAreNonDecreasingAndLemma3HoldsPerRound) {
  auto rng = std::make_shared<Rng>(13);
  RoundSource source = [rng](std::size_t, const Vector&) { return gen_linear_regression_round(*rng); };
  const auto record = compute_metrics(clasp::run(source, linear_regression_domain(),
                                                 StepSchedule::convex(0.5),
                                                 ConstraintMode::kTransient, 100,
                                                 Vector::Constant(10, 0.5)));
  const double L = linear_regression_lipschitz();
  double loss = 0.0;
  for (std::size_t t = 0; t < record.horizon(); ++t) {
    loss += record.log[t].loss;
    EXPECT_DOUBLE_EQ(record.cum_loss[t], loss);
    if (t > 0) {
      EXPECT_GE(record.ccv1[t], record.ccv1[t - 1]);
      EXPECT_GE(record.ccv2[t], record.ccv2[t - 1]);
    }
    const double v = record.log[t].violation;
    const double d = *record.log[t].dist_action;
    EXPECT_LE(v * v, L * L * d * d + 1e-6);
  }
}

TEST(VerifyBounds, StronglyConvexSyntheticRunPasses) {
  const auto schedule = StepSchedule::strongly_convex(Synthetic1D::kModulus);
  const auto record = synthetic_run(10000, schedule);
  const auto comparator = interval_quadratic_comparator(record.rounds, Synthetic1D::domain());
  ASSERT_TRUE(comparator.feasible);
  const BoundConstants constants{Synthetic1D::kDiameter, Synthetic1D::kLipschitz, schedule.theta()};
  const auto checks = verify_bounds(record, constants, schedule, comparator.point);
  EXPECT_EQ(checks.size(), 6u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.lhs << " > " << c.rhs;
}

TEST(VerifyBounds, SingleRoundAndInflatedLipschitz) {
  const auto schedule = StepSchedule::convex(0.5);
  const auto record = synthetic_run(200, schedule);
  const BoundConstants constants{Synthetic1D::kDiameter, Synthetic1D::kLipschitz, schedule.theta()};
  const auto first = interval_quadratic_comparator(std::span(record.rounds.data(), 1),
                                                   Synthetic1D::domain());
  for (const auto& c : verify_bounds(record, constants, schedule, first.point, 1))
    EXPECT_TRUE(c.pass) << c.name;

  const auto full = interval_quadratic_comparator(record.rounds, Synthetic1D::domain());
  BoundConstants inflated = constants;
  inflated.lipschitz *= 10.0;
  for (const auto& c : verify_bounds(record, inflated, schedule, full.point))
    EXPECT_TRUE(c.pass) << c.name;
}

TEST(VerifyBounds, BaselineRecordsLackDiagnostics) {
  auto source = Synthetic1D::source(Rng(1));
  const auto record = baselines::run(baselines::Algorithm::kRecoo, source, Synthetic1D::domain(),
                                     10, scalar(0.5));
  EXPECT_THROW(verify_bounds(record, {1, 2, 1}, StepSchedule::convex(0.5), scalar(0.1)),
               MissingDiagnostics);
}

TEST(FitRate, Examples) {
  std::vector<std::pair<double, double>> root, flat, noisy;
  Rng rng(1);
  for (double T : {16.0, 64.0, 256.0, 1024.0, 4096.0}) {
    root.emplace_back(T, std::sqrt(T));
    flat.emplace_back(T, 3.0);
    noisy.emplace_back(T, T * (1.0 + 1e-6 * rng.normal()));
  }
  EXPECT_NEAR(fit_rate(root), 0.5, 1e-12);
  EXPECT_NEAR(fit_rate(flat), 0.0, 1e-12);
  EXPECT_NEAR(fit_rate(noisy), 1.0, 1e-3);
  std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0}, {3, 1}};
  EXPECT_THROW(fit_rate(bad), ContractViolation);
  std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  EXPECT_THROW(fit_rate(two), ContractViolation);
}

TEST(Aggregate, Examples) {
  const auto a = compute_metrics(trajectory({0.0, 1.0}));
  const auto b = compute_metrics(trajectory({2.0, 1.0}));
  std::vector<RunRecord> same{a, a, a};
  const auto s = aggregate_trials(same);
  for (double w : s.find("ccv1")->ci95) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(s.find("regret"), nullptr);

  std::vector<RunRecord> pair{a, b};
  const auto p = aggregate_trials(pair);
  EXPECT_DOUBLE_EQ(p.find("ccv1")->mean[0], 1.0);
  EXPECT_GE(p.find("ccv1")->ci95[0], 0.0);
  EXPECT_THROW(aggregate_trials(std::vector<RunRecord>{}), ContractViolation);
}

TEST(Aggregate, MonteCarloHalfWidth) {
  Rng rng(99);
  std::vector<double> values(10000);
  for (double& v : values) v = rng.normal();
  const auto s = summarize_values("unit", values);
  EXPECT_NEAR(s.ci95[0], 1.96 / 100.0, 0.1 * 1.96 / 100.0);
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

TEST(Experiment, StartsFollowTheProblemConvention) {
  ExperimentSpec linreg;
  const auto a = make_instance(linreg, 0);
  EXPECT_GE(a.x1.minCoeff(), 0.0);
  EXPECT_LE(a.x1.maxCoeff(), 1.0);
  EXPECT_NEAR(a.constants.diameter, std::sqrt(10.0), 1e-12);

  ExperimentSpec svm;
  svm.problem = Problem::kSvm;
  WineSample sample;
  sample.features.fill(1.0);
  svm.dataset = std::make_shared<const std::vector<WineSample>>(std::vector<WineSample>{sample});
  const auto b = make_instance(svm, 0);
  EXPECT_EQ(b.x1.size(), 12);
  EXPECT_GE(b.x1.minCoeff(), -1.0);
  EXPECT_LE(b.x1.maxCoeff(), 1.0);
  EXPECT_NEAR(b.constants.diameter, 2.0 * svm_radius(), 1e-9);

  svm.dataset.reset();
  EXPECT_THROW(make_instance(svm, 0), ContractViolation);
}

TEST(Experiment, ResultsDoNotDependOnTheWorkerCount) {
  ExperimentSpec spec;
  spec.problem = Problem::kSynthetic1D;
  spec.schedule = StepSchedule::strongly_convex(2.0);
  spec.rounds = 300;
  spec.trials = 6;
  spec.seed = 17;
  const auto serial = run_trials(spec);
  spec.workers = 4;
  const auto pooled = run_trials(spec);
  ASSERT_EQ(serial.size(), pooled.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].seed, pooled[i].seed);
    EXPECT_EQ(serial[i].record.cum_loss, pooled[i].record.cum_loss);
    EXPECT_EQ(serial[i].record.ccv2, pooled[i].record.ccv2);
    EXPECT_EQ(serial[i].record.regret, pooled[i].record.regret);
  }
  EXPECT_NE(serial[0].record.cum_loss, serial[1].record.cum_loss);
}

TEST(Experiment, SvmComparatorIsInfeasible) {
  ExperimentSpec spec;
  spec.problem = Problem::kSvm;
  spec.dataset = std::make_shared<const std::vector<WineSample>>(
      load_wine_dataset(std::string(CLASP_DATA_DIR) + "/winequality-red.csv"));
  spec.rounds = 300;
  spec.trials = 1;
  spec.compute_comparator = true;
  const auto result = run_trial(spec, 0);
  ASSERT_TRUE(result.comparator);
  EXPECT_FALSE(result.comparator->feasible);
  EXPECT_TRUE(result.record.regret.empty());
  EXPECT_EQ(result.record.cum_loss.size(), 300u);
}
