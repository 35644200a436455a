#pragma once

// Problem generators: online linear regression with adversarial affine
// constraints, online SVM on the wine-quality data, and a one-dimensional
// strongly convex instance with an adaptive adversary.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "clasp/errors.hpp"
#include "clasp/geometry.hpp"
#include "clasp/oracles.hpp"
#include "clasp/random.hpp"
#include "clasp/record.hpp"

namespace clasp::harness {

// ---------------------------------------------------------------------------
// Online linear regression
// ---------------------------------------------------------------------------

struct LinearRegressionShape {
  static constexpr Eigen::Index kRows = 4;
  static constexpr Eigen::Index kDimension = 10;
};

/// f_t(x) = |H_t x - y_t|, H_t(i,j) ~ U(-1,1), y_t = H_t 1 + eps with eps
/// standard normal; g_t(x) = max_i (A_t(i) x - b_t(i)), A_t(i,j) ~ U(0,2),
/// b_t(i) ~ U(0,1). Draw order: H row-major, eps, A row-major, b.
inline Round gen_linear_regression_round(Rng& rng) {
  constexpr auto rows = LinearRegressionShape::kRows;
  constexpr auto n = LinearRegressionShape::kDimension;
  Matrix H(rows, n);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < n; ++j) H(i, j) = rng.uniform(-1.0, 1.0);
  Vector y = H * Vector::Ones(n);
  for (Eigen::Index i = 0; i < rows; ++i) y(i) += rng.normal();
  Matrix A(rows, n);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng.uniform(0.0, 2.0);
  Vector b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) b(i) = rng.uniform(0.0, 1.0);

  Round round{make_norm_residual(std::move(H), std::move(y)), {}};
  round.constraints.push_back(make_affine_max(std::move(A), std::move(b)));
  return round;
}

/// K = [0, 1]^10
inline FeasibleSet linear_regression_domain() {
  return make_box(LinearRegressionShape::kDimension, 0.0, 1.0);
}

/// Lipschitz bound valid for every round on K: |H|_2 <= |H|_F < sqrt(4 * 10)
/// and |A(i)| < sqrt(10 * 2^2).
inline double linear_regression_lipschitz() {
  return std::sqrt(static_cast<double>(LinearRegressionShape::kRows *
                                       LinearRegressionShape::kDimension));
}

/// x_i ~ U(lo, hi) per coordinate.
inline Vector uniform_start(Rng& rng, Eigen::Index n, double lo, double hi) {
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.uniform(lo, hi);
  return x;
}

// ---------------------------------------------------------------------------
// Wine quality / online SVM
// ---------------------------------------------------------------------------

inline constexpr std::size_t kWineFeatures = 11;
/// Features reported in mg/dm^3 in the source data (free and total sulfur
/// dioxide); they are rescaled to g/dm^3 like the other mass concentrations.
inline constexpr std::array<std::size_t, 2> kMilligramColumns = {5, 6};
inline constexpr int kHighQualityThreshold = 7;

struct WineSample {
  std::array<double, kWineFeatures> features{};
  int quality = 0;
  int label = -1;  ///< +1 iff quality >= 7
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses semicolon-delimited wine records (header row, 11 features, final
/// integer quality column) from a stream. Row numbers in errors are 1-based
/// file lines.
inline std::vector<WineSample> parse_wine_dataset(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::vector<WineSample> samples;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      const auto fields = detail::split(line, ';');
      if (fields.size() != kWineFeatures + 1) {
        throw ParseError(row, "header has " + std::to_string(fields.size()) +
                                  " columns, expected " + std::to_string(kWineFeatures + 1));
      }
      continue;
    }
    const auto fields = detail::split(line, ';');
    if (fields.size() != kWineFeatures + 1) {
      throw ParseError(row, "expected " + std::to_string(kWineFeatures + 1) + " columns, found " +
                                std::to_string(fields.size()));
    }
    WineSample sample;
    for (std::size_t j = 0; j < kWineFeatures; ++j) {
      if (!detail::parse_double(fields[j], sample.features[j])) {
        throw ParseError(row, "column " + std::to_string(j + 1) + " is not numeric: '" +
                                  std::string(fields[j]) + "'");
      }
    }
    double quality = 0.0;
    if (!detail::parse_double(fields.back(), quality) || quality != std::floor(quality)) {
      throw ParseError(row, "quality is not an integer: '" + std::string(fields.back()) + "'");
    }
    for (std::size_t j : kMilligramColumns) sample.features[j] /= 1000.0;
    sample.quality = static_cast<int>(quality);
    sample.label = sample.quality >= kHighQualityThreshold ? 1 : -1;
    samples.push_back(sample);
  }
  if (!header_seen) throw ParseError(0, "dataset is empty (no header row)");
  return samples;
}

inline std::vector<WineSample> load_wine_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open dataset file '" + path + "'");
  return parse_wine_dataset(in);
}

struct SvmShape {
  static constexpr Eigen::Index kFeatures = static_cast<Eigen::Index>(kWineFeatures);
  static constexpr Eigen::Index kDimension = kFeatures + 1;  // x = (w, b)
  /// Features lie in [0, 70].
  static constexpr double kFeatureBound = 70.0;
};

/// 70 sqrt(P): radius of K and the constraint Lipschitz bound.
inline double svm_radius() {
  return SvmShape::kFeatureBound * std::sqrt(static_cast<double>(SvmShape::kFeatures));
}

inline FeasibleSet svm_domain() { return make_ball(Vector::Zero(SvmShape::kDimension), svm_radius()); }

/// f_t(x) = 1/2 |w|^2 and g_t(x) = -v (w . u - b) + 1 for x = (w, b).
inline Round gen_svm_round(const WineSample& sample) {
  constexpr auto p = SvmShape::kFeatures;
  std::vector<bool> mask(static_cast<std::size_t>(p + 1), true);
  mask.back() = false;
  // |grad f| = |w| <= |x| <= radius on K.
  ConvexOracle loss = make_half_squared_norm(std::move(mask), svm_radius());

  const double v = static_cast<double>(sample.label);
  Vector a(p + 1);
  for (Eigen::Index j = 0; j < p; ++j) a(j) = -v * sample.features[static_cast<std::size_t>(j)];
  a(p) = v;
  // value = a . x - offset with offset = -1
  ConvexOracle constraint(Affine{std::move(a), -1.0}, svm_radius(), 0.0);
  return Round{std::move(loss), {std::move(constraint)}};
}

/// Fisher-Yates with the documented integer sampler.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

// ---------------------------------------------------------------------------
// One-dimensional strongly convex instance
// ---------------------------------------------------------------------------

/// f_t(x) = (x - c_t)^2 on K = [0, 1] with c_t the endpoint of [0, 1]
/// farther from the committed x_t, and g_t(x) = x - s_t with s_t ~
/// U(0.3, 1), so K ∩ C_1 ∩ ... ∩ C_T always contains [0, 0.3].
/// L = 2 bounds both |f_t'| and |g_t'| on K; D = 1; m = 2.
struct Synthetic1D {
  static constexpr double kThresholdLo = 0.3;
  static constexpr double kThresholdHi = 1.0;
  static constexpr double kLipschitz = 2.0;
  static constexpr double kDiameter = 1.0;
  static constexpr double kModulus = 2.0;

  static FeasibleSet domain() { return make_box(1, 0.0, 1.0); }

  /// A source owning its generator; call sequentially with t = 1, 2, ...
  static RoundSource source(Rng rng) {
    auto state = std::make_shared<Rng>(rng);
    return [state](std::size_t, const Vector& x_t) {
      const double threshold = state->uniform(kThresholdLo, kThresholdHi);
      const double center = x_t(0) < 0.5 ? 1.0 : 0.0;
      Round round{make_quadratic_1d(center, kLipschitz), {}};
      round.constraints.push_back(make_affine(Vector::Ones(1), threshold));
      return round;
    };
  }
};

}  // namespace clasp::harness
