#pragma once

// Convex function oracles: value and one subgradient at any point, plus the
// Lipschitz bound (valid on the ambient action set) and strong convexity
// modulus each family declares.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <variant>
#include <vector>

#include "clasp/errors.hpp"
#include "clasp/geometry.hpp"
#include "clasp/random.hpp"

namespace clasp {

/// x -> a . x - b
struct Affine {
  Vector a;
  double b = 0.0;
};

/// x -> max_m (rows.row(m) . x - offsets(m))
struct AffineMax {
  Matrix rows;
  Vector offsets;
};

/// x -> |H x - y|
struct NormResidual {
  Matrix H;
  Vector y;
};

/// x -> 1/2 |x restricted to mask|^2
struct HalfSquaredNorm {
  std::vector<bool> mask;
};

/// x -> (x - center)^2 on the real line.
struct Quadratic1D {
  double center = 0.0;
};

class ConvexOracle {
 public:
  using Family = std::variant<Affine, AffineMax, NormResidual, HalfSquaredNorm, Quadratic1D>;

  ConvexOracle(Family family, double lipschitz_bound, double strong_convexity_modulus)
      : family_(std::make_shared<const Family>(std::move(family))),
        lipschitz_bound_(lipschitz_bound),
        modulus_(strong_convexity_modulus) {
    detail::require(lipschitz_bound >= 0.0, "lipschitz bound must be >= 0");
    detail::require(strong_convexity_modulus >= 0.0, "strong convexity modulus must be >= 0");
    dimension_ = std::visit([](const auto& f) { return family_dimension(f); }, *family_);
    detail::require(dimension_ > 0, "oracle dimension must be positive");
  }

  const Family& family() const noexcept { return *family_; }
  Eigen::Index dimension() const noexcept { return dimension_; }
  double lipschitz_bound() const noexcept { return lipschitz_bound_; }
  double strong_convexity_modulus() const noexcept { return modulus_; }

  double value(const Vector& x) const {
    check(x);
    return std::visit([&](const auto& f) { return eval(f, x); }, *family_);
  }

  /// One element of the subdifferential. AffineMax ties resolve to the
  /// lowest row index; NormResidual at a zero residual returns 0.
  Vector subgradient(const Vector& x) const {
    check(x);
    return std::visit([&](const auto& f) { return grad(f, x); }, *family_);
  }

  /// g^+(x) = max(0, g(x))
  double positive_part(const Vector& x) const { return std::max(0.0, value(x)); }

 private:
  void check(const Vector& x) const {
    detail::require(x.size() == dimension_, "oracle: dimension mismatch");
  }

  static Eigen::Index family_dimension(const Affine& f) { return f.a.size(); }
  static Eigen::Index family_dimension(const AffineMax& f) {
    detail::require(f.rows.rows() >= 1 && f.rows.rows() == f.offsets.size(),
                    "affine-max oracle: one offset per row, at least one row");
    return f.rows.cols();
  }
  static Eigen::Index family_dimension(const NormResidual& f) {
    detail::require(f.H.rows() == f.y.size(), "norm residual: H rows must match y");
    return f.H.cols();
  }
  static Eigen::Index family_dimension(const HalfSquaredNorm& f) {
    return static_cast<Eigen::Index>(f.mask.size());
  }
  static Eigen::Index family_dimension(const Quadratic1D&) { return 1; }

  static Eigen::Index argmax_row(const AffineMax& f, const Vector& x) {
    Eigen::Index best = 0;
    double best_value = f.rows.row(0).dot(x) - f.offsets(0);
    for (Eigen::Index m = 1; m < f.rows.rows(); ++m) {
      const double v = f.rows.row(m).dot(x) - f.offsets(m);
      if (v > best_value) {
        best_value = v;
        best = m;
      }
    }
    return best;
  }

  static double eval(const Affine& f, const Vector& x) { return f.a.dot(x) - f.b; }
  static double eval(const AffineMax& f, const Vector& x) {
    const Eigen::Index m = argmax_row(f, x);
    return f.rows.row(m).dot(x) - f.offsets(m);
  }
  static double eval(const NormResidual& f, const Vector& x) { return (f.H * x - f.y).norm(); }
  static double eval(const HalfSquaredNorm& f, const Vector& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.mask.size(); ++i) {
      if (f.mask[i]) sum += x(static_cast<Eigen::Index>(i)) * x(static_cast<Eigen::Index>(i));
    }
    return 0.5 * sum;
  }
  static double eval(const Quadratic1D& f, const Vector& x) {
    const double d = x(0) - f.center;
    return d * d;
  }

  static Vector grad(const Affine& f, const Vector&) { return f.a; }
  static Vector grad(const AffineMax& f, const Vector& x) {
    return f.rows.row(argmax_row(f, x)).transpose();
  }
  static Vector grad(const NormResidual& f, const Vector& x) {
    const Vector residual = f.H * x - f.y;
    const double norm = residual.norm();
    if (norm == 0.0) return Vector::Zero(x.size());
    return f.H.transpose() * (residual / norm);
  }
  static Vector grad(const HalfSquaredNorm& f, const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (std::size_t i = 0; i < f.mask.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      if (f.mask[i]) g(k) = x(k);
    }
    return g;
  }
  static Vector grad(const Quadratic1D& f, const Vector& x) {
    return Vector::Constant(1, 2.0 * (x(0) - f.center));
  }

  std::shared_ptr<const Family> family_;
  double lipschitz_bound_;
  double modulus_;
  Eigen::Index dimension_ = 0;
};

// ---------------------------------------------------------------------------
// Factories. Where the Lipschitz bound is a property of the function alone it
// is computed; where it depends on the action set the caller supplies it.
// ---------------------------------------------------------------------------

inline ConvexOracle make_affine(Vector a, double b) {
  const double lipschitz = a.norm();
  return ConvexOracle(Affine{std::move(a), b}, lipschitz, 0.0);
}

inline ConvexOracle make_affine_max(Matrix rows, Vector offsets) {
  const double lipschitz = rows.rows() > 0 ? rows.rowwise().norm().maxCoeff() : 0.0;
  return ConvexOracle(AffineMax{std::move(rows), std::move(offsets)}, lipschitz, 0.0);
}

/// Lipschitz bound is the spectral norm of H.
inline ConvexOracle make_norm_residual(Matrix H, Vector y) {
  const double spectral = Eigen::JacobiSVD<Matrix>(H).singularValues()(0);
  return ConvexOracle(NormResidual{std::move(H), std::move(y)}, spectral, 0.0);
}

inline ConvexOracle make_half_squared_norm(std::vector<bool> mask, double lipschitz) {
  const bool full = std::all_of(mask.begin(), mask.end(), [](bool b) { return b; });
  return ConvexOracle(HalfSquaredNorm{std::move(mask)}, lipschitz, full ? 1.0 : 0.0);
}

inline ConvexOracle make_quadratic_1d(double center, double lipschitz) {
  return ConvexOracle(Quadratic1D{center}, lipschitz, 2.0);
}

/// {x : g(x) <= 0} for the affine families.
inline FeasibleSet sublevel_set(const ConvexOracle& oracle) {
  if (const auto* f = std::get_if<Affine>(&oracle.family())) {
    if (f->a.norm() > 0.0) return Halfspace{f->a, f->b};
    return AffineMaxSublevel{f->a.transpose(), Vector::Constant(1, f->b)};
  }
  if (const auto* f = std::get_if<AffineMax>(&oracle.family())) {
    return AffineMaxSublevel{f->rows, f->offsets};
  }
  throw ContractViolation("sublevel_set: only affine constraint families are supported");
}

/// Splits an AffineMax oracle into one Affine oracle per row; other
/// families come back unchanged as a single entry.
inline std::vector<ConvexOracle> split_rows(const ConvexOracle& oracle) {
  const auto* f = std::get_if<AffineMax>(&oracle.family());
  if (f == nullptr) return {oracle};
  std::vector<ConvexOracle> rows;
  rows.reserve(static_cast<std::size_t>(f->rows.rows()));
  for (Eigen::Index m = 0; m < f->rows.rows(); ++m) {
    rows.push_back(make_affine(f->rows.row(m).transpose(), f->offsets(m)));
  }
  return rows;
}

namespace detail {

inline Vector sample_point(const FeasibleSet& set, Rng& rng) {
  if (const auto* box = set.get_if<Box>()) {
    Vector x(box->lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(box->lo(i), box->hi(i));
    return x;
  }
  if (const auto* ball = set.get_if<Ball>()) {
    const Eigen::Index n = ball->center.size();
    Vector direction(n);
    for (Eigen::Index i = 0; i < n; ++i) direction(i) = rng.normal();
    const double norm = direction.norm();
    if (norm == 0.0) return ball->center;
    const double radius = ball->radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    return ball->center + (radius / norm) * direction;
  }
  throw ContractViolation("sampling is only available for Box and Ball sets");
}

}  // namespace detail

/// Largest subgradient norm over `samples` uniform points of K. A lower
/// estimate of the true bound, for verifying declared constants only.
inline double estimate_lipschitz(const ConvexOracle& oracle, const FeasibleSet& K, Rng& rng,
                                 std::size_t samples = 1000) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    worst = std::max(worst, oracle.subgradient(detail::sample_point(K, rng)).norm());
  }
  return worst;
}

}  // namespace clasp
