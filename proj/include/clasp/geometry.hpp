#pragma once

// Closed convex sets, orthogonal projections and distance functions.
//
// Box, Ball and Halfspace are projected in closed form. AffineMaxSublevel and
// Intersection are flattened into closed-form primitives and projected with
// Dykstra's alternating-projection scheme, which converges to the exact
// orthogonal projection onto the intersection (plain alternation only
// reaches some feasible point).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>
#include <variant>
#include <vector>

#include "clasp/errors.hpp"

namespace clasp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// {x : lo <= x <= hi} coordinatewise.
struct Box {
  Vector lo;
  Vector hi;
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

/// {x : normal . x <= offset}
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// {x : max_m (rows.row(m) . x - offsets(m)) <= 0}
struct AffineMaxSublevel {
  Matrix rows;
  Vector offsets;
};

class FeasibleSet;

struct Intersection {
  std::vector<FeasibleSet> parts;
};

/// Immutable description of a closed convex set. Copies share the
/// underlying data.
class FeasibleSet {
 public:
  using Variant = std::variant<Box, Ball, Halfspace, AffineMaxSublevel, Intersection>;

  FeasibleSet(Box box);
  FeasibleSet(Ball ball);
  FeasibleSet(Halfspace halfspace);
  FeasibleSet(AffineMaxSublevel sublevel);
  FeasibleSet(Intersection intersection);

  const Variant& variant() const noexcept { return *data_; }
  Eigen::Index dimension() const noexcept { return dimension_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(data_.get());
  }

 private:
  std::shared_ptr<const Variant> data_;
  Eigen::Index dimension_ = 0;
};

inline FeasibleSet make_box(Vector lo, Vector hi) { return Box{std::move(lo), std::move(hi)}; }
inline FeasibleSet make_box(Eigen::Index n, double lo, double hi) {
  return Box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
}
inline FeasibleSet make_ball(Vector center, double radius) {
  return Ball{std::move(center), radius};
}
inline FeasibleSet make_halfspace(Vector normal, double offset) {
  return Halfspace{std::move(normal), offset};
}
inline FeasibleSet make_intersection(std::vector<FeasibleSet> parts) {
  return Intersection{std::move(parts)};
}

struct ProjectionSettings {
  double tol = 1e-8;             ///< stop when the Dykstra sweep moves less than this
  std::size_t max_iter = 10000;  ///< full sweeps over the constituent sets
};

struct ProjectionResult {
  Vector point;
  bool converged = true;
  /// Dykstra sweeps performed (0 for the closed forms and the identity case).
  std::size_t iterations = 0;
  /// Largest distance from `point` to any constituent primitive.
  double residual = 0.0;
  /// Set when the intersection was detected to be empty: Dykstra failed to
  /// converge, its iterate stays far from some constituent and that gap
  /// has stopped shrinking.
  bool infeasible = false;
};

// ---------------------------------------------------------------------------
// Implementation details
// ---------------------------------------------------------------------------

namespace detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

struct Primitive {
  enum class Kind { kBox, kBall, kHalfspace };
  Kind kind = Kind::kHalfspace;
  Vector a;  // box lo | ball center | halfspace normal
  Vector b;  // box hi
  double scalar = 0.0;   // ball radius | halfspace offset
  double norm_sq = 0.0;  // halfspace |normal|^2
};

struct Flattened {
  std::vector<Primitive> primitives;
  bool trivially_empty = false;  // a zero row with negative offset
};

inline void flatten_into(const FeasibleSet& set, Flattened& out);

inline void add_halfspace_row(const Eigen::Ref<const Vector>& normal, double offset, Flattened& out) {
  const double norm_sq = normal.squaredNorm();
  if (norm_sq == 0.0) {
    // 0 . x <= offset: everything or nothing.
    if (offset < 0.0) out.trivially_empty = true;
    return;
  }
  Primitive p;
  p.kind = Primitive::Kind::kHalfspace;
  p.a = normal;
  p.scalar = offset;
  p.norm_sq = norm_sq;
  out.primitives.push_back(std::move(p));
}

inline void flatten_into(const FeasibleSet& set, Flattened& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          Primitive p;
          p.kind = Primitive::Kind::kBox;
          p.a = s.lo;
          p.b = s.hi;
          out.primitives.push_back(std::move(p));
        } else if constexpr (std::is_same_v<T, Ball>) {
          Primitive p;
          p.kind = Primitive::Kind::kBall;
          p.a = s.center;
          p.scalar = s.radius;
          out.primitives.push_back(std::move(p));
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          add_halfspace_row(s.normal, s.offset, out);
        } else if constexpr (std::is_same_v<T, AffineMaxSublevel>) {
          for (Eigen::Index m = 0; m < s.rows.rows(); ++m) {
            add_halfspace_row(s.rows.row(m).transpose(), s.offsets(m), out);
          }
        } else {
          for (const auto& part : s.parts) flatten_into(part, out);
        }
      },
      set.variant());
}

inline Flattened flatten(const FeasibleSet& set) {
  Flattened out;
  flatten_into(set, out);
  return out;
}

inline void project_primitive(const Primitive& p, const Vector& in, Vector& out) {
  switch (p.kind) {
    case Primitive::Kind::kBox:
      out = in.cwiseMax(p.a).cwiseMin(p.b);
      return;
    case Primitive::Kind::kBall: {
      const double norm = (in - p.a).norm();
      if (norm <= p.scalar) {
        out = in;
      } else if (p.scalar == 0.0) {
        out = p.a;
      } else {
        out = p.a + (p.scalar / norm) * (in - p.a);
      }
      return;
    }
    case Primitive::Kind::kHalfspace: {
      const double excess = p.a.dot(in) - p.scalar;
      if (excess <= 0.0) {
        out = in;
      } else {
        out = in - (excess / p.norm_sq) * p.a;
      }
      return;
    }
  }
}

/// Closed-form distance from x to the primitive.
inline double primitive_distance(const Primitive& p, const Vector& x) {
  switch (p.kind) {
    case Primitive::Kind::kBox: {
      double sq = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = std::max({p.a(i) - x(i), x(i) - p.b(i), 0.0});
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case Primitive::Kind::kBall:
      return std::max(0.0, (x - p.a).norm() - p.scalar);
    case Primitive::Kind::kHalfspace:
      return std::max(0.0, (p.a.dot(x) - p.scalar) / std::sqrt(p.norm_sq));
  }
  return 0.0;
}

inline bool primitive_contains(const Primitive& p, const Vector& x) {
  switch (p.kind) {
    case Primitive::Kind::kBox:
      return (x.array() >= p.a.array()).all() && (x.array() <= p.b.array()).all();
    case Primitive::Kind::kBall:
      return (x - p.a).norm() <= p.scalar;
    case Primitive::Kind::kHalfspace:
      return p.a.dot(x) <= p.scalar;
  }
  return false;
}

struct DykstraOutcome {
  Vector x;
  bool converged = false;
  std::size_t sweeps = 0;
  /// Residual over the active primitives at the final sweep and at the
  /// midpoint of the sweep budget (equal when the run stopped earlier).
  double residual = 0.0;
  double midpoint_residual = 0.0;
  /// The exact finishing solver proved the intersection empty.
  bool empty = false;
};

/// Sweeps after which a polyhedral intersection that has not met the
/// Dykstra tolerance is handed to the exact finishing solver.
inline constexpr std::size_t kFinishAfterSweeps = 256;

enum class FinishStatus { kOptimal, kEmpty, kUnknown };

struct FinishOutcome {
  FinishStatus status = FinishStatus::kUnknown;
  Vector x;
};

/// Exact projection onto an intersection of boxes and halfspaces with the
/// dual active-set method of Goldfarb and Idnani (identity Hessian). It
/// starts from the unconstrained minimizer u, repeatedly adds the most
/// violated constraint and moves along the direction that keeps the active
/// constraints tight, dropping an active constraint whenever its
/// multiplier would turn negative. It terminates with a KKT point (the
/// projection) or with a certificate that the intersection is empty.
/// Balls are not polyhedral and give kUnknown.
inline FinishOutcome finish_polyhedral(const std::vector<Primitive>& primitives,
                                       const std::vector<std::size_t>& active, const Vector& u) {
  FinishOutcome out;
  const Eigen::Index n = u.size();
  std::vector<Vector> normals;
  std::vector<double> offsets;
  for (std::size_t idx : active) {
    const Primitive& p = primitives[idx];
    if (p.kind == Primitive::Kind::kBall) return out;
    if (p.kind == Primitive::Kind::kHalfspace) {
      normals.push_back(p.a);
      offsets.push_back(p.scalar);
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e(j) = -1.0;
      normals.push_back(e);
      offsets.push_back(-p.a(j));
      e(j) = 1.0;
      normals.push_back(std::move(e));
      offsets.push_back(p.b(j));
    }
  }
  const std::size_t count = normals.size();
  std::vector<double> inv_norm(count);
  for (std::size_t i = 0; i < count; ++i) inv_norm[i] = 1.0 / normals[i].norm();

  const double scale = 1.0 + u.cwiseAbs().maxCoeff();
  const double eps = 1e-12 * scale;
  Vector x = u;
  std::vector<std::size_t> act;
  std::vector<double> lambda;
  const std::size_t cap = 10 * (count + static_cast<std::size_t>(n)) + 100;
  std::size_t steps = 0;

  for (;;) {
    // Most violated constraint (by distance).
    std::size_t p = count;
    double worst = eps;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = (normals[i].dot(x) - offsets[i]) * inv_norm[i];
      if (v > worst) {
        worst = v;
        p = i;
      }
    }
    if (p == count) break;
    double lambda_p = 0.0;
    for (;;) {
      if (++steps > cap) return out;
      const auto k = static_cast<Eigen::Index>(act.size());
      Vector r = Vector::Zero(k);
      Vector z = normals[p];
      if (k > 0) {
        Matrix N(k, n);
        for (Eigen::Index i = 0; i < k; ++i) N.row(i) = normals[act[i]].transpose();
        Eigen::LDLT<Matrix> ldlt(N * N.transpose());
        if (ldlt.info() != Eigen::Success) return out;
        r = ldlt.solve(N * normals[p]);
        z -= N.transpose() * r;
      }
      // Largest step keeping every active multiplier nonnegative.
      double t1 = std::numeric_limits<double>::infinity();
      std::size_t blocking = act.size();
      for (std::size_t j = 0; j < act.size(); ++j) {
        if (r(static_cast<Eigen::Index>(j)) > 1e-14) {
          const double ratio = lambda[j] / r(static_cast<Eigen::Index>(j));
          if (ratio < t1) {
            t1 = ratio;
            blocking = j;
          }
        }
      }
      // Step that makes constraint p tight.
      const double slack = normals[p].dot(x) - offsets[p];
      const double curvature = z.dot(normals[p]);
      const bool dependent = z.squaredNorm() <= 1e-24 * normals[p].squaredNorm();
      const double t2 = dependent ? std::numeric_limits<double>::infinity() : slack / curvature;
      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        out.status = FinishStatus::kEmpty;
        return out;
      }
      const double t = std::min(t1, t2);
      if (!dependent) x -= t * z;
      for (std::size_t j = 0; j < act.size(); ++j) lambda[j] -= t * r(static_cast<Eigen::Index>(j));
      lambda_p += t;
      if (t2 <= t1) {
        act.push_back(p);
        lambda.push_back(lambda_p);
        break;
      }
      act.erase(act.begin() + static_cast<std::ptrdiff_t>(blocking));
      lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(blocking));
    }
  }
  if (!x.allFinite()) return out;
  out.status = FinishStatus::kOptimal;
  out.x = std::move(x);
  return out;
}

inline double active_residual(const std::vector<Primitive>& primitives,
                              const std::vector<std::size_t>& active, const Vector& x) {
  double worst = 0.0;
  for (std::size_t i : active) worst = std::max(worst, primitive_distance(primitives[i], x));
  return worst;
}

/// Dykstra's algorithm over the primitives selected by `active`.
///
/// Stops when sqrt(sum_i |p_i^k - p_i^{k-1}|^2) < tol. The displacement of
/// the iterate over a sweep is the sum of the correction changes, so this
/// also bounds the displacement, and unlike a displacement-only test it
/// cannot stop on a sweep that merely shuffles corrections between sets.
/// Intersections of boxes and halfspaces still short of the tolerance after
/// kFinishAfterSweeps sweeps are finished exactly (see finish_polyhedral).
inline DykstraOutcome dykstra(const std::vector<Primitive>& primitives,
                              const std::vector<std::size_t>& active, const Vector& u,
                              const ProjectionSettings& settings) {
  DykstraOutcome result;
  const Eigen::Index n = u.size();
  if (active.size() == 1) {
    project_primitive(primitives[active.front()], u, result.x);
    result.converged = true;
    result.sweeps = 1;
    return result;
  }
  std::vector<Vector> corrections(active.size(), Vector::Zero(n));
  Vector x = u;
  Vector shifted(n);
  Vector projected(n);
  const double tol_sq = settings.tol * settings.tol;
  const std::size_t midpoint = std::max<std::size_t>(1, settings.max_iter / 2);
  bool have_midpoint = false;
  for (std::size_t sweep = 1; sweep <= settings.max_iter; ++sweep) {
    double change_sq = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      shifted.noalias() = x + corrections[k];
      project_primitive(primitives[active[k]], shifted, projected);
      // new correction = shifted - projected
      change_sq += (shifted - projected - corrections[k]).squaredNorm();
      corrections[k].noalias() = shifted - projected;
      x.swap(projected);
    }
    result.sweeps = sweep;
    if (change_sq <= tol_sq) {
      result.converged = true;
      break;
    }
    if (sweep == midpoint) {
      result.midpoint_residual = active_residual(primitives, active, x);
      have_midpoint = true;
    }
    if (sweep == kFinishAfterSweeps) {
      FinishOutcome finish = finish_polyhedral(primitives, active, u);
      if (finish.status == FinishStatus::kOptimal) {
        x = std::move(finish.x);
        result.converged = true;
        break;
      }
      if (finish.status == FinishStatus::kEmpty) {
        result.empty = true;
        break;
      }
    }
  }
  result.residual = active_residual(primitives, active, x);
  if (!have_midpoint) result.midpoint_residual = result.residual;
  result.x = std::move(x);
  return result;
}

/// A run that exhausted its sweeps (and was not decided by the exact
/// finish) is reported infeasible only when the
/// residual is above the threshold and has stopped shrinking: over an
/// empty intersection Dykstra's iterates settle at a positive gap, while a
/// slowly converging feasible run keeps reducing it.
inline bool stalled(double midpoint_residual, double final_residual) {
  return final_residual > 0.5 * midpoint_residual;
}

/// Above this many halfspaces, constraints are activated lazily.
inline constexpr std::size_t kLazyHalfspaceThreshold = 16;
/// Halfspaces added to the working set per activation pass.
inline constexpr std::size_t kActivationBatch = 64;

inline double infeasibility_threshold(const ProjectionSettings& settings) {
  return std::max(1e-6, 100.0 * settings.tol);
}

inline double max_residual(const std::vector<Primitive>& primitives, const Vector& x) {
  double worst = 0.0;
  for (const auto& p : primitives) worst = std::max(worst, primitive_distance(p, x));
  return worst;
}

/// Indices of halfspaces outside `working` violated at x by more than
/// `threshold` (distance), most violated first, capped at kActivationBatch.
inline std::vector<std::size_t> violated_halfspaces(const std::vector<Primitive>& primitives,
                                                    const std::vector<bool>& in_working,
                                                    const Vector& x, double threshold) {
  std::vector<std::pair<double, std::size_t>> violated;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (in_working[i] || primitives[i].kind != Primitive::Kind::kHalfspace) continue;
    const double d = primitive_distance(primitives[i], x);
    if (d > threshold) violated.emplace_back(d, i);
  }
  if (violated.size() > kActivationBatch) {
    std::partial_sort(violated.begin(), violated.begin() + kActivationBatch, violated.end(),
                      [](const auto& l, const auto& r) {
                        return l.first > r.first || (l.first == r.first && l.second < r.second);
                      });
    violated.resize(kActivationBatch);
  }
  std::vector<std::size_t> indices;
  indices.reserve(violated.size());
  for (const auto& [d, i] : violated) indices.push_back(i);
  return indices;
}

/// Projection onto the intersection of many primitives by constraint
/// activation: Dykstra runs over a working subset (all non-halfspace
/// primitives plus the halfspaces found violated so far). When the
/// projection onto that relaxation already satisfies every remaining
/// halfspace, it is the projection onto the full intersection.
inline ProjectionResult project_lazy(const std::vector<Primitive>& primitives, const Vector& u,
                                     const ProjectionSettings& settings, bool& certified_empty) {
  ProjectionResult result;
  std::vector<bool> in_working(primitives.size(), false);
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (primitives[i].kind != Primitive::Kind::kHalfspace) in_working[i] = true;
  }
  for (std::size_t i : violated_halfspaces(primitives, in_working, u, 0.0)) in_working[i] = true;

  Vector x = u;
  bool converged = true;
  bool stalled_run = false;
  for (;;) {
    std::vector<std::size_t> working;
    for (std::size_t i = 0; i < primitives.size(); ++i) {
      if (in_working[i]) working.push_back(i);
    }
    DykstraOutcome outcome = dykstra(primitives, working, u, settings);
    result.iterations += outcome.sweeps;
    x = std::move(outcome.x);
    converged = outcome.converged;
    if (outcome.empty) {
      certified_empty = true;
      break;
    }
    if (!converged && outcome.residual > infeasibility_threshold(settings)) {
      stalled_run = stalled(outcome.midpoint_residual, outcome.residual);
      break;
    }
    const auto added = violated_halfspaces(primitives, in_working, x, settings.tol);
    if (added.empty()) break;
    for (std::size_t i : added) in_working[i] = true;
  }
  result.point = std::move(x);
  result.converged = converged;
  result.infeasible = stalled_run;
  return result;
}

inline void check_settings(const ProjectionSettings& settings) {
  require(settings.tol > 0.0 && std::isfinite(settings.tol), "projection tol must be > 0");
  require(settings.max_iter >= 1, "projection max_iter must be >= 1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FeasibleSet construction
// ---------------------------------------------------------------------------

inline FeasibleSet::FeasibleSet(Box box) {
  detail::require(box.lo.size() > 0 && box.lo.size() == box.hi.size(),
                  "box bounds must have equal, positive dimension");
  detail::require(detail::all_finite(box.lo) && detail::all_finite(box.hi),
                  "box bounds must be finite");
  detail::require((box.lo.array() <= box.hi.array()).all(), "box requires lo <= hi");
  dimension_ = box.lo.size();
  data_ = std::make_shared<const Variant>(std::move(box));
}

inline FeasibleSet::FeasibleSet(Ball ball) {
  detail::require(ball.center.size() > 0, "ball center must have positive dimension");
  detail::require(detail::all_finite(ball.center), "ball center must be finite");
  detail::require(ball.radius >= 0.0 && std::isfinite(ball.radius), "ball radius must be >= 0");
  dimension_ = ball.center.size();
  data_ = std::make_shared<const Variant>(std::move(ball));
}

inline FeasibleSet::FeasibleSet(Halfspace halfspace) {
  detail::require(halfspace.normal.size() > 0, "halfspace normal must have positive dimension");
  detail::require(detail::all_finite(halfspace.normal) && std::isfinite(halfspace.offset),
                  "halfspace must be finite");
  detail::require(halfspace.normal.norm() > 0.0, "halfspace normal must be non-zero");
  dimension_ = halfspace.normal.size();
  data_ = std::make_shared<const Variant>(std::move(halfspace));
}

inline FeasibleSet::FeasibleSet(AffineMaxSublevel sublevel) {
  detail::require(sublevel.rows.rows() >= 1 && sublevel.rows.cols() >= 1,
                  "affine-max sublevel set needs at least one row");
  detail::require(sublevel.rows.rows() == sublevel.offsets.size(),
                  "affine-max sublevel set: one offset per row");
  detail::require(sublevel.rows.allFinite() && sublevel.offsets.allFinite(),
                  "affine-max sublevel set must be finite");
  dimension_ = sublevel.rows.cols();
  data_ = std::make_shared<const Variant>(std::move(sublevel));
}

inline FeasibleSet::FeasibleSet(Intersection intersection) {
  detail::require(!intersection.parts.empty(), "intersection needs at least one part");
  dimension_ = intersection.parts.front().dimension();
  for (const auto& part : intersection.parts) {
    detail::require(part.dimension() == dimension_, "intersection parts differ in dimension");
  }
  data_ = std::make_shared<const Variant>(std::move(intersection));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Projection onto a fixed set, with the set flattened once up front.
/// Use this when projecting many points onto the same large intersection.
class Projector {
 public:
  explicit Projector(const FeasibleSet& set) : dimension_(set.dimension()), flat_(detail::flatten(set)) {
    halfspaces_ = static_cast<std::size_t>(
        std::count_if(flat_.primitives.begin(), flat_.primitives.end(), [](const auto& p) {
          return p.kind == detail::Primitive::Kind::kHalfspace;
        }));
  }

  Eigen::Index dimension() const noexcept { return dimension_; }

  /// Euclidean projection of u. Closed-form variants are exact.
  /// Intersections are solved by Dykstra to `settings.tol`; when `max_iter`
  /// sweeps are exhausted the best iterate is returned with
  /// `converged == false`.
  ProjectionResult operator()(const Vector& u, const ProjectionSettings& settings = {}) const {
    detail::check_settings(settings);
    detail::require(u.size() == dimension_, "projection: dimension mismatch");
    detail::require(detail::all_finite(u), "projection: point has non-finite coordinates");

    ProjectionResult result;
    if (flat_.trivially_empty) {
      result.point = u;
      result.converged = false;
      result.residual = std::numeric_limits<double>::infinity();
      result.infeasible = true;
      return result;
    }
    const auto& primitives = flat_.primitives;
    const bool inside = std::all_of(primitives.begin(), primitives.end(),
                                    [&](const auto& p) { return detail::primitive_contains(p, u); });
    if (inside) {
      result.point = u;
      return result;
    }

    bool certified_empty = false;
    if (halfspaces_ > detail::kLazyHalfspaceThreshold) {
      result = detail::project_lazy(primitives, u, settings, certified_empty);
    } else {
      std::vector<std::size_t> all(primitives.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      detail::DykstraOutcome outcome = detail::dykstra(primitives, all, u, settings);
      result.point = std::move(outcome.x);
      result.converged = outcome.converged;
      result.iterations = primitives.size() == 1 ? 0 : outcome.sweeps;
      certified_empty = outcome.empty;
      result.infeasible = detail::stalled(outcome.midpoint_residual, outcome.residual);
    }
    result.residual = detail::max_residual(primitives, result.point);
    result.infeasible = certified_empty ||
                        (result.infeasible && !result.converged &&
                         result.residual > detail::infeasibility_threshold(settings));
    return result;
  }

 private:
  Eigen::Index dimension_;
  detail::Flattened flat_;
  std::size_t halfspaces_ = 0;
};

/// Euclidean projection of u onto the set; see Projector.
inline ProjectionResult project(const FeasibleSet& set, const Vector& u,
                                const ProjectionSettings& settings = {}) {
  return Projector(set)(u, settings);
}

/// d_S(u) = |u - P_S(u)|.
inline double distance(const FeasibleSet& set, const Vector& u,
                       const ProjectionSettings& settings = {}) {
  return (u - project(set, u, settings).point).norm();
}

/// True when x lies within `tol` (distance) of every constituent of the set.
inline bool contains(const FeasibleSet& set, const Vector& x, double tol = 0.0) {
  detail::require(x.size() == set.dimension(), "contains: dimension mismatch");
  const detail::Flattened flat = detail::flatten(set);
  if (flat.trivially_empty) return false;
  return detail::max_residual(flat.primitives, x) <= tol;
}

/// Diameter bound D: |hi - lo| for a box, 2 r for a ball.
inline double set_diameter(const FeasibleSet& set) {
  if (const auto* box = set.get_if<Box>()) return (box->hi - box->lo).norm();
  if (const auto* ball = set.get_if<Ball>()) return 2.0 * ball->radius;
  throw DiameterUnavailable();
}

}  // namespace clasp
