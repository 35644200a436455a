#pragma once

// Reference oracles for the test suite. They share no code with the
// library: projections are found by enumerating active sets, minimizers by
// zooming grids.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Plane {
  Vec a;
  double b;  // a . x <= b
};

/// Nearest point of {lo <= x <= hi, a_i . x <= b_i} to u by enumerating
/// every set of at most n active constraints (box faces and halfspaces),
/// solving the equality-constrained projection for each and keeping the
/// nearest feasible candidate. Exponential, so only for n <= 3 and a
/// handful of halfspaces. Returns nullopt when no candidate is feasible.
inline std::optional<Vec> nearest_point(const Vec& lo, const Vec& hi,
                                        const std::vector<Plane>& planes, const Vec& u,
                                        double feas_tol = 1e-10) {
  const auto n = u.size();
  std::vector<Plane> all;
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = -1.0;
    all.push_back({e, -lo(j)});
    e(j) = 1.0;
    all.push_back({e, hi(j)});
  }
  all.insert(all.end(), planes.begin(), planes.end());
  const std::size_t m = all.size();

  auto feasible = [&](const Vec& x) {
    for (const auto& p : all)
      if (p.a.dot(x) - p.b > feas_tol) return false;
    return true;
  };

  std::optional<Vec> best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    // Evaluate the current active set.
    const auto k = static_cast<Eigen::Index>(chosen.size());
    Vec x = u;
    if (k > 0) {
      Mat A(k, n);
      Vec b(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        A.row(i) = all[chosen[i]].a.transpose();
        b(i) = all[chosen[i]].b;
      }
      Eigen::FullPivLU<Mat> lu(A * A.transpose());
      if (lu.rank() == k) {
        const Vec lambda = lu.solve(A * u - b);
        x = u - A.transpose() * lambda;
      } else {
        x = Vec();
      }
    }
    if (x.size() == n && feasible(x)) {
      const double d = (x - u).norm();
      if (d < best_dist) {
        best_dist = d;
        best = x;
      }
    }
    if (chosen.size() == static_cast<std::size_t>(n)) return;
    for (std::size_t i = start; i < m; ++i) {
      chosen.push_back(i);
      recurse(i + 1);
      chosen.pop_back();
    }
  };
  recurse(0);
  return best;
}

/// Minimizes `objective` over the box [lo, hi]^2 intersected with
/// `feasible` by a grid search that repeatedly zooms on the best cell.
/// Final cell width is below `resolution`.
inline std::optional<Vec> grid_minimize_2d(const std::function<double(const Vec&)>& objective,
                                           const std::function<bool(const Vec&)>& feasible,
                                           const Vec& lo, const Vec& hi,
                                           double resolution = 1e-3, int points = 201) {
  Vec a = lo, b = hi;
  std::optional<Vec> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (;;) {
    std::optional<Vec> round_best;
    double round_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        Vec x(2);
        x(0) = a(0) + (b(0) - a(0)) * i / (points - 1);
        x(1) = a(1) + (b(1) - a(1)) * j / (points - 1);
        if (!feasible(x)) continue;
        const double v = objective(x);
        if (v < round_value) {
          round_value = v;
          round_best = x;
        }
      }
    }
    if (!round_best) return best;
    if (round_value < best_value) {
      best_value = round_value;
      best = round_best;
    }
    const Vec width = (b - a) / (points - 1);
    if (width.maxCoeff() < resolution) return best;
    // Zoom to a few cells around the incumbent, staying inside the box.
    a = (*best - 4.0 * width).cwiseMax(lo);
    b = (*best + 4.0 * width).cwiseMin(hi);
  }
}

/// Exact projection onto the Euclidean ball.
inline Vec ball_projection(const Vec& center, double radius, const Vec& u) {
  const double d = (u - center).norm();
  if (d <= radius) return u;
  return center + radius * (u - center) / d;
}

/// Nearest point of {|x - c| <= r} ∩ {a . x <= b} in the plane: the best
/// feasible candidate among u, each single-set projection and the points
/// where the circle meets the line.
inline std::optional<Vec> nearest_point_ball_halfspace_2d(const Vec& c, double r, const Vec& a,
                                                          double b, const Vec& u) {
  const double tol = 1e-12;
  auto feasible = [&](const Vec& x) { return (x - c).norm() <= r + tol && a.dot(x) <= b + tol; };
  std::vector<Vec> candidates{u, ball_projection(c, r, u)};
  const double excess = a.dot(u) - b;
  candidates.push_back(excess > 0 ? Vec(u - excess / a.squaredNorm() * a) : u);
  // Line a . x = b through its point nearest c, direction perpendicular to a.
  const Vec foot = c - (a.dot(c) - b) / a.squaredNorm() * a;
  const double h2 = r * r - (foot - c).squaredNorm();
  if (h2 >= 0) {
    Vec dir(2);
    dir << -a(1), a(0);
    dir /= dir.norm();
    candidates.push_back(foot + std::sqrt(h2) * dir);
    candidates.push_back(foot - std::sqrt(h2) * dir);
  }
  std::optional<Vec> best;
  for (const auto& x : candidates) {
    if (!feasible(x)) continue;
    if (!best || (x - u).norm() < (*best - u).norm()) best = x;
  }
  return best;
}

}  // namespace oracle
