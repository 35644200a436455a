// Runs CLASP on a small hand-built instance and prints the trajectory
// metrics: f_t(x) = |x - (1, 1)| on the box [0, 2]^2 with the
// halfspace x_1 + x_2 <= 1 revealed every round.

#include <cstdio>

#include "clasp/clasp.hpp"
#include "clasp/harness/metrics.hpp"

int main() {
  using namespace clasp;
  const FeasibleSet K = make_box(2, 0.0, 2.0);
  const Vector target = Vector::Ones(2);

  RoundSource source = [&](std::size_t, const Vector&) {
    Matrix H = Matrix::Identity(2, 2);
    Round round{make_norm_residual(H, target), {}};
    round.constraints.push_back(make_affine(Vector::Ones(2), 1.0));
    return round;
  };

  const Vector x1 = Vector::Constant(2, 2.0);
  RunRecord record = run(source, K, StepSchedule::convex(0.5), ConstraintMode::kTransient, 200, x1);
  record = harness::compute_metrics(std::move(record), Vector::Constant(2, 0.5));

  const auto& last = record.log.back();
  std::printf("x_T      = (%.6f, %.6f)\n", last.action(0), last.action(1));
  std::printf("regret   = %.6f\n", record.regret.back());
  std::printf("CCV_T,1  = %.6f\n", record.ccv1.back());
  std::printf("CCV_T,2  = %.6f\n", record.ccv2.back());
  return 0;
}
