#pragma once

// Time steppers for f = X S V^T:
//   ips_step  interpolatory projector splitting (fixed rank)
//   buc_step  basis update and collocate (rank adaptive)
// and the dense-h references ops_step, bug_step, dense_step.

#include "bgklr/bgk.hpp"

#include <string>
#include <utility>

namespace bgklr {

enum class SubstepMethod { rk4, euler };

struct SubstepScheme {
  SubstepMethod method = SubstepMethod::rk4;
  double dt = 1e-3;
};

struct RankPolicy {
  double theta = 1e-6;
  Index r_min = 1;
  Index r_max = 16;
  TruncationRule rule = TruncationRule::frobenius;
};

struct StepReport {
  Index step = 0;
  double time = 0.0;
  Index rank = 0;
  double mass = 0.0;
  IndexSet rows;      // I
  IndexSet cols;      // J
  IndexSet aug_rows;  // augmented I (BUC)
  IndexSet aug_cols;  // augmented J (BUC)
  double wall_ms = 0.0;
  double trunc_tail = 0.0;
  double max_condition = 1.0;  // worst interpolation-matrix condition estimate of the step
};

/// Interpolation matrices whose condition estimate exceeds this abort the step.
inline constexpr double kConditionLimit = 1e12;
/// Largest N_x * N_v the dense-h references accept.
inline constexpr Index kDenseEntryLimit = Index(1) << 22;

/// One step of classical RK4 (or explicit Euler) for Y' = f(t, Y).
template <typename Oracle, typename Derived>
typename Derived::PlainObject rk4_flow(Oracle&& f, const Eigen::MatrixBase<Derived>& Y0, double t0,
                                       double dt, SubstepMethod method = SubstepMethod::rk4) {
  using Mat = typename Derived::PlainObject;
  auto stage = [&](int k, double t, const Mat& Y) {
    Mat F = f(t, Y);
    if (F.rows() != Y0.rows() || F.cols() != Y0.cols()) {
      throw DimensionError("rk4_flow: derivative shape mismatch at stage " + std::to_string(k));
    }
    if (!F.allFinite()) {
      throw NumericalError("rk4_flow: non-finite derivative at stage " + std::to_string(k));
    }
    return F;
  };
  if (method == SubstepMethod::euler) {
    return Mat(Y0 + dt * stage(1, t0, Y0));
  }
  const Mat k1 = stage(1, t0, Y0);
  const Mat k2 = stage(2, t0 + 0.5 * dt, Mat(Y0 + (0.5 * dt) * k1));
  const Mat k3 = stage(3, t0 + 0.5 * dt, Mat(Y0 + (0.5 * dt) * k2));
  const Mat k4 = stage(4, t0 + dt, Mat(Y0 + dt * k3));
  return Mat(Y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Worker count for concurrent substeps: BGK_THREADS if set, else 2.
int worker_count();

std::pair<State, StepReport> ips_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme);

std::pair<State, StepReport> buc_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme, const RankPolicy& policy,
                                      int workers = worker_count());

std::pair<State, StepReport> ops_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme);

std::pair<State, StepReport> bug_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme, const RankPolicy& policy);

Matrix dense_step(const BgkModel& model, const Eigen::Ref<const Matrix>& f,
                  const SubstepScheme& scheme);

}  // namespace bgklr
