#include "bgklr/integrators.hpp"

#include "bgklr/diagnostics.hpp"
#include "bgklr/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <iostream>
#include <limits>

namespace bgklr {

int worker_count() {
  if (const char* env = std::getenv("BGK_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 2;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// LU of an interpolation matrix A = B(idx, :), with its condition estimate.
class InterpolationSolve {
 public:
  InterpolationSolve(const Matrix& A, const char* what) : lu_(A) {
    const double rc = lu_.rcond();
    condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(condition_ <= kConditionLimit)) {
      throw NumericalError(std::string("singular interpolation matrix in ") + what +
                           " (condition estimate " + std::to_string(condition_) + ")");
    }
  }

  // A^{-1} Y
  Matrix left(const Matrix& Y) const { return lu_.solve(Y); }
  // Y A^{-T}
  Matrix right_transpose(const Matrix& Y) const { return lu_.solve(Y.transpose()).transpose(); }

  double condition() const { return condition_; }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  double condition_ = 1.0;
};

State with_orthonormal_factors(const State& s) {
  validate(s);
  State out = s;
  if (!out.x_orthonormal) {
    auto qr = qr_orthonormalize(out.X);
    out.X = std::move(qr.Q);
    out.S = qr.R * out.S;
    out.x_orthonormal = true;
  }
  if (!out.v_orthonormal) {
    auto qr = qr_orthonormalize(out.V);
    out.V = std::move(qr.Q);
    out.S = out.S * qr.R.transpose();
    out.v_orthonormal = true;
  }
  return out;
}

State factored(Matrix X, Matrix S, Matrix V) {
  State s;
  s.X = std::move(X);
  s.S = std::move(S);
  s.V = std::move(V);
  return s;
}

// Orthonormal basis of span[A, B] with m columns. When m < cols(A) + cols(B)
// the leading left singular vectors are used.
Matrix augmented_basis(const Matrix& A, const Matrix& B, Index m, const char* what) {
  Matrix AB(A.rows(), A.cols() + B.cols());
  AB << A, B;
  if (m == AB.cols()) return qr_orthonormalize(AB).Q;
  std::cerr << "warning: " << what << " augmentation clipped from " << AB.cols() << " to " << m
            << " columns\n";
  Eigen::BDCSVD<Matrix> svd(AB, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(m);
}

void finish_report(StepReport& rep, const BgkModel& model, const State& s,
                   Clock::time_point start) {
  rep.time = s.time;
  rep.rank = s.rank();
  rep.mass = mass(model, s);
  rep.wall_ms = elapsed_ms(start);
}

void check_scheme(const SubstepScheme& scheme, const char* what) {
  if (!(scheme.dt > 0.0) || !std::isfinite(scheme.dt)) {
    throw ConfigError(std::string(what) + ": time step must be positive and finite");
  }
}

void check_dense_guard(const BgkModel& model, const char* what) {
  if (model.nx() * model.nv() > kDenseEntryLimit) {
    throw ConfigError(std::string(what) + ": N_x * N_v exceeds the dense reference limit");
  }
}

// Uniform grids carry constant quadrature weights; the Galerkin references
// work with bases orthonormal in the weighted inner product.
double uniform_weight(const ProductGrid& grid, const char* what) {
  const Vector& w = grid.weights();
  const double w0 = w(0);
  if ((w.array() - w0).abs().maxCoeff() > 1e-14 * std::abs(w0)) {
    throw ConfigError(std::string(what) + ": quadrature weights are not uniform");
  }
  return w0;
}

}  // namespace

std::pair<State, StepReport> ips_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme) {
  check_scheme(scheme, "ips_step");
  const auto start = Clock::now();
  const State s0 = with_orthonormal_factors(state);
  const Index r = s0.rank();
  const Matrix Ir = Matrix::Identity(r, r);
  const double t0 = s0.time;
  const double dt = scheme.dt;
  StepReport rep;

  // K-step
  const IndexSet J = deim(s0.V, GridSide::v);
  const InterpolationSolve VJ(s0.V(J.indices, Eigen::all), "IPS K-step");
  const Matrix K1 = rk4_flow(
      [&](double, const Matrix& K) {
        return VJ.right_transpose(rhs_cols(model, factored(K, Ir, s0.V), J));
      },
      Matrix(s0.X * s0.S), t0, dt, scheme.method);
  auto kqr = qr_orthonormalize(K1);
  const Matrix& X1 = kqr.Q;

  // S-step
  const IndexSet I = deim(X1, GridSide::x);
  const InterpolationSolve XI(X1(I.indices, Eigen::all), "IPS S-step");
  const TransportFactors dX1 = transport_factors(model, X1);
  const Matrix S_tilde = rk4_flow(
      [&](double, const Matrix& S) {
        return Matrix(-XI.left(VJ.right_transpose(rhs_block(model, factored(X1, S, s0.V), I, J, &dX1))));
      },
      kqr.R, t0, dt, scheme.method);

  // L-step
  const Matrix L1 = rk4_flow(
      [&](double, const Matrix& L) {
        return Matrix(XI.left(rhs_rows(model, factored(X1, Ir, L), I, &dX1)).transpose());
      },
      Matrix(s0.V * S_tilde.transpose()), t0, dt, scheme.method);
  auto lqr = qr_orthonormalize(L1);

  State out;
  out.X = X1;
  out.V = std::move(lqr.Q);
  out.S = lqr.R.transpose();
  out.x_orthonormal = out.v_orthonormal = true;
  out.time = t0 + dt;

  rep.rows = I;
  rep.cols = J;
  rep.max_condition = std::max(VJ.condition(), XI.condition());
  finish_report(rep, model, out, start);
  return {std::move(out), std::move(rep)};
}

std::pair<State, StepReport> buc_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme, const RankPolicy& policy,
                                      int workers) {
  check_scheme(scheme, "buc_step");
  const auto start = Clock::now();
  const State s0 = with_orthonormal_factors(state);
  const Index r = s0.rank();
  const Matrix Ir = Matrix::Identity(r, r);
  const double t0 = s0.time;
  const double dt = scheme.dt;
  StepReport rep;

  const IndexSet J = deim(s0.V, GridSide::v);
  const IndexSet I = deim(s0.X, GridSide::x);
  const InterpolationSolve VJ(s0.V(J.indices, Eigen::all), "BUC K-step");
  const InterpolationSolve XI(s0.X(I.indices, Eigen::all), "BUC L-step");

  auto k_step = [&]() {
    return rk4_flow(
        [&](double, const Matrix& K) {
          return VJ.right_transpose(rhs_cols(model, factored(K, Ir, s0.V), J));
        },
        Matrix(s0.X * s0.S), t0, dt, scheme.method);
  };
  auto l_step = [&]() {
    const TransportFactors dX0 = transport_factors(model, s0.X);
    return rk4_flow(
        [&](double, const Matrix& L) {
          return Matrix(XI.left(rhs_rows(model, factored(s0.X, Ir, L), I, &dX0)).transpose());
        },
        Matrix(s0.V * s0.S.transpose()), t0, dt, scheme.method);
  };
  Matrix K1, L1;
  if (workers >= 2) {
    auto l_future = std::async(std::launch::async, l_step);
    K1 = k_step();
    L1 = l_future.get();
  } else {
    K1 = k_step();
    L1 = l_step();
  }

  const Index m = std::min({2 * r, model.nx(), model.nv()});
  const Matrix Xhat = augmented_basis(K1, s0.X, m, "BUC K-step");
  const Matrix Vhat = augmented_basis(L1, s0.V, m, "BUC L-step");
  const Matrix Shat0 = (Xhat.transpose() * s0.X) * s0.S * (Vhat.transpose() * s0.V).transpose();

  // S-step: collocation on the augmented bases
  const IndexSet Ihat = deim(Xhat, GridSide::x);
  const IndexSet Jhat = deim(Vhat, GridSide::v);
  const InterpolationSolve XIhat(Xhat(Ihat.indices, Eigen::all), "BUC S-step rows");
  const InterpolationSolve VJhat(Vhat(Jhat.indices, Eigen::all), "BUC S-step cols");
  const TransportFactors dXhat = transport_factors(model, Xhat);
  const Matrix Shat1 = rk4_flow(
      [&](double, const Matrix& S) {
        return XIhat.left(VJhat.right_transpose(
            rhs_block(model, factored(Xhat, S, Vhat), Ihat, Jhat, &dXhat)));
      },
      Shat0, t0, dt, scheme.method);

  // Truncate
  const auto tr = svd_truncate(Shat1, policy.theta, policy.r_min, policy.r_max, policy.rule);
  State out;
  out.X = Xhat * tr.P;
  out.V = Vhat * tr.Q;
  out.S = tr.sigma.asDiagonal();
  out.x_orthonormal = out.v_orthonormal = true;
  out.time = t0 + dt;

  rep.rows = I;
  rep.cols = J;
  rep.aug_rows = Ihat;
  rep.aug_cols = Jhat;
  rep.trunc_tail = tr.tail;
  rep.max_condition =
      std::max({VJ.condition(), XI.condition(), XIhat.condition(), VJhat.condition()});
  finish_report(rep, model, out, start);
  return {std::move(out), std::move(rep)};
}

std::pair<State, StepReport> ops_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme) {
  check_scheme(scheme, "ops_step");
  check_dense_guard(model, "ops_step");
  const auto start = Clock::now();
  const State s0 = with_orthonormal_factors(state);
  const double wx = uniform_weight(model.x_grid(), "ops_step");
  const double wv = uniform_weight(model.v_grid(), "ops_step");
  const double sx = std::sqrt(wx), sv = std::sqrt(wv);
  const double t0 = s0.time;
  const double dt = scheme.dt;

  // Bases orthonormal in the quadrature inner product.
  const Matrix Vw0 = s0.V / sv;
  const Matrix Sw0 = s0.S * (sx * sv);

  // K-step: dK/dt = h W_v V
  const Matrix K1 = rk4_flow(
      [&](double, const Matrix& K) {
        return Matrix(rhs_full(model, K * Vw0.transpose()) * (wv * Vw0));
      },
      Matrix((s0.X / sx) * Sw0), t0, dt, scheme.method);
  auto kqr = qr_orthonormalize(Matrix(sx * K1));
  const Matrix Xw1 = kqr.Q / sx;

  // S-step: dS/dt = -X^T W_x h W_v V
  const Matrix S_tilde = rk4_flow(
      [&](double, const Matrix& S) {
        const Matrix h = rhs_full(model, Xw1 * S * Vw0.transpose());
        return Matrix(-(wx * Xw1.transpose()) * h * (wv * Vw0));
      },
      kqr.R, t0, dt, scheme.method);

  // L-step: dL/dt = h^T W_x X
  const Matrix L1 = rk4_flow(
      [&](double, const Matrix& L) {
        return Matrix(rhs_full(model, Xw1 * L.transpose()).transpose() * (wx * Xw1));
      },
      Matrix(Vw0 * S_tilde.transpose()), t0, dt, scheme.method);
  auto lqr = qr_orthonormalize(Matrix(sv * L1));

  State out;
  out.X = kqr.Q;
  out.V = std::move(lqr.Q);
  out.S = lqr.R.transpose() / (sx * sv);
  out.x_orthonormal = out.v_orthonormal = true;
  out.time = t0 + dt;
  StepReport rep;
  finish_report(rep, model, out, start);
  return {std::move(out), std::move(rep)};
}

std::pair<State, StepReport> bug_step(const BgkModel& model, const State& state,
                                      const SubstepScheme& scheme, const RankPolicy& policy) {
  check_scheme(scheme, "bug_step");
  check_dense_guard(model, "bug_step");
  const auto start = Clock::now();
  const State s0 = with_orthonormal_factors(state);
  const double wx = uniform_weight(model.x_grid(), "bug_step");
  const double wv = uniform_weight(model.v_grid(), "bug_step");
  const double sx = std::sqrt(wx), sv = std::sqrt(wv);
  const Index r = s0.rank();
  const double t0 = s0.time;
  const double dt = scheme.dt;

  const Matrix Xw0 = s0.X / sx;
  const Matrix Vw0 = s0.V / sv;
  const Matrix Sw0 = s0.S * (sx * sv);

  const Matrix K1 = rk4_flow(
      [&](double, const Matrix& K) {
        return Matrix(rhs_full(model, K * Vw0.transpose()) * (wv * Vw0));
      },
      Matrix(Xw0 * Sw0), t0, dt, scheme.method);
  const Matrix L1 = rk4_flow(
      [&](double, const Matrix& L) {
        return Matrix(rhs_full(model, Xw0 * L.transpose()).transpose() * (wx * Xw0));
      },
      Matrix(Vw0 * Sw0.transpose()), t0, dt, scheme.method);

  const Index m = std::min({2 * r, model.nx(), model.nv()});
  // Weighted-orthonormal augmented bases: Xhat_w = Q / sx with Q orthonormal.
  const Matrix Qx = augmented_basis(Matrix(sx * K1), s0.X, m, "BUG K-step");
  const Matrix Qv = augmented_basis(Matrix(sv * L1), s0.V, m, "BUG L-step");
  const Matrix Xhat_w = Qx / sx;
  const Matrix Vhat_w = Qv / sv;
  const Matrix Mhat = Qx.transpose() * s0.X;
  const Matrix Nhat = Qv.transpose() * s0.V;

  const Matrix Shat1 = rk4_flow(
      [&](double, const Matrix& S) {
        const Matrix h = rhs_full(model, Xhat_w * S * Vhat_w.transpose());
        return Matrix((wx * Xhat_w.transpose()) * h * (wv * Vhat_w));
      },
      Matrix(Mhat * Sw0 * Nhat.transpose()), t0, dt, scheme.method);

  const auto tr = svd_truncate(Shat1, policy.theta, policy.r_min, policy.r_max, policy.rule);
  State out;
  out.X = Qx * tr.P;
  out.V = Qv * tr.Q;
  out.S = tr.sigma.asDiagonal();
  out.S /= (sx * sv);
  out.x_orthonormal = out.v_orthonormal = true;
  out.time = t0 + dt;
  StepReport rep;
  rep.trunc_tail = tr.tail / (sx * sv);
  finish_report(rep, model, out, start);
  return {std::move(out), std::move(rep)};
}

Matrix dense_step(const BgkModel& model, const Eigen::Ref<const Matrix>& f,
                  const SubstepScheme& scheme) {
  check_scheme(scheme, "dense_step");
  check_dense_guard(model, "dense_step");
  if (!f.allFinite()) throw NumericalError("dense_step: non-finite state");
  return rk4_flow([&](double, const Matrix& g) { return rhs_full(model, g); }, Matrix(f), 0.0,
                  scheme.dt, scheme.method);
}

}  // namespace bgklr
