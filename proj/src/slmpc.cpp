/*
 Copyright 2026 The Hion Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "hion/slmpc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace hion {

namespace {
constexpr double kTikhonov = 1e-9;
}

void SlmpcConfig::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("slmpc.horizon must be > 0");
  if (n_steps < 2) throw ConfigError("slmpc.n_steps must be >= 2");
  if (!(delta > 0.0)) throw ConfigError("slmpc.delta must be > 0");
  if (u_bound && !(*u_bound > 0.0)) throw ConfigError("slmpc.u_bound must be > 0 when set");
  if (cost.kappa < 0.0) throw ConfigError("slmpc.cost kappa must be >= 0");
}

Linearization linearize(SystemId system, const State& x, double u) {
  Linearization lin;
  switch (system) {
    case SystemId::linear2:
      lin.A << 0.0, 1.0, 0.0, 0.0;
      lin.B << 0.0, 1.0;
      lin.c.setZero();
      break;
    case SystemId::vanderpol:
      lin.A << 0.0, 1.0, -2.0 * x[0] * x[1] - 1.0, 1.0 - x[0] * x[0];
      lin.B << 0.0, 1.0;
      lin.c = dynamics_f(system, x, u) - lin.A * x - lin.B * u;
      break;
  }
  return lin;
}

namespace {

// Quadratic row weights of the discretized Lagrangian: position tracking,
// velocity, and direct control cost.
struct CostRows {
  double wx0 = 0.0, wx1 = 0.0, wu = 0.0;
};

CostRows cost_rows(const CostSpec& cost) {
  switch (cost.id) {
    case CostId::compare: return {1.0, 0.1, 0.0};
    case CostId::vdp_track: return {cost.kappa, 0.0, 0.0};
    case CostId::vdp_min_speed: return {0.0, cost.kappa, 0.0};
    case CostId::linear_quadratic: return {0.0, 1.0, 0.5};
  }
  throw ConfigError("slmpc: unknown cost");
}

}  // namespace

double solve_step(SystemId system, const State& x_now, double x_r, const SlmpcConfig& cfg,
                  RowStacking stacking) {
  cfg.validate();
  const int N = cfg.n_steps;
  const double h = cfg.horizon / static_cast<double>(N);
  // Zero-order-hold moves are blocked to the sampling period so the executed
  // first control matches its role in the plan; the finer Euler grid only
  // discretizes the dynamics underneath.
  const int steps_per_move = std::max(1, static_cast<int>(std::lround(cfg.delta / h)));
  const int M = (N + steps_per_move - 1) / steps_per_move;
  const Linearization lin = linearize(system, x_now, 0.0);
  const Eigen::Matrix2d Ad = Eigen::Matrix2d::Identity() + h * lin.A;
  const Eigen::Vector2d Bd = h * lin.B;
  const Eigen::Vector2d cd = h * lin.c;

  // x_i = m_i + S_i u with S_0 = 0; forward recursion over the horizon.
  const CostRows w = cost_rows(cfg.cost);
  const double sx0 = std::sqrt(w.wx0 * h);
  const double sx1 = std::sqrt(w.wx1 * h);
  const double su = std::sqrt(w.wu * h);

  Eigen::MatrixXd rows(2 * N + (w.wu > 0.0 ? M : 0), M);
  Eigen::VectorXd rhs(rows.rows());
  rows.setZero();
  rhs.setZero();

  Eigen::Matrix<double, 2, Eigen::Dynamic> S(2, M);
  S.setZero();
  State m = x_now;
  auto emit_state_rows = [&](int i, const Eigen::Matrix<double, 2, Eigen::Dynamic>& Si,
                             const State& mi) {
    const int r0 = (stacking == RowStacking::interleaved) ? 2 * (i - 1) : (i - 1);
    const int r1 = (stacking == RowStacking::interleaved) ? 2 * (i - 1) + 1 : N + (i - 1);
    rows.row(r0) = sx0 * Si.row(0);
    rhs[r0] = sx0 * (x_r - mi[0]);
    rows.row(r1) = sx1 * Si.row(1);
    rhs[r1] = sx1 * (0.0 - mi[1]);
  };
  for (int i = 1; i <= N; ++i) {
    // advance: x_{i} = Ad x_{i-1} + Bd u_{move(i-1)} + cd
    Eigen::Matrix<double, 2, Eigen::Dynamic> Snext = Ad * S;
    Snext.col((i - 1) / steps_per_move) += Bd;
    S = std::move(Snext);
    m = Ad * m + cd;
    emit_state_rows(i, S, m);
  }
  if (w.wu > 0.0) {
    for (int i = 0; i < M; ++i) {
      rows(2 * N + i, i) = su * std::sqrt(static_cast<double>(steps_per_move));
      // rhs stays 0
    }
  }

  Eigen::MatrixXd G = rows.transpose() * rows;
  G.diagonal().array() += kTikhonov;
  const Eigen::VectorXd rhs_n = rows.transpose() * rhs;

  // Condition diagnostic on the normal equations.
  {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12) {
      std::cerr << "warning: slmpc normal equations ill-conditioned (cond="
                << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity())
                << "), relying on Tikhonov regularization\n";
    }
  }

  const Eigen::VectorXd u = G.ldlt().solve(rhs_n);
  double u0 = u[0];
  if (cfg.u_bound) u0 = std::clamp(u0, -*cfg.u_bound, *cfg.u_bound);
  return u0;
}

void SlmpcPolicy::start_phase(const State& x_o, double x_r) {
  xo_ = x_o;
  u_ = solve_step(system_, x_o, x_r, cfg_);
}

State SlmpcPolicy::estimate(double t_local) {
  // Roll the true nonlinear model forward under the held control; only used
  // for estimated hand-offs, the phase contract does not log it.
  State x = xo_;
  const double h = cfg_.horizon / static_cast<double>(cfg_.n_steps);
  double t = 0.0;
  auto u_fn = [this](double) { return u_; };
  while (t + h <= t_local + 1e-12) {
    x = rk4_step(system_, x, u_fn, t, h);
    t += h;
  }
  const double rem = t_local - t;
  if (rem > 1e-12) x = rk4_step(system_, x, u_fn, t, rem);
  return x;
}

}  // namespace hion
