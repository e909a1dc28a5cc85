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

#include "support/shooting.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace hion::test {

namespace {

// Augmented state (x0, x1, l0, l1, J) under the optimality ODEs:
//   x0' = x1, x1' = u = -l1, l0' = 0, l1' = -(2 x1 + l0), J' = u^2/2 + x1^2.
using Aug = Eigen::Matrix<double, 5, 1>;

Aug rhs(const Aug& s) {
  Aug d;
  const double x1 = s[1];
  const double l0 = s[2];
  const double l1 = s[3];
  const double u = -l1;
  d[0] = x1;
  d[1] = u;
  d[2] = 0.0;
  d[3] = -(2.0 * x1 + l0);
  d[4] = 0.5 * u * u + x1 * x1;
  return d;
}

Aug integrate(const State& x_o, const Eigen::Vector2d& lam0, double t_f, double dt,
              ShootingSolution* record) {
  Aug s;
  s << x_o[0], x_o[1], lam0[0], lam0[1], 0.0;
  const long n = std::lround(t_f / dt);
  const double h = t_f / static_cast<double>(n);
  for (long i = 0; i <= n; ++i) {
    if (record) {
      record->t.push_back(static_cast<double>(i) * h);
      record->x.emplace_back(s[0], s[1]);
      record->lambda.emplace_back(s[2], s[3]);
      record->u.push_back(-s[3]);
    }
    if (i == n) break;
    const Aug k1 = rhs(s);
    const Aug k2 = rhs(s + 0.5 * h * k1);
    const Aug k3 = rhs(s + 0.5 * h * k2);
    const Aug k4 = rhs(s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

Eigen::Vector2d boundary_mismatch(const State& x_o, const Eigen::Vector2d& lam0, double x_r,
                                  double t_f, double dt) {
  const Aug end = integrate(x_o, lam0, t_f, dt, nullptr);
  return Eigen::Vector2d(end[0] - x_r, end[3]);
}

}  // namespace

ShootingSolution solve_linear_lq_shooting(const State& x_o, double x_r, double t_f, double dt) {
  Eigen::Vector2d lam0 = Eigen::Vector2d::Zero();
  // The boundary map is affine in the unknowns, so Newton with a
  // finite-difference Jacobian lands in one or two iterations.
  for (int it = 0; it < 8; ++it) {
    const Eigen::Vector2d f = boundary_mismatch(x_o, lam0, x_r, t_f, dt);
    if (f.norm() < 1e-11) break;
    Eigen::Matrix2d Jm;
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d lp = lam0, lm = lam0;
      lp[k] += h;
      lm[k] -= h;
      Jm.col(k) = (boundary_mismatch(x_o, lp, x_r, t_f, dt) -
                   boundary_mismatch(x_o, lm, x_r, t_f, dt)) /
                  (2.0 * h);
    }
    lam0 -= Jm.fullPivLu().solve(f);
  }
  ShootingSolution sol;
  const Aug end = integrate(x_o, lam0, t_f, dt, &sol);
  sol.J = end[4];
  sol.terminal_residual = std::abs(end[0] - x_r);
  sol.costate_residual = std::abs(end[3]);
  return sol;
}

}  // namespace hion::test
