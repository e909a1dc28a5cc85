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

#include "hion/pmp.hpp"

#include <cmath>

namespace hion {

LossSet active_losses(const SystemSpec& spec, bool has_reference) {
  LossSet s;
  s.init_state = false;  // Taylor operator pins x_h(0) = x_o regardless of parameters
  s.terminal_state = has_reference;
  s.ode = spec.uncontrolled_rows > 0;
  s.costate_dyn = true;
  s.costate_term = true;
  s.stationarity = true;
  return s;
}

double loss_terminal_state(const Jet<double>& x0_at_tf, double x_r) {
  const double e = x0_at_tf[0] - x_r;
  return e * e;  // one reference-associated state
}

double loss_costate_dynamics(const std::vector<Jet<double>>& lambda, const State& dH_dx) {
  double acc = 0.0;
  const int n = static_cast<int>(lambda.size());
  for (int i = 0; i < n; ++i) {
    const double r = lambda[static_cast<std::size_t>(i)][1] + dH_dx[i];
    acc += r * r;
  }
  return acc / static_cast<double>(n);
}

double loss_costate_terminal(const State& lambda_at_tf) {
  // Non-reference co-states: everything past the reference-associated block.
  const double r = lambda_at_tf[1];
  return r * r;
}

double loss_stationarity(double dH_du) { return dH_du * dH_du; }

BatchEval evaluate_losses(const TmanoController& ctrl, TmanoBatch& batch, const BatchInputs& in,
                          const LossWeights& weights, const LossSet& active, bool with_grad) {
  if (active.init_state || active.ode) {
    throw ConfigError("evaluate_losses: the initial/ODE loss paths apply only to systems "
                      "without the Taylor-operator/control-definition guarantees");
  }
  batch.forward(ctrl, in.t, in.xo, in.xr);
  const Eigen::Index N = batch.cols();
  const Eigen::Index n_tf = static_cast<Eigen::Index>(in.terminal_cols.size());

  const Eigen::ArrayXd x0a = batch.x0_actual();
  const Eigen::ArrayXd& x1 = batch.p(1);
  const Eigen::ArrayXd& u0 = batch.u(0);
  const Eigen::MatrixXd& lam0 = batch.lam(0);
  const Eigen::MatrixXd& lam1 = batch.lam(1);

  std::array<Eigen::ArrayXd, 4> gp;
  std::array<Eigen::ArrayXd, 2> gu;
  std::array<Eigen::MatrixXd, 2> glam;
  if (with_grad) {
    for (auto& a : gp) a = Eigen::ArrayXd::Zero(N);
    for (auto& a : gu) a = Eigen::ArrayXd::Zero(N);
    for (auto& m : glam) m = Eigen::MatrixXd::Zero(2, N);
  }

  // Transient losses over every column (interior samples plus both
  // endpoints), fixed column order.
  double acc_dyn = 0.0;
  double acc_stat = 0.0;
  const double wd = weights.costate_dyn;
  const double wf = weights.stationarity;
  for (Eigen::Index j = 0; j < N; ++j) {
    const State x(x0a[j], x1[j]);
    const State lam(lam0(0, j), lam0(1, j));
    const HamiltonianPartials hp =
        hamiltonian_partials(ctrl.system, ctrl.cost, x, in.xr[j], u0[j], lam);
    const double r0 = lam1(0, j) + hp.dH_dx[0];
    const double r1 = lam1(1, j) + hp.dH_dx[1];
    const double ru = hp.dH_du;
    acc_dyn += 0.5 * (r0 * r0 + r1 * r1);
    acc_stat += ru * ru;
    if (with_grad) {
      const HamiltonianSecondPartials sp =
          hamiltonian_second_partials(ctrl.system, ctrl.cost, x, in.xr[j], u0[j], lam);
      const auto& J = sp.J;
      const double cd = wd / static_cast<double>(N);
      const double cf = wf * 2.0 * ru / static_cast<double>(N);
      // dH/dx rows feed the co-state dynamics residuals; dH/du the
      // stationarity residual. Columns: x0, x1, u, lambda0, lambda1.
      gp[0][j] += cd * (r0 * J(0, 0) + r1 * J(1, 0)) + cf * J(2, 0);
      gp[1][j] += cd * (r0 * J(0, 1) + r1 * J(1, 1)) + cf * J(2, 1);
      gu[0][j] += cd * (r0 * J(0, 2) + r1 * J(1, 2)) + cf * J(2, 2);
      glam[0](0, j) += cd * (r0 * J(0, 3) + r1 * J(1, 3)) + cf * J(2, 3);
      glam[0](1, j) += cd * (r0 * J(0, 4) + r1 * J(1, 4)) + cf * J(2, 4);
      glam[1](0, j) += cd * r0;
      glam[1](1, j) += cd * r1;
    }
  }

  // Terminal losses over the t_f columns.
  double acc_term = 0.0;
  double acc_cterm = 0.0;
  for (const Eigen::Index j : in.terminal_cols) {
    const double e = batch.p(0)[j] - batch.xr_shifted()[j];
    const double l1 = lam0(1, j);
    acc_term += e * e;
    acc_cterm += l1 * l1;
    if (with_grad && n_tf > 0) {
      if (active.terminal_state) {
        gp[0][j] += weights.terminal_state * 2.0 * e / static_cast<double>(n_tf);
      }
      glam[0](1, j) += weights.costate_term * 2.0 * l1 / static_cast<double>(n_tf);
    }
  }

  BatchEval out;
  out.losses.weights = weights;
  out.losses.costate_dyn = acc_dyn / static_cast<double>(N);
  out.losses.stationarity = acc_stat / static_cast<double>(N);
  if (n_tf > 0) {
    if (active.terminal_state) out.losses.terminal_state = acc_term / static_cast<double>(n_tf);
    out.losses.costate_term = acc_cterm / static_cast<double>(n_tf);
  }
  double total = weights.costate_dyn * *out.losses.costate_dyn +
                 weights.stationarity * *out.losses.stationarity;
  if (out.losses.terminal_state) total += weights.terminal_state * *out.losses.terminal_state;
  if (out.losses.costate_term) total += weights.costate_term * *out.losses.costate_term;
  out.losses.total = total;

  if (with_grad) {
    out.grad = batch.backward(ctrl, gp, gu, glam);
  }
  return out;
}

}  // namespace hion
