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

#pragma once

#include <optional>
#include <vector>

#include "hion/controller.hpp"
#include "hion/systems.hpp"

namespace hion {

/// The six mean-square training losses. Names follow their roles; the
/// train.csv columns use the short labels l17b/l17d/l17e/l17f.
struct LossSet {
  bool init_state = false;      // initial boundary (never needed: the Taylor
                                // operator pins the initial condition)
  bool terminal_state = false;  // reference reached at terminal time
  bool ode = false;             // ODE rows without a control point
  bool costate_dyn = false;     // co-state dynamics
  bool costate_term = false;    // non-reference co-states vanish at t_f
  bool stationarity = false;    // dH/du = 0
};

/// Which losses a given problem needs: the initial loss is always excluded
/// (Taylor-operator guarantee), the ODE loss only covers rows the control
/// definition cannot cancel, and the terminal loss drops without a reference.
LossSet active_losses(const SystemSpec& spec, bool has_reference);

struct LossWeights {
  double init_state = 1.0;
  double terminal_state = 1.0;
  double ode = 1.0;
  double costate_dyn = 1.0;
  double costate_term = 1.0;
  double stationarity = 1.0;
};

/// Per-component loss values; inactive components stay absent rather than 0.
struct LossBreakdown {
  std::optional<double> init_state, terminal_state, ode, costate_dyn, costate_term, stationarity;
  double total = 0.0;
  LossWeights weights;
};

// Single-point loss forms (the batched trainer uses the same math over
// columns; these are the contract surface and the unit-test oracle hooks).

/// Mean square over reference-associated states of x_h(t_f) - x_r.
double loss_terminal_state(const Jet<double>& x0_at_tf, double x_r);

/// Mean over states of (lambda_dot_i + dH/dx_i)^2.
double loss_costate_dynamics(const std::vector<Jet<double>>& lambda, const State& dH_dx);

/// Mean square over co-states not associated with a reference at t_f.
double loss_costate_terminal(const State& lambda_at_tf);

/// Mean square over controls of dH/du.
double loss_stationarity(double dH_du);

/// Evaluation columns for one batch: each sample contributes a t_hat = 0
/// column, interior columns, and a t_hat = t_f column (flagged terminal).
struct BatchInputs {
  Eigen::VectorXd t;
  Eigen::Matrix2Xd xo;
  Eigen::VectorXd xr;
  std::vector<Eigen::Index> terminal_cols;
};

struct BatchEval {
  LossBreakdown losses;
  Eigen::VectorXd grad;  // empty when gradients were not requested
};

/// Forward the whole batch, reduce the active losses (fixed column order) and
/// optionally backpropagate the weighted total to parameter gradients.
BatchEval evaluate_losses(const TmanoController& ctrl, TmanoBatch& batch, const BatchInputs& in,
                          const LossWeights& weights, const LossSet& active, bool with_grad);

}  // namespace hion
