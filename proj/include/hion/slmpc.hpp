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

#include "hion/simulator.hpp"
#include "hion/systems.hpp"

namespace hion {

/// Successive-linearization MPC baseline: per-iteration Jacobian
/// linearization, forward-Euler discretized horizon, zero-order-hold control
/// from a dense least-squares solve of the tracking Lagrangian.
struct SlmpcConfig {
  double horizon = 2.5;
  int n_steps = 25;
  double delta = 0.5;        // sampling period between replans
  CostSpec cost{CostId::compare, 1.0};
  std::optional<double> u_bound;  // magnitude clamp, disabled by default

  void validate() const;
};

struct Linearization {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d B = Eigen::Vector2d::Zero();
  Eigen::Vector2d c = Eigen::Vector2d::Zero();  // affine drift f(x,u) - Ax - Bu
};

/// Analytic Jacobians of the dynamics at a point.
Linearization linearize(SystemId system, const State& x, double u);

/// Internal row layout of the stacked least squares; the solution is
/// independent of it (asserted in tests).
enum class RowStacking { interleaved, grouped };

/// First control of the zero-order-hold sequence minimizing the discretized
/// quadratic Lagrangian over the horizon (Tikhonov-regularized dense solve).
double solve_step(SystemId system, const State& x_now, double x_r, const SlmpcConfig& cfg,
                  RowStacking stacking = RowStacking::interleaved);

/// Plugs the baseline into the closed loop through the same phase contract as
/// the neural controller; the control over a phase is a constant.
class SlmpcPolicy : public PhasePolicy {
 public:
  SlmpcPolicy(SystemId system, const SlmpcConfig& cfg) : system_(system), cfg_(cfg) {
    cfg_.validate();
  }
  void start_phase(const State& x_o, double x_r) override;
  double control(double) override { return u_; }
  State estimate(double t_local) override;
  State costate(double) override { return State::Zero(); }
  double horizon() const override { return std::numeric_limits<double>::infinity(); }

 private:
  SystemId system_;
  SlmpcConfig cfg_;
  State xo_ = State::Zero();
  double u_ = 0.0;
};

}  // namespace hion
