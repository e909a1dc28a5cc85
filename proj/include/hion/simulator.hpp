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

#include <functional>
#include <string>
#include <vector>

#include "hion/controller.hpp"
#include "hion/systems.hpp"

namespace hion {

/// Sampling period between plant observations. "realtime" observes at every
/// integrator step; "tf" observes once per controller horizon.
struct Sampling {
  enum class Kind { realtime, tf, period };
  Kind kind = Kind::period;
  double period = 0.5;

  static Sampling realtime() { return {Kind::realtime, 0.0}; }
  static Sampling horizon() { return {Kind::tf, 0.0}; }
  static Sampling every(double dt) { return {Kind::period, dt}; }

  static Sampling parse(const std::string& text);
  std::string label() const;  // "realtime", "tf" or the numeric period
};

struct ReferenceStep {
  double time = 0.0;
  double value = 0.0;
};

struct Scenario {
  SystemId system = SystemId::linear2;
  CostSpec cost;
  Sampling sampling;
  double duration = 15.0;
  std::vector<ReferenceStep> schedule;  // strictly increasing times, first at 0
  State initial_state = State::Zero();
  double integrator_step = 0.01;

  void validate() const;
};

struct TrajectoryRow {
  double t = 0.0;
  State x = State::Zero();       // true plant state
  double u = 0.0;
  State lambda = State::Zero();  // controller co-states (zero for baselines)
  double x_ref = 0.0;
  int phase = 0;
  bool observed = false;  // true plant reads only; estimated restarts are not
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
};

struct Metrics {
  double J = 0.0;
  double tracking = 0.0;
};

/// Phase-wise controller contract for the closed loop: given an observation
/// (or estimated hand-off) and the active reference, provide the control,
/// state estimate and co-states over the local phase time.
class PhasePolicy {
 public:
  virtual ~PhasePolicy() = default;
  virtual void start_phase(const State& x_o, double x_r) = 0;
  virtual double control(double t_local) = 0;
  virtual State estimate(double t_local) = 0;   // (x0, x0_dot)
  virtual State costate(double t_local) = 0;
  /// Longest admissible phase; the loop re-arms from the estimated state when
  /// the next observation lies beyond it.
  virtual double horizon() const = 0;
};

class HionPolicy : public PhasePolicy {
 public:
  explicit HionPolicy(const TmanoController& ctrl) : ctrl_(&ctrl) {}
  void start_phase(const State& x_o, double x_r) override;
  double control(double t_local) override;
  State estimate(double t_local) override;
  State costate(double t_local) override;
  double horizon() const override { return ctrl_->t_f; }

 private:
  const ForwardResult& eval(double t_local);
  const TmanoController* ctrl_;
  State xo_ = State::Zero();
  double xr_ = 0.0;
  double cached_t_ = -1.0;
  bool cache_valid_ = false;
  ForwardResult cached_;
};

/// Classical 4-stage Runge-Kutta step of the true dynamics, with the control
/// evaluated at the stage times of the controller's continuous u(t_local).
State rk4_step(SystemId system, const State& x, const std::function<double(double)>& u_of_local,
               double t_local, double dt);

struct RunResult {
  Trajectory trajectory;
  Metrics metrics;
};

/// Closed-loop run: phases begin at observation instants, mid-window
/// reference changes restart from the estimated state without reading the
/// plant, and phases re-arm at the policy horizon so local time never exceeds
/// it.
RunResult run_closed_loop(PhasePolicy& policy, const Scenario& scenario);

/// Trapezoidal transient cost and squared tracking error over the true rows.
Metrics compute_metrics(const Trajectory& traj, SystemId system, const CostSpec& cost);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// 17-significant-digit decimal, the round-trip format used by all CSVs.
std::string format_g17(double v);

}  // namespace hion
