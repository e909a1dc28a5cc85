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

#include "hion/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace hion {

Sampling Sampling::parse(const std::string& text) {
  if (text == "realtime") return Sampling::realtime();
  if (text == "tf") return Sampling::horizon();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(v > 0.0)) {
    throw ConfigError("scenario.sampling_period: expected \"realtime\", \"tf\" or a positive "
                      "number, got \"" + text + "\"");
  }
  return Sampling::every(v);
}

std::string Sampling::label() const {
  switch (kind) {
    case Kind::realtime: return "realtime";
    case Kind::tf: return "tf";
    case Kind::period: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%g", period);
      return buf;
    }
  }
  return "?";
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw ConfigError("scenario.duration must be > 0");
  if (!(integrator_step > 0.0)) throw ConfigError("scenario.integrator_step must be > 0");
  if (sampling.kind == Sampling::Kind::period) {
    if (!(sampling.period > 0.0)) throw ConfigError("scenario.sampling_period must be > 0");
    if (integrator_step > sampling.period + 1e-12) {
      throw ConfigError("scenario.integrator_step must not exceed the sampling period");
    }
  }
  if (schedule.empty()) throw ConfigError("scenario.reference_schedule must not be empty");
  if (schedule.front().time != 0.0) {
    throw ConfigError("scenario.reference_schedule must start at time 0");
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i].time > schedule[i - 1].time)) {
      throw ConfigError("scenario.reference_schedule times must be strictly increasing");
    }
  }
  validate_cost(system, cost);
}

void HionPolicy::start_phase(const State& x_o, double x_r) {
  xo_ = x_o;
  xr_ = x_r;
  cache_valid_ = false;
}

const ForwardResult& HionPolicy::eval(double t_local) {
  if (!cache_valid_ || cached_t_ != t_local) {
    cached_ = forward(*ctrl_, t_local, xo_, xr_);
    if (cached_.extrapolated) {
      throw NumericError("closed loop queried the controller outside [0, t_f]");
    }
    cached_t_ = t_local;
    cache_valid_ = true;
  }
  return cached_;
}

double HionPolicy::control(double t_local) { return eval(t_local).u[0]; }

State HionPolicy::estimate(double t_local) {
  const ForwardResult& r = eval(t_local);
  return State(r.x0[0], r.x0[1]);
}

State HionPolicy::costate(double t_local) { return eval(t_local).costate_value(); }

State rk4_step(SystemId system, const State& x, const std::function<double(double)>& u_of_local,
               double t_local, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be > 0");
  const double u1 = u_of_local(t_local);
  const double u2 = u_of_local(t_local + 0.5 * dt);
  const double u3 = u_of_local(t_local + dt);
  const State k1 = dynamics_f(system, x, u1);
  const State k2 = dynamics_f(system, x + 0.5 * dt * k1, u2);
  const State k3 = dynamics_f(system, x + 0.5 * dt * k2, u2);
  const State k4 = dynamics_f(system, x + dt * k3, u3);
  State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw NumericError("simulation aborted: non-finite state after t_local=" +
                       std::to_string(t_local));
  }
  return next;
}

namespace {

long steps_on_grid(double value, double h, const char* what) {
  const double raw = value / h;
  const long n = std::lround(raw);
  if (n < 0 || std::abs(raw - static_cast<double>(n)) > 1e-6) {
    throw ConfigError(std::string(what) + " must be a multiple of the integrator step");
  }
  return n;
}

}  // namespace

RunResult run_closed_loop(PhasePolicy& policy, const Scenario& scenario) {
  scenario.validate();
  const double h = scenario.integrator_step;
  const long n_steps = steps_on_grid(scenario.duration, h, "scenario.duration");
  if (n_steps < 1) throw ConfigError("scenario.duration too short for the integrator step");

  long obs_stride = 1;
  switch (scenario.sampling.kind) {
    case Sampling::Kind::realtime: obs_stride = 1; break;
    case Sampling::Kind::tf:
      obs_stride = steps_on_grid(policy.horizon(), h, "controller horizon");
      break;
    case Sampling::Kind::period:
      obs_stride = steps_on_grid(scenario.sampling.period, h, "scenario.sampling_period");
      break;
  }
  if (obs_stride < 1) throw ConfigError("sampling period too short for the integrator step");

  const double horizon = policy.horizon();
  const long horizon_stride = std::isfinite(horizon)
                                  ? steps_on_grid(horizon, h, "controller horizon")
                                  : std::numeric_limits<long>::max();

  // Reference schedule in grid indices.
  std::vector<std::pair<long, double>> sched;
  sched.reserve(scenario.schedule.size());
  for (const ReferenceStep& s : scenario.schedule) {
    sched.emplace_back(steps_on_grid(s.time, h, "scenario.reference_schedule time"), s.value);
  }

  RunResult out;
  out.trajectory.rows.reserve(static_cast<std::size_t>(n_steps) + 1);

  State x = scenario.initial_state;
  std::size_t sched_pos = 0;
  double x_ref = sched.front().second;
  int phase = 0;
  long phase_start = 0;
  long last_obs = 0;

  policy.start_phase(x, x_ref);
  bool observed_here = true;

  for (long i = 0; i <= n_steps; ++i) {
    if (i > 0) {
      observed_here = false;
      const bool obs_due = (i - last_obs) == obs_stride;
      const bool ref_due = sched_pos + 1 < sched.size() && sched[sched_pos + 1].first == i;
      const bool rearm_due = (i - phase_start) == horizon_stride;
      if (i < n_steps && (obs_due || ref_due || rearm_due)) {
        if (ref_due) {
          ++sched_pos;
          x_ref = sched[sched_pos].second;
        }
        State x_o;
        if (obs_due) {
          x_o = x;  // read the true plant
          last_obs = i;
          observed_here = true;
        } else {
          // Mid-window reference change or horizon re-arm: hand off the
          // estimated state; the true plant keeps integrating regardless.
          x_o = policy.estimate(static_cast<double>(i - phase_start) * h);
        }
        ++phase;
        phase_start = i;
        policy.start_phase(x_o, x_ref);
      } else if (ref_due) {
        // Reference steps on the final row only relabel the active reference.
        ++sched_pos;
        x_ref = sched[sched_pos].second;
      }
    }

    const double t_local = static_cast<double>(i - phase_start) * h;
    TrajectoryRow row;
    row.t = static_cast<double>(i) * h;
    row.x = x;
    row.u = policy.control(t_local);
    row.lambda = policy.costate(t_local);
    row.x_ref = x_ref;
    row.phase = phase;
    row.observed = observed_here;
    out.trajectory.rows.push_back(row);

    if (i < n_steps) {
      auto u_fn = [&policy](double tl) { return policy.control(tl); };
      x = rk4_step(scenario.system, x, u_fn, t_local, h);
    }
  }

  out.metrics = compute_metrics(out.trajectory, scenario.system, scenario.cost);
  return out;
}

Metrics compute_metrics(const Trajectory& traj, SystemId system, const CostSpec& cost) {
  Metrics m;
  if (traj.rows.size() < 2) return m;
  double prev_L = 0.0, prev_T = 0.0;
  bool have_prev = false;
  double prev_t = 0.0;
  for (const TrajectoryRow& row : traj.rows) {
    const double L = lagrangian(system, cost, row.x, row.x_ref, row.u);
    const double e = row.x[0] - row.x_ref;
    const double T = e * e;
    if (have_prev) {
      const double dt = row.t - prev_t;
      m.J += 0.5 * (prev_L + L) * dt;
      m.tracking += 0.5 * (prev_T + T) * dt;
    }
    prev_L = L;
    prev_T = T;
    prev_t = row.t;
    have_prev = true;
  }
  return m;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trajectory: " + path);
  out << "t,x0,x1,u,lambda0,lambda1,x_ref,phase,observed\n";
  for (const TrajectoryRow& r : traj.rows) {
    out << format_g17(r.t) << ',' << format_g17(r.x[0]) << ',' << format_g17(r.x[1]) << ','
        << format_g17(r.u) << ',' << format_g17(r.lambda[0]) << ',' << format_g17(r.lambda[1])
        << ',' << format_g17(r.x_ref) << ',' << r.phase << ',' << (r.observed ? 1 : 0) << '\n';
  }
}

}  // namespace hion
