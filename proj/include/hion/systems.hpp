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

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hion/errors.hpp"
#include "hion/jet.hpp"
#include "hion/rng.hpp"

namespace hion {

using State = Eigen::Vector2d;  // both plants are second order in one primitive state

enum class SystemId { linear2, vanderpol };
enum class CostId { linear_quadratic, vdp_min_speed, vdp_track, compare };

std::string to_string(SystemId id);
std::string to_string(CostId id);
SystemId system_from_string(const std::string& s);
CostId cost_from_string(const std::string& s);

/// Static description of an environment.
struct SystemSpec {
  std::string name;
  int n_states = 2;       // state-vector dimension (primitive states and known derivatives)
  int n_controls = 1;
  int ode_order = 2;      // k in the Taylor operator
  int n_primitive = 1;    // primitive (zero-order) states
  int n_reference = 1;    // reference-associated primitive states
  double t_f = 0.0;       // seconds
  std::vector<bool> invariant_flags;  // per primitive state
  int uncontrolled_rows = 0;          // ODE rows not satisfied by the control definition
};

/// Transient-cost selector. kappa modulates the Van der Pol costs; the
/// linear-quadratic and comparison costs have fixed forms.
struct CostSpec {
  CostId id = CostId::linear_quadratic;
  double kappa = 1.0;
};

SystemSpec system_spec(SystemId id);

/// Checks the (system, cost) pairing and kappa >= 0.
void validate_cost(SystemId system, const CostSpec& cost);

/// Dynamics function f of Eq-style state-space form: xdot = f(x, u).
State dynamics_f(SystemId id, const State& x, double u);

/// Control solved from the ODE rows so the estimated trajectory satisfies
/// them exactly. The input jet must carry derivatives to at least ode_order;
/// the result keeps whatever derivative budget remains (order - ode_order).
template <class S>
Jet<S> control_definition(SystemId id, const Jet<S>& x0) {
  const int k = 2;
  if (x0.order() < k) throw ConfigError("control_definition: insufficient jet order");
  const int out_order = x0.order() - k;
  const Jet<S> xdd = derivative(x0, 2);
  switch (id) {
    case SystemId::linear2:
      return xdd;
    case SystemId::vanderpol: {
      const Jet<S> x = truncate(x0, out_order);
      const Jet<S> xd = truncate(derivative(x0, 1), out_order);
      const Jet<S> one = Jet<S>::constant(S(1.0), out_order);
      return xdd - (one - square(x)) * xd + x;
    }
  }
  throw ConfigError("control_definition: unknown system");
}

/// Residuals of every ODE row evaluated on state jets and a given control.
/// For both shipped systems there is exactly one row and it contains a
/// control point, so the subset entering the ODE loss (rows that the control
/// definition cannot cancel) is empty; see SystemSpec::uncontrolled_rows.
template <class S>
std::vector<S> ode_residual(SystemId id, const Jet<S>& x0, const S& u) {
  const int k = 2;
  if (x0.order() < k) throw ConfigError("ode_residual: insufficient jet order");
  switch (id) {
    case SystemId::linear2:
      return {x0[2] - u};
    case SystemId::vanderpol:
      return {x0[2] - (S(1.0) - x0[0] * x0[0]) * x0[1] + x0[0] - u};
  }
  throw ConfigError("ode_residual: unknown system");
}

/// Instantaneous cost rate L(x, x_r, u).
double lagrangian(SystemId system, const CostSpec& cost, const State& x, double x_r, double u);

struct HamiltonianPartials {
  double H = 0.0;
  State dH_dx = State::Zero();
  double dH_du = 0.0;
};

/// Closed forms of H = L + lambda^T f and its first partials.
HamiltonianPartials hamiltonian_partials(SystemId system, const CostSpec& cost, const State& x,
                                         double x_r, double u, const State& lambda);

/// Second partials of H needed to backpropagate through dH/dx and dH/du.
/// Rows are the components of (dH/dx0, dH/dx1, dH/du); columns the
/// differentiation directions (x0, x1, u, lambda0, lambda1).
struct HamiltonianSecondPartials {
  Eigen::Matrix<double, 3, 5> J = Eigen::Matrix<double, 3, 5>::Zero();
};

HamiltonianSecondPartials hamiltonian_second_partials(SystemId system, const CostSpec& cost,
                                                      const State& x, double x_r, double u,
                                                      const State& lambda);

/// Observed-state draw: x0 ~ U(-5, 5), x1 ~ N(0, 1). Draw order is fixed.
State sample_observed(SystemId id, Rng& rng);

/// Reference draw: the reference-associated primitive state plus unit
/// Gaussian noise.
double sample_reference(const State& x_o, Rng& rng);

}  // namespace hion
