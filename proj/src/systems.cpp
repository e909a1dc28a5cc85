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

#include "hion/systems.hpp"

namespace hion {

std::string to_string(SystemId id) {
  switch (id) {
    case SystemId::linear2: return "linear2";
    case SystemId::vanderpol: return "vanderpol";
  }
  return "?";
}

std::string to_string(CostId id) {
  switch (id) {
    case CostId::linear_quadratic: return "linear_quadratic";
    case CostId::vdp_min_speed: return "vdp_min_speed";
    case CostId::vdp_track: return "vdp_track";
    case CostId::compare: return "compare";
  }
  return "?";
}

SystemId system_from_string(const std::string& s) {
  if (s == "linear2") return SystemId::linear2;
  if (s == "vanderpol") return SystemId::vanderpol;
  throw ConfigError("unknown system id: \"" + s + "\"");
}

CostId cost_from_string(const std::string& s) {
  if (s == "linear_quadratic") return CostId::linear_quadratic;
  if (s == "vdp_min_speed") return CostId::vdp_min_speed;
  if (s == "vdp_track") return CostId::vdp_track;
  if (s == "compare") return CostId::compare;
  throw ConfigError("unknown cost id: \"" + s + "\"");
}

SystemSpec system_spec(SystemId id) {
  SystemSpec s;
  s.name = to_string(id);
  switch (id) {
    case SystemId::linear2:
      // Double integrator: f = (x1, u). f never references x0, so the
      // primitive state is invariant under translation.
      s.t_f = 2.0;
      s.invariant_flags = {true};
      break;
    case SystemId::vanderpol:
      s.t_f = 5.0;
      s.invariant_flags = {false};
      break;
  }
  return s;
}

void validate_cost(SystemId system, const CostSpec& cost) {
  if (cost.kappa < 0.0) throw ConfigError("cost.kappa must be >= 0");
  const bool ok = (system == SystemId::linear2 && cost.id == CostId::linear_quadratic) ||
                  (system == SystemId::vanderpol &&
                   (cost.id == CostId::vdp_min_speed || cost.id == CostId::vdp_track ||
                    cost.id == CostId::compare));
  if (!ok) {
    throw ConfigError("cost \"" + to_string(cost.id) + "\" is not valid for system \"" +
                      to_string(system) + "\"");
  }
}

State dynamics_f(SystemId id, const State& x, double u) {
  switch (id) {
    case SystemId::linear2:
      return State(x[1], u);
    case SystemId::vanderpol:
      return State(x[1], (1.0 - x[0] * x[0]) * x[1] - x[0] + u);
  }
  throw ConfigError("dynamics_f: unknown system");
}

double lagrangian(SystemId system, const CostSpec& cost, const State& x, double x_r, double u) {
  validate_cost(system, cost);
  switch (cost.id) {
    case CostId::linear_quadratic:
      return 0.5 * u * u + x[1] * x[1];
    case CostId::vdp_min_speed:
      return cost.kappa * x[1] * x[1];
    case CostId::vdp_track:
      return cost.kappa * (x[0] - x_r) * (x[0] - x_r);
    case CostId::compare:
      return (x[0] - x_r) * (x[0] - x_r) + x[1] * x[1] / 10.0;
  }
  throw ConfigError("lagrangian: unknown cost");
}

HamiltonianPartials hamiltonian_partials(SystemId system, const CostSpec& cost, const State& x,
                                         double x_r, double u, const State& lambda) {
  validate_cost(system, cost);
  HamiltonianPartials out;
  const State f = dynamics_f(system, x, u);
  out.H = lagrangian(system, cost, x, x_r, u) + lambda.dot(f);
  switch (system) {
    case SystemId::linear2:
      // H = u^2/2 + x1^2 + l0 x1 + l1 u
      out.dH_dx = State(0.0, 2.0 * x[1] + lambda[0]);
      out.dH_du = u + lambda[1];
      break;
    case SystemId::vanderpol: {
      // f1 = (1 - x0^2) x1 - x0 + u
      const double df1_dx0 = -2.0 * x[0] * x[1] - 1.0;
      const double df1_dx1 = 1.0 - x[0] * x[0];
      double dL_dx0 = 0.0, dL_dx1 = 0.0;
      switch (cost.id) {
        case CostId::vdp_min_speed: dL_dx1 = 2.0 * cost.kappa * x[1]; break;
        case CostId::vdp_track: dL_dx0 = 2.0 * cost.kappa * (x[0] - x_r); break;
        case CostId::compare:
          dL_dx0 = 2.0 * (x[0] - x_r);
          dL_dx1 = x[1] / 5.0;
          break;
        default: throw ConfigError("hamiltonian_partials: unknown combination");
      }
      out.dH_dx = State(dL_dx0 + lambda[1] * df1_dx0, dL_dx1 + lambda[0] + lambda[1] * df1_dx1);
      out.dH_du = lambda[1];
      break;
    }
  }
  return out;
}

HamiltonianSecondPartials hamiltonian_second_partials(SystemId system, const CostSpec& cost,
                                                      const State& x, double /*x_r*/, double /*u*/,
                                                      const State& lambda) {
  validate_cost(system, cost);
  HamiltonianSecondPartials out;
  auto& J = out.J;  // rows: dHdx0, dHdx1, dHdu; cols: x0, x1, u, l0, l1
  switch (system) {
    case SystemId::linear2:
      J(1, 1) = 2.0;  // d(dHdx1)/dx1
      J(1, 3) = 1.0;  // d(dHdx1)/dl0
      J(2, 2) = 1.0;  // d(dHdu)/du
      J(2, 4) = 1.0;  // d(dHdu)/dl1
      break;
    case SystemId::vanderpol: {
      double d2L_dx0 = 0.0, d2L_dx1 = 0.0;
      switch (cost.id) {
        case CostId::vdp_min_speed: d2L_dx1 = 2.0 * cost.kappa; break;
        case CostId::vdp_track: d2L_dx0 = 2.0 * cost.kappa; break;
        case CostId::compare:
          d2L_dx0 = 2.0;
          d2L_dx1 = 1.0 / 5.0;
          break;
        default: throw ConfigError("hamiltonian_second_partials: unknown combination");
      }
      J(0, 0) = d2L_dx0 + lambda[1] * (-2.0 * x[1]);
      J(0, 1) = lambda[1] * (-2.0 * x[0]);
      J(0, 4) = -2.0 * x[0] * x[1] - 1.0;
      J(1, 0) = lambda[1] * (-2.0 * x[0]);
      J(1, 1) = d2L_dx1;
      J(1, 3) = 1.0;
      J(1, 4) = 1.0 - x[0] * x[0];
      J(2, 4) = 1.0;
      break;
    }
  }
  return out;
}

State sample_observed(SystemId /*id*/, Rng& rng) {
  const double x0 = rng.uniform(-5.0, 5.0);
  const double x1 = rng.normal();
  return State(x0, x1);
}

double sample_reference(const State& x_o, Rng& rng) { return x_o[0] + rng.normal(); }

}  // namespace hion
