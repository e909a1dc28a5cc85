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

#include <doctest.h>

#include <cmath>

#include "hion/slmpc.hpp"

using namespace hion;

TEST_CASE("linearize closed forms") {
  SUBCASE("double integrator anywhere") {
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
      const State x(rng.uniform(-5, 5), rng.normal());
      const Linearization lin = linearize(SystemId::linear2, x, rng.normal());
      CHECK(lin.A(0, 0) == 0.0);
      CHECK(lin.A(0, 1) == 1.0);
      CHECK(lin.A(1, 0) == 0.0);
      CHECK(lin.A(1, 1) == 0.0);
      CHECK(lin.B[0] == 0.0);
      CHECK(lin.B[1] == 1.0);
      CHECK(lin.c.norm() == 0.0);
    }
  }
  SUBCASE("Van der Pol at the origin") {
    const Linearization lin = linearize(SystemId::vanderpol, State(0, 0), 0.0);
    CHECK(lin.A(0, 0) == 0.0);
    CHECK(lin.A(0, 1) == 1.0);
    CHECK(lin.A(1, 0) == -1.0);
    CHECK(lin.A(1, 1) == 1.0);
    CHECK(lin.B[1] == 1.0);
  }
  SUBCASE("first-order Taylor residual is O(delta^2)") {
    const State x(1.3, -0.7);
    const double u = 0.4;
    const Linearization lin = linearize(SystemId::vanderpol, x, u);
    const double d = 1e-4;
    const State pert(d, -0.5 * d);
    const State lhs = dynamics_f(SystemId::vanderpol, x + pert, u);
    const State rhs = dynamics_f(SystemId::vanderpol, x, u) + lin.A * pert;
    CHECK((lhs - rhs).norm() < 10 * d * d);
  }
}

TEST_CASE("solve_step basics") {
  SlmpcConfig cfg;  // horizon 2.5, 25 steps, compare cost

  SUBCASE("at rest on the reference the control vanishes") {
    const double u = solve_step(SystemId::linear2, State(1.0, 0.0), 1.0, cfg);
    CHECK(std::abs(u) < 1e-6);
  }

  SUBCASE("linearity: doubling the state error doubles the first control") {
    const double u1 = solve_step(SystemId::linear2, State(1.0, 0.5), 0.0, cfg);
    const double u2 = solve_step(SystemId::linear2, State(2.0, 1.0), 0.0, cfg);
    CHECK(u2 == doctest::Approx(2.0 * u1).epsilon(1e-8));
  }

  SUBCASE("solution is independent of the internal row stacking") {
    const State x(0.7, -1.1);
    const double ua = solve_step(SystemId::vanderpol, x, 0.5, cfg, RowStacking::interleaved);
    const double ub = solve_step(SystemId::vanderpol, x, 0.5, cfg, RowStacking::grouped);
    CHECK(std::abs(ua - ub) < 1e-9);
  }

  SUBCASE("first control is continuous in the current state") {
    const State x(0.4, 0.2);
    const double u0 = solve_step(SystemId::vanderpol, x, 1.0, cfg);
    for (const double eps : {1e-3, 1e-4, 1e-5}) {
      const double up = solve_step(SystemId::vanderpol, x + State(eps, 0), 1.0, cfg);
      CHECK(std::abs(up - u0) < 50.0 * eps);
    }
  }

  SUBCASE("control bound clamps the returned value") {
    SlmpcConfig bounded = cfg;
    bounded.u_bound = 0.05;
    const double u = solve_step(SystemId::linear2, State(5.0, 0.0), 0.0, bounded);
    CHECK(std::abs(u) <= 0.05);
  }
}

TEST_CASE("slmpc stabilizes the double integrator") {
  SlmpcConfig cfg;
  cfg.delta = 0.5;
  SlmpcPolicy policy(SystemId::linear2, cfg);
  Scenario sc;
  sc.system = SystemId::linear2;
  sc.cost = {CostId::linear_quadratic, 1.0};
  sc.sampling = Sampling::every(0.5);
  sc.duration = 10.0;
  sc.schedule = {{0.0, 0.0}};
  sc.initial_state = State(1.0, 0.0);
  const RunResult run = run_closed_loop(policy, sc);
  CHECK(std::abs(run.trajectory.rows.back().x[0]) < 0.1);
  // co-states are not part of the baseline's contract
  CHECK(run.trajectory.rows.back().lambda.norm() == 0.0);
}

TEST_CASE("slmpc config validation") {
  SlmpcConfig cfg;
  cfg.n_steps = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SlmpcConfig{};
  cfg.horizon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SlmpcConfig{};
  cfg.u_bound = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
