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
#include <string>
#include <vector>

#include "hion/config.hpp"
#include "hion/controller.hpp"
#include "hion/simulator.hpp"
#include "hion/slmpc.hpp"
#include "hion/training.hpp"

namespace hion {

struct TrainSetup {
  SystemId system = SystemId::linear2;
  CostSpec cost;
  ControllerArch arch;
  double t_f = 0.0;
  TrainConfig train;
};

TrainSetup train_setup_from_config(const Config& cfg);
Scenario scenario_from_config(const Config& cfg);
SlmpcConfig slmpc_from_config(const Config& cfg);

/// Full command-line surface; returns the process exit code
/// (0 ok, 1 usage/config, 2 runtime abort).
int cli_run(int argc, const char* const* argv);

}  // namespace hion
