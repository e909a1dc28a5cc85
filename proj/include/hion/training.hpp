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

#include "hion/pmp.hpp"

namespace hion {

struct TrainConfig {
  long n_epochs = 20000;       // default for the linear plant; 50000 for Van der Pol
  int batch_size = 256;        // (x_o, x_r) pairs per epoch
  int n_transient = 8;         // interior time samples per pair
  double lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  LossWeights loss_weights;
  std::string finetune_from;   // parent checkpoint path, empty for fresh training
  bool cosine_decay = false;

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd m, v;
  long step = 0;

  void init(Eigen::Index n) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
    step = 0;
  }
};

/// One bias-corrected Adam update in place.
void adam_step(AdamState& st, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               double beta1, double beta2, double eps);

struct EpochRecord {
  long epoch = 0;
  LossBreakdown losses;
  double lr = 0.0;
  double wall_ms = 0.0;
};

/// One epoch of Algorithm-style training: fresh samples, loss assembly over
/// the three time classes, one Adam step. Pure function of (controller
/// params, seed, epoch index). A non-finite total loss aborts the epoch with
/// parameters and optimizer state untouched.
LossBreakdown train_epoch(TmanoController& ctrl, const TrainConfig& cfg, AdamState& adam,
                          long epoch);

struct TrainResult {
  long epochs_run = 0;
  LossBreakdown held_out;  // evaluated on a fresh batch after the last epoch
};

/// Runs n_epochs epochs, reporting each through on_epoch (for the train.csv
/// stream). Three consecutive aborted epochs propagate the failure.
TrainResult train(TmanoController& ctrl, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Loss evaluation on a fresh batch without touching parameters.
LossBreakdown evaluate_held_out(const TmanoController& ctrl, const TrainConfig& cfg, long epoch);

}  // namespace hion
