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

#include "hion/training.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace hion {

void TrainConfig::validate() const {
  if (n_epochs < 0) throw ConfigError("train.n_epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (n_transient < 1) throw ConfigError("train.n_transient must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("train.lr must be >= 0");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0) throw ConfigError("train.adam_beta1 must be in [0, 1)");
  if (adam_beta2 < 0.0 || adam_beta2 >= 1.0) throw ConfigError("train.adam_beta2 must be in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be > 0");
  const double* ws[] = {&loss_weights.init_state, &loss_weights.terminal_state, &loss_weights.ode,
                        &loss_weights.costate_dyn, &loss_weights.costate_term,
                        &loss_weights.stationarity};
  for (const double* w : ws) {
    if (!(*w >= 0.0)) throw ConfigError("train.loss_weights entries must be >= 0");
  }
}

void adam_step(AdamState& st, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr,
               double beta1, double beta2, double eps) {
  st.step += 1;
  st.m = beta1 * st.m + (1.0 - beta1) * grad;
  st.v.array() = beta2 * st.v.array() + (1.0 - beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.step));
  params.array() -= lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + eps);
}

namespace {

BatchInputs draw_batch(const TmanoController& ctrl, const TrainConfig& cfg, long epoch) {
  Rng rng = epoch_rng(cfg.seed, static_cast<std::uint64_t>(epoch));
  const int B = cfg.batch_size;
  const int per = cfg.n_transient + 2;
  const Eigen::Index N = static_cast<Eigen::Index>(B) * per;
  BatchInputs in;
  in.t.resize(N);
  in.xo.resize(2, N);
  in.xr.resize(N);
  in.terminal_cols.reserve(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i) {
    const State xo = sample_observed(ctrl.system, rng);
    const double xr = sample_reference(xo, rng);
    const Eigen::Index base = static_cast<Eigen::Index>(i) * per;
    in.t[base] = 0.0;
    for (int s = 0; s < cfg.n_transient; ++s) in.t[base + 1 + s] = rng.uniform(0.0, ctrl.t_f);
    in.t[base + per - 1] = ctrl.t_f;
    for (int c = 0; c < per; ++c) {
      in.xo.col(base + c) = xo;
      in.xr[base + c] = xr;
    }
    in.terminal_cols.push_back(base + per - 1);
  }
  return in;
}

double epoch_lr(const TrainConfig& cfg, long epoch) {
  if (!cfg.cosine_decay || cfg.n_epochs <= 1) return cfg.lr;
  const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.n_epochs);
  return cfg.lr * 0.5 * (1.0 + std::cos(M_PI * frac));
}

}  // namespace

LossBreakdown train_epoch(TmanoController& ctrl, const TrainConfig& cfg, AdamState& adam,
                          long epoch) {
  const BatchInputs in = draw_batch(ctrl, cfg, epoch);
  const LossSet active = active_losses(ctrl.spec, /*has_reference=*/true);
  TmanoBatch batch;
  const BatchEval eval =
      evaluate_losses(ctrl, batch, in, cfg.loss_weights, active, /*with_grad=*/true);
  if (!std::isfinite(eval.losses.total)) {
    throw NumericError("epoch " + std::to_string(epoch) +
                       " aborted: non-finite total loss; parameters rolled back");
  }
  if (!eval.grad.allFinite()) {
    throw NumericError("epoch " + std::to_string(epoch) +
                       " aborted: non-finite gradient; parameters rolled back");
  }
  Eigen::VectorXd params = ctrl.pack_params();
  adam_step(adam, params, eval.grad, epoch_lr(cfg, epoch), cfg.adam_beta1, cfg.adam_beta2,
            cfg.adam_eps);
  ctrl.unpack_params(params);
  return eval.losses;
}

LossBreakdown evaluate_held_out(const TmanoController& ctrl, const TrainConfig& cfg, long epoch) {
  const BatchInputs in = draw_batch(ctrl, cfg, epoch);
  const LossSet active = active_losses(ctrl.spec, true);
  TmanoBatch batch;
  return evaluate_losses(ctrl, batch, in, cfg.loss_weights, active, /*with_grad=*/false).losses;
}

TrainResult train(TmanoController& ctrl, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  AdamState adam;
  adam.init(ctrl.param_count());
  TrainResult out;
  int consecutive_failures = 0;
  for (long e = 0; e < cfg.n_epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const LossBreakdown losses = train_epoch(ctrl, cfg, adam, e);
      consecutive_failures = 0;
      out.epochs_run += 1;
      if (on_epoch) {
        EpochRecord rec;
        rec.epoch = e;
        rec.losses = losses;
        rec.lr = epoch_lr(cfg, e);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
        on_epoch(rec);
      }
    } catch (const NumericError& err) {
      ++consecutive_failures;
      std::cerr << "warning: " << err.what() << " (" << consecutive_failures
                << " consecutive)\n";
      if (consecutive_failures >= 3) throw;
    }
  }
  out.held_out = evaluate_held_out(ctrl, cfg, cfg.n_epochs);
  return out;
}

}  // namespace hion
