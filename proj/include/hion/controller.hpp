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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hion/mlp.hpp"
#include "hion/systems.hpp"

namespace hion {

struct ControllerArch {
  std::vector<int> state_hidden{64, 64, 64};
  std::vector<int> costate_hidden{64, 64, 64};
};

/// Four-stage controller: invariant mask, state-generator MLP, Taylor
/// operator with differentiation and the control definition, co-state
/// generator MLP. Maps (elapsed time, observed state, reference) to state
/// jets, control and co-states.
struct TmanoController {
  SystemId system = SystemId::linear2;
  SystemSpec spec;
  CostSpec cost;
  double t_f = 0.0;
  Mlp state_gen;
  Mlp costate_gen;

  Eigen::Index param_count() const { return state_gen.param_count() + costate_gen.param_count(); }
  Eigen::VectorXd pack_params() const;
  void unpack_params(const Eigen::Ref<const Eigen::VectorXd>& p);
};

/// Fresh controller with Glorot-initialized generators. State-generator
/// inputs are (t_hat, observed state vector, reference); co-state inputs add
/// the estimated state vector and the control.
TmanoController make_controller(SystemId system, const CostSpec& cost, const ControllerArch& arch,
                                std::uint64_t seed, std::optional<double> t_f_override = {});

struct MaskResult {
  State masked_xo = State::Zero();
  double shifted_xr = 0.0;
  double delta = 0.0;  // translation offset retained for output reconstruction
};

/// Fixes invariant-flagged primitive states to zero and shifts the associated
/// reference components by the same offset, so the generators only ever see
/// the translation-invariant frame.
MaskResult invariant_mask(const SystemSpec& spec, const State& x_o, double x_r);

/// Taylor-operator map: known-prefix polynomial of the observed state plus
/// the higher-order-term function scaled by t_hat^k. `delta` is re-added to
/// the value coefficient of invariant states.
template <class S>
Jet<S> taylor_operator(const Jet<S>& t_hat, const State& x_o_known, const Jet<S>& x_hat, int k,
                       double delta = 0.0) {
  if (t_hat.order() < k) throw ConfigError("taylor_operator: insufficient jet order");
  Jet<S> prefix = Jet<S>::constant(S(x_o_known[0]), t_hat.order());
  Jet<S> tpow = Jet<S>::constant(S(1.0), t_hat.order());
  for (int n = 1; n < k; ++n) {
    tpow = tpow * t_hat;
    prefix = prefix + scale(tpow, x_o_known[n] / detail::factorial(n));
  }
  tpow = tpow * t_hat;  // t_hat^k
  Jet<S> r = prefix + x_hat * tpow;
  r[0] = r[0] + delta;
  return r;
}

/// Full forward pass at a single evaluation point.
struct ForwardResult {
  Jet<double> x0;                     // primitive-state jet, order = ode_order
  Jet<double> u;                      // control jet, order 1 (value and rate)
  std::vector<Jet<double>> lambda;    // co-state jets, order 1
  bool extrapolated = false;          // t_hat outside [0, t_f]

  State state_value() const { return State(x0[0], x0[1]); }
  State costate_value() const { return State(lambda[0][0], lambda[1][0]); }
};

ForwardResult forward(const TmanoController& ctrl, double t_hat, const State& x_o, double x_r);

/// Batched forward/backward over evaluation columns; the training hot path.
/// Column j holds (t[j], x_o.col(j), x_r[j]). The forward keeps per-stage
/// caches so a later backward can push loss adjoints on the state jets,
/// control jets and co-state jets down to parameter gradients (state
/// generator block first, co-state block second, fixed accumulation order).
class TmanoBatch {
 public:
  void forward(const TmanoController& ctrl, const Eigen::VectorXd& t, const Eigen::Matrix2Xd& x_o,
               const Eigen::VectorXd& x_r);

  Eigen::Index cols() const { return t_.size(); }

  /// State jet channels in the shifted (invariant) frame; x0_actual adds the
  /// translation offset back.
  const Eigen::ArrayXd& p(int c) const { return p_[static_cast<std::size_t>(c)]; }
  Eigen::ArrayXd x0_actual() const { return p_[0] + delta_; }
  const Eigen::ArrayXd& u(int c) const { return u_[static_cast<std::size_t>(c)]; }
  /// Co-state channels: lam(c) is 2 x N, row i = lambda_i, channel c = d^c/dt^c.
  const Eigen::MatrixXd& lam(int c) const { return lam_[static_cast<std::size_t>(c)]; }
  const Eigen::ArrayXd& delta() const { return delta_; }
  const Eigen::ArrayXd& xr_shifted() const { return sxr_; }
  const Eigen::VectorXd& xr_actual() const { return xr_; }

  /// Adjoint seeds: gp over p-channels, gu over control channels, glam over
  /// co-state channels. Returns the gradient of the seeded scalar with
  /// respect to the packed parameter vector.
  Eigen::VectorXd backward(const TmanoController& ctrl, const std::array<Eigen::ArrayXd, 4>& gp,
                           const std::array<Eigen::ArrayXd, 2>& gu,
                           const std::array<Eigen::MatrixXd, 2>& glam) const;

 private:
  Eigen::VectorXd t_, xr_;
  Eigen::Matrix2Xd xo_;
  Eigen::ArrayXd delta_, sxr_;
  Eigen::Matrix2Xd mxo_;
  MlpJetRun state_run_, costate_run_;
  std::array<Eigen::ArrayXd, 4> h_;  // state-generator output jets
  std::array<Eigen::ArrayXd, 4> p_;  // primitive-state jets (shifted frame)
  std::array<Eigen::ArrayXd, 2> u_;
  std::array<Eigen::MatrixXd, 2> lam_;
};

/// Checkpoint metadata stored alongside the serialized parameters.
struct CheckpointMeta {
  std::uint64_t seed = 0;
  long epochs_trained = 0;
  std::map<std::string, double> final_loss;  // keys follow the train.csv columns
  std::string parent_hash;                   // lineage for fine-tuned models
};

void save_checkpoint(const std::string& path, const TmanoController& ctrl,
                     const CheckpointMeta& meta);
TmanoController load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

}  // namespace hion
