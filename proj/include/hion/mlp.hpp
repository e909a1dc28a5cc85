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
#include <array>
#include <vector>

#include "hion/errors.hpp"
#include "hion/jet.hpp"
#include "hion/rng.hpp"

namespace hion {

/// Multi-layer perceptron with SiLU hidden activations and an identity
/// output layer. Parameters pack/unpack per layer as row-major weights
/// followed by the bias; that is also the checkpoint layout.
struct Mlp {
  std::vector<int> dims;              // [in, hidden..., out]
  std::vector<Eigen::MatrixXd> W;     // W[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> b;

  int n_layers() const { return static_cast<int>(W.size()); }

  Eigen::Index param_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
    return n;
  }

  void pack(Eigen::Ref<Eigen::VectorXd> dst) const;
  void unpack(const Eigen::Ref<const Eigen::VectorXd>& src);

  /// Jet-valued forward pass, generic over the scalar carried by the jets.
  template <class S>
  std::vector<Jet<S>> forward_jets(const std::vector<Jet<S>>& input) const {
    if (static_cast<int>(input.size()) != dims.front()) {
      throw ConfigError("mlp forward: input dimension mismatch");
    }
    const int K = input[0].order();
    std::vector<Jet<S>> a = input;
    for (int l = 0; l < n_layers(); ++l) {
      std::vector<Jet<S>> z;
      z.reserve(static_cast<std::size_t>(dims[static_cast<std::size_t>(l) + 1]));
      for (int j = 0; j < dims[static_cast<std::size_t>(l) + 1]; ++j) {
        Jet<S> acc = Jet<S>::constant(S(b[static_cast<std::size_t>(l)][j]), K);
        for (int i = 0; i < dims[static_cast<std::size_t>(l)]; ++i) {
          acc = acc + scale(a[static_cast<std::size_t>(i)], W[static_cast<std::size_t>(l)](j, i));
        }
        z.push_back(l + 1 < n_layers() ? silu(acc) : acc);
      }
      a = std::move(z);
    }
    return a;
  }
};

/// Glorot-uniform weights, zero biases. Weights are drawn per layer in
/// row-major order so initialization is a pure function of the seed stream.
Mlp init_params(Rng& rng, const std::vector<int>& dims);

/// Batched jets: ch[c](r, j) holds the c-th time derivative of feature r in
/// batch column j. A batch of order m carries m+1 channels.
struct JetBatch {
  int order = 0;
  std::array<Eigen::MatrixXd, 4> ch;

  void setZero(Eigen::Index rows, Eigen::Index cols, int ord) {
    order = ord;
    for (int c = 0; c <= ord; ++c) ch[static_cast<std::size_t>(c)].setZero(rows, cols);
  }
  Eigen::Index cols() const { return ch[0].cols(); }
  Eigen::Index rows() const { return ch[0].rows(); }
};

/// One batched forward/backward pass of an Mlp over jet channels. The forward
/// propagates truncated Taylor coefficients through each layer (exact SiLU
/// chain rules, closed-form sigmoid derivatives); the backward replays the
/// recorded pre-activations to accumulate d(scalar)/d(parameter) with a fixed
/// reduction order.
class MlpJetRun {
 public:
  /// Runs the forward pass; the returned reference stays valid until the next
  /// forward on this object.
  const JetBatch& forward(const Mlp& mlp, const JetBatch& in);

  /// Backward from output-channel adjoints. Parameter gradients accumulate
  /// into `grads` (Mlp packing layout); returns input-channel adjoints.
  JetBatch backward(const Mlp& mlp, const JetBatch& gout, Eigen::Ref<Eigen::VectorXd> grads) const;

  const JetBatch& output() const { return act_.back(); }

 private:
  // act_[0] is the input; act_[l+1] the activations after layer l.
  // pre_[l] is the pre-activation of layer l (identity layer included).
  std::vector<JetBatch> act_;
  std::vector<JetBatch> pre_;
};

}  // namespace hion
