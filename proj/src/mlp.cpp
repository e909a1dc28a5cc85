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

#include "hion/mlp.hpp"

#include <cmath>

namespace hion {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// SiLU value and derivatives up to the requested order, from the closed forms
// of sigmoid derivatives (polynomials in the sigmoid value).
struct SiluTables {
  Eigen::ArrayXXd d0, d1, d2, d3, d4;

  void compute(const Eigen::MatrixXd& z0, int max_deriv) {
    const Eigen::ArrayXXd v = z0.array();
    const Eigen::ArrayXXd s = 1.0 / (1.0 + (-v).exp());
    const Eigen::ArrayXXd s1 = s * (1.0 - s);
    d0 = v * s;
    d1 = v * s1 + s;
    if (max_deriv >= 2) {
      const Eigen::ArrayXXd s2 = s1 * (1.0 - 2.0 * s);
      d2 = v * s2 + 2.0 * s1;
      if (max_deriv >= 3) {
        const Eigen::ArrayXXd s3 = s1 * (1.0 - 6.0 * s + 6.0 * s * s);
        d3 = v * s3 + 3.0 * s2;
        if (max_deriv >= 4) {
          const Eigen::ArrayXXd s4 = s1 * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s * s * s);
          d4 = v * s4 + 4.0 * s3;
        }
      }
    }
  }
};

}  // namespace

void Mlp::pack(Eigen::Ref<Eigen::VectorXd> dst) const {
  Eigen::Index off = 0;
  for (int l = 0; l < n_layers(); ++l) {
    const auto& w = W[static_cast<std::size_t>(l)];
    RowMajorMap(dst.segment(off, w.size()).data(), w.rows(), w.cols()) = w;
    off += w.size();
    dst.segment(off, b[static_cast<std::size_t>(l)].size()) = b[static_cast<std::size_t>(l)];
    off += b[static_cast<std::size_t>(l)].size();
  }
}

void Mlp::unpack(const Eigen::Ref<const Eigen::VectorXd>& src) {
  Eigen::Index off = 0;
  for (int l = 0; l < n_layers(); ++l) {
    auto& w = W[static_cast<std::size_t>(l)];
    w = ConstRowMajorMap(src.segment(off, w.size()).data(), w.rows(), w.cols());
    off += w.size();
    b[static_cast<std::size_t>(l)] = src.segment(off, b[static_cast<std::size_t>(l)].size());
    off += b[static_cast<std::size_t>(l)].size();
  }
}

Mlp init_params(Rng& rng, const std::vector<int>& dims) {
  if (dims.size() < 2) throw ConfigError("mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw ConfigError("mlp: layer dims must be >= 1");
  }
  Mlp m;
  m.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int j = 0; j < fan_out; ++j) {
      for (int i = 0; i < fan_in; ++i) w(j, i) = rng.uniform(-limit, limit);
    }
    m.W.push_back(std::move(w));
    m.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

const JetBatch& MlpJetRun::forward(const Mlp& mlp, const JetBatch& in) {
  const int L = mlp.n_layers();
  const int ord = in.order;
  act_.assign(static_cast<std::size_t>(L) + 1, JetBatch{});
  pre_.assign(static_cast<std::size_t>(L), JetBatch{});
  act_[0] = in;

  SiluTables tab;
  for (int l = 0; l < L; ++l) {
    const JetBatch& a = act_[static_cast<std::size_t>(l)];
    JetBatch& z = pre_[static_cast<std::size_t>(l)];
    z.order = ord;
    for (int c = 0; c <= ord; ++c) {
      z.ch[static_cast<std::size_t>(c)].noalias() =
          mlp.W[static_cast<std::size_t>(l)] * a.ch[static_cast<std::size_t>(c)];
    }
    z.ch[0].colwise() += mlp.b[static_cast<std::size_t>(l)];

    JetBatch& out = act_[static_cast<std::size_t>(l) + 1];
    if (l + 1 == L) {
      out = z;  // identity output layer
      continue;
    }
    tab.compute(z.ch[0], ord);
    out.order = ord;
    out.ch[0] = tab.d0.matrix();
    if (ord >= 1) {
      const auto z1 = z.ch[1].array();
      out.ch[1] = (tab.d1 * z1).matrix();
      if (ord >= 2) {
        const auto z2 = z.ch[2].array();
        out.ch[2] = (tab.d2 * z1.square() + tab.d1 * z2).matrix();
        if (ord >= 3) {
          const auto z3 = z.ch[3].array();
          out.ch[3] =
              (tab.d3 * z1.cube() + 3.0 * tab.d2 * z1 * z2 + tab.d1 * z3).matrix();
        }
      }
    }
  }
  return act_.back();
}

JetBatch MlpJetRun::backward(const Mlp& mlp, const JetBatch& gout,
                             Eigen::Ref<Eigen::VectorXd> grads) const {
  const int L = mlp.n_layers();
  const int ord = gout.order;

  // Parameter offsets per layer within the mlp block.
  std::vector<Eigen::Index> off(static_cast<std::size_t>(L));
  Eigen::Index acc = 0;
  for (int l = 0; l < L; ++l) {
    off[static_cast<std::size_t>(l)] = acc;
    acc += mlp.W[static_cast<std::size_t>(l)].size() + mlp.b[static_cast<std::size_t>(l)].size();
  }

  JetBatch ga = gout;  // adjoint of the current layer's activation
  SiluTables tab;
  for (int l = L - 1; l >= 0; --l) {
    const JetBatch& z = pre_[static_cast<std::size_t>(l)];
    JetBatch gz;
    gz.order = ord;
    if (l + 1 == L) {
      gz = ga;
    } else {
      tab.compute(z.ch[0], ord >= 1 ? ord + 1 : 1);
      const auto g0 = ga.ch[0].array();
      const auto z1 = z.ch[1].array();
      Eigen::ArrayXXd gz0 = tab.d1 * g0;
      if (ord >= 1) {
        const auto g1 = ga.ch[1].array();
        gz0 += tab.d2 * z1 * g1;
        gz.ch[1] = (tab.d1 * g1).matrix();
        if (ord >= 2) {
          const auto g2 = ga.ch[2].array();
          const auto z2 = z.ch[2].array();
          gz0 += (tab.d3 * z1.square() + tab.d2 * z2) * g2;
          gz.ch[1].array() += 2.0 * tab.d2 * z1 * g2;
          gz.ch[2] = (tab.d1 * g2).matrix();
          if (ord >= 3) {
            const auto g3 = ga.ch[3].array();
            const auto z3 = z.ch[3].array();
            gz0 += (tab.d4 * z1.cube() + 3.0 * tab.d3 * z1 * z2 + tab.d2 * z3) * g3;
            gz.ch[1].array() += (3.0 * tab.d3 * z1.square() + 3.0 * tab.d2 * z2) * g3;
            gz.ch[2].array() += 3.0 * tab.d2 * z1 * g3;
            gz.ch[3] = (tab.d1 * g3).matrix();
          }
        }
      }
      gz.ch[0] = gz0.matrix();
    }

    const JetBatch& a_prev = act_[static_cast<std::size_t>(l)];
    const auto& w = mlp.W[static_cast<std::size_t>(l)];
    Eigen::MatrixXd dW = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (int c = 0; c <= ord; ++c) {
      dW.noalias() += gz.ch[static_cast<std::size_t>(c)] *
                      a_prev.ch[static_cast<std::size_t>(c)].transpose();
    }
    const Eigen::VectorXd db = gz.ch[0].rowwise().sum();

    Eigen::Index o = off[static_cast<std::size_t>(l)];
    RowMajorMap(grads.segment(o, dW.size()).data(), dW.rows(), dW.cols()) += dW;
    grads.segment(o + dW.size(), db.size()) += db;

    JetBatch ga_prev;
    ga_prev.order = ord;
    for (int c = 0; c <= ord; ++c) {
      ga_prev.ch[static_cast<std::size_t>(c)].noalias() =
          w.transpose() * gz.ch[static_cast<std::size_t>(c)];
    }
    ga = std::move(ga_prev);
  }
  return ga;
}

}  // namespace hion
