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
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hion/errors.hpp"

namespace hion {

class ParamTape;

/// Scalar value optionally recorded on a ParamTape. Cheap to copy; arithmetic
/// emits one node per elementary operation with the local partial derivatives
/// needed to accumulate d(scalar)/d(parameter) on the backward sweep.
///
/// A Var constructed from a plain double is untracked and behaves like a
/// double; it only contributes values, never adjoints. This lets Jet<Var>
/// mix parameters with constant coefficients without tape bloat.
class Var {
 public:
  Var() : tape_(nullptr), idx_(-1), v_(0.0) {}
  Var(double v) : tape_(nullptr), idx_(-1), v_(v) {}  // NOLINT: implicit by design
  Var(ParamTape* tape, std::int32_t idx, double v) : tape_(tape), idx_(idx), v_(v) {}

  double value() const { return v_; }
  std::int32_t index() const { return idx_; }
  ParamTape* tape() const { return tape_; }

 private:
  ParamTape* tape_;
  std::int32_t idx_;
  double v_;
};

/// Record of elementary operations over tracked scalars. Replaying the tape
/// backward from a scalar seed produces one adjoint per node; parameter
/// gradients are read off the leaf nodes. Two backward passes over the same
/// tape are bit-identical. A tape is confined to one evaluation thread;
/// parallel batches use independent tapes and a fixed-order reduction.
class ParamTape {
 public:
  ParamTape() = default;
  ParamTape(const ParamTape&) = delete;
  ParamTape& operator=(const ParamTape&) = delete;

  /// Registers a differentiable leaf (a parameter).
  Var input(double v) { return Var(this, emit(v, -1, -1, 0.0, 0.0, "input"), v); }

  /// Registers a tracked constant.
  Var constant(double v) { return Var(this, emit(v, -1, -1, 0.0, 0.0, "constant"), v); }

  std::size_t size() const { return nodes_.size(); }

  bool has_nonfinite() const { return first_bad_ >= 0; }

  std::string first_nonfinite_diagnostic() const {
    if (first_bad_ < 0) return "no non-finite node";
    const Node& n = nodes_[static_cast<std::size_t>(first_bad_)];
    return "first non-finite node #" + std::to_string(first_bad_) + " (" + n.tag + ")";
  }

  /// Adjoints of every node with respect to `seed`. Unreferenced nodes get 0.
  std::vector<double> backward(const Var& seed) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    if (seed.index() < 0) return adj;
    adj[static_cast<std::size_t>(seed.index())] = 1.0;
    for (std::int32_t i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
      const double a = adj[static_cast<std::size_t>(i)];
      if (a == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.pl >= 0) adj[static_cast<std::size_t>(n.pl)] += n.dl * a;
      if (n.pr >= 0) adj[static_cast<std::size_t>(n.pr)] += n.dr * a;
    }
    return adj;
  }

  std::int32_t emit(double value, std::int32_t pl, std::int32_t pr, double dl, double dr,
                    const char* tag) {
    if (!std::isfinite(value) && first_bad_ < 0) {
      first_bad_ = static_cast<std::int32_t>(nodes_.size());
    }
    nodes_.push_back(Node{value, dl, dr, pl, pr, tag});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

 private:
  struct Node {
    double value;
    double dl, dr;
    std::int32_t pl, pr;
    const char* tag;
  };
  std::vector<Node> nodes_;
  std::int32_t first_bad_ = -1;
};

namespace detail {

inline ParamTape* joint_tape(const Var& a, const Var& b) {
  if (a.tape() && b.tape() && a.tape() != b.tape()) throw ConfigError("vars from different tapes");
  return a.tape() ? a.tape() : b.tape();
}

inline Var record(ParamTape* t, double v, std::int32_t pl, std::int32_t pr, double dl, double dr,
                  const char* tag) {
  if (!t) return Var(v);
  return Var(t, t->emit(v, pl, pr, dl, dr, tag), v);
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  return detail::record(detail::joint_tape(a, b), a.value() + b.value(), a.index(), b.index(), 1.0,
                        1.0, "add");
}
inline Var operator-(const Var& a, const Var& b) {
  return detail::record(detail::joint_tape(a, b), a.value() - b.value(), a.index(), b.index(), 1.0,
                        -1.0, "sub");
}
inline Var operator*(const Var& a, const Var& b) {
  return detail::record(detail::joint_tape(a, b), a.value() * b.value(), a.index(), b.index(),
                        b.value(), a.value(), "mul");
}
inline Var operator/(const Var& a, const Var& b) {
  if (b.value() == 0.0) throw NumericError("tape div: division by zero value");
  const double v = a.value() / b.value();
  return detail::record(detail::joint_tape(a, b), v, a.index(), b.index(), 1.0 / b.value(),
                        -v / b.value(), "div");
}
inline Var operator-(const Var& a) {
  return detail::record(a.tape(), -a.value(), a.index(), -1, -1.0, 0.0, "neg");
}

inline Var operator+(const Var& a, double c) {
  return detail::record(a.tape(), a.value() + c, a.index(), -1, 1.0, 0.0, "add");
}
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) { return a + (-c); }
inline Var operator-(double c, const Var& a) {
  return detail::record(a.tape(), c - a.value(), a.index(), -1, -1.0, 0.0, "sub");
}
inline Var operator*(const Var& a, double c) {
  return detail::record(a.tape(), a.value() * c, a.index(), -1, c, 0.0, "scale");
}
inline Var operator*(double c, const Var& a) { return a * c; }
inline Var operator/(const Var& a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, const Var& a) {
  if (a.value() == 0.0) throw NumericError("tape div: division by zero value");
  const double v = c / a.value();
  return detail::record(a.tape(), v, a.index(), -1, -v / a.value(), 0.0, "div");
}

inline Var sigmoid(const Var& a) {
  const double s = 1.0 / (1.0 + std::exp(-a.value()));
  return detail::record(a.tape(), s, a.index(), -1, s * (1.0 - s), 0.0, "sigmoid");
}
inline Var tanh(const Var& a) {
  const double v = std::tanh(a.value());
  return detail::record(a.tape(), v, a.index(), -1, 1.0 - v * v, 0.0, "tanh");
}
inline Var silu(const Var& a) {
  const double s = 1.0 / (1.0 + std::exp(-a.value()));
  const double v = a.value() * s;
  const double d = s + a.value() * s * (1.0 - s);
  return detail::record(a.tape(), v, a.index(), -1, d, 0.0, "silu");
}

struct GradResult {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Gradient of a scalar expression with respect to a parameter vector.
///
/// The expression is evaluated once over a fresh tape with the parameters
/// registered as leaves (in order), then the tape is replayed backward.
/// Parameters the expression never touches receive gradient 0. A non-finite
/// loss refuses the gradient and names the first non-finite node.
inline GradResult grad_scalar(const Eigen::VectorXd& params,
                              const std::function<Var(ParamTape&, std::span<const Var>)>& loss_eval) {
  ParamTape tape;
  std::vector<Var> vars;
  vars.reserve(static_cast<std::size_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) vars.push_back(tape.input(params[i]));
  const Var loss = loss_eval(tape, std::span<const Var>(vars));
  if (!std::isfinite(loss.value()) || tape.has_nonfinite()) {
    throw NumericError("grad_scalar: non-finite loss; " + tape.first_nonfinite_diagnostic());
  }
  const std::vector<double> adj = tape.backward(loss);
  GradResult out;
  out.value = loss.value();
  out.grad.resize(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const std::int32_t idx = vars[static_cast<std::size_t>(i)].index();
    out.grad[i] = adj[static_cast<std::size_t>(idx)];
  }
  return out;
}

}  // namespace hion
