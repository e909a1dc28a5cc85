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

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "hion/errors.hpp"

namespace hion {

/// Truncated Taylor series of a scalar quantity in elapsed time.
///
/// coeffs()[n] holds the raw n-th time derivative of the represented function
/// at the evaluation point (not the normalized Taylor coefficient), so a jet
/// of order K carries K+1 entries [f, f', ..., f^(K)]. Arithmetic follows the
/// exact truncated-Taylor rules: products use the Leibniz binomial sum and
/// univariate functions are propagated through convolution recurrences.
///
/// The scalar type is generic: Jet<double> is the plain engine, Jet<Var> laces
/// every coefficient through a ParamTape so losses built from derivative
/// coefficients stay differentiable with respect to model parameters.
template <class S>
class Jet {
 public:
  Jet() = default;

  /// Constant function of time: [v, 0, ..., 0].
  static Jet constant(S v, int order) {
    Jet j;
    j.c_.assign(static_cast<std::size_t>(order) + 1, S(0.0));
    j.c_[0] = std::move(v);
    return j;
  }

  static Jet from_coeffs(std::vector<S> coeffs) {
    Jet j;
    j.c_ = std::move(coeffs);
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<S>& coeffs() const { return c_; }
  const S& operator[](int n) const { return c_[static_cast<std::size_t>(n)]; }
  S& operator[](int n) { return c_[static_cast<std::size_t>(n)]; }

  /// Value coefficient.
  const S& value() const { return c_[0]; }

 private:
  std::vector<S> c_;
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= static_cast<double>(i);
  return r;
}

template <class S>
bool is_finite_scalar(const S& v) {
  if constexpr (std::is_floating_point_v<S>) {
    return std::isfinite(v);
  } else {
    (void)v;
    return true;  // tape-tracked scalars check eagerly at the tape boundary
  }
}

template <class S>
void check_finite(const Jet<S>& j, const char* where) {
  for (const S& v : j.coeffs()) {
    if (!is_finite_scalar(v)) {
      throw NumericError(std::string("non-finite jet coefficient in ") + where);
    }
  }
}

template <class S>
void check_same_order(const Jet<S>& a, const Jet<S>& b, const char* where) {
  if (a.order() != b.order()) {
    throw ConfigError(std::string("jet order mismatch in ") + where);
  }
}

}  // namespace detail

/// Jet of the identity function of time at t_hat: [t_hat, 1, 0, ..., 0].
inline Jet<double> jet_lift_time(double t_hat, int order) {
  if (order < 1) throw ConfigError("jet_lift_time: order must be >= 1");
  if (!std::isfinite(t_hat)) throw ConfigError("jet_lift_time: non-finite time");
  auto j = Jet<double>::constant(t_hat, order);
  j[1] = 1.0;
  return j;
}

/// Tape-scalar variant; coefficient construction is left to the caller since
/// the time seed may itself be a tracked value.
template <class S>
Jet<S> jet_lift_time(S t_hat, S one, S zero, int order) {
  std::vector<S> c(static_cast<std::size_t>(order) + 1, zero);
  c[0] = std::move(t_hat);
  c[1] = std::move(one);
  return Jet<S>::from_coeffs(std::move(c));
}

template <class S>
Jet<S> operator+(const Jet<S>& a, const Jet<S>& b) {
  detail::check_same_order(a, b, "jet add");
  Jet<S> r = a;
  for (int n = 0; n <= r.order(); ++n) r[n] = r[n] + b[n];
  detail::check_finite(r, "jet add");
  return r;
}

template <class S>
Jet<S> operator-(const Jet<S>& a, const Jet<S>& b) {
  detail::check_same_order(a, b, "jet sub");
  Jet<S> r = a;
  for (int n = 0; n <= r.order(); ++n) r[n] = r[n] - b[n];
  detail::check_finite(r, "jet sub");
  return r;
}

template <class S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  detail::check_same_order(a, b, "jet mul");
  const int K = a.order();
  Jet<S> r = Jet<S>::constant(S(0.0), K);
  for (int n = 0; n <= K; ++n) {
    S acc = a[0] * b[n];
    for (int i = 1; i <= n; ++i) {
      acc = acc + (a[i] * b[n - i]) * detail::binomial(n, i);
    }
    r[n] = acc;
  }
  detail::check_finite(r, "jet mul");
  return r;
}

template <class S>
Jet<S> operator/(const Jet<S>& a, const Jet<S>& b) {
  detail::check_same_order(a, b, "jet div");
  if constexpr (std::is_floating_point_v<S>) {
    if (b[0] == S(0.0)) throw NumericError("jet div: division by a jet with zero value");
  }
  // Solve a = r * b order by order through the Leibniz sum.
  const int K = a.order();
  Jet<S> r = Jet<S>::constant(S(0.0), K);
  for (int n = 0; n <= K; ++n) {
    S acc = a[n];
    for (int i = 0; i < n; ++i) {
      acc = acc - (r[i] * b[n - i]) * detail::binomial(n, i);
    }
    r[n] = acc / b[0];
  }
  detail::check_finite(r, "jet div");
  return r;
}

template <class S>
Jet<S> operator*(const Jet<S>& a, const S& s) {
  Jet<S> r = a;
  for (int n = 0; n <= r.order(); ++n) r[n] = r[n] * s;
  detail::check_finite(r, "jet scale");
  return r;
}

template <class S>
Jet<S> operator*(const S& s, const Jet<S>& a) {
  return a * s;
}

template <class S>
Jet<S> scale(const Jet<S>& a, double s) {
  Jet<S> r = a;
  for (int n = 0; n <= r.order(); ++n) r[n] = r[n] * s;
  detail::check_finite(r, "jet scale");
  return r;
}

template <class S>
Jet<S> square(const Jet<S>& a) {
  return a * a;
}

/// Jet of f^(times), dropping to order() - times. Shifts raw coefficients.
template <class S>
Jet<S> derivative(const Jet<S>& a, int times = 1) {
  if (times > a.order()) throw ConfigError("jet derivative: insufficient jet order");
  const int K = a.order() - times;
  Jet<S> r = Jet<S>::constant(S(0.0), K);
  for (int n = 0; n <= K; ++n) r[n] = a[n + times];
  return r;
}

template <class S>
Jet<S> truncate(const Jet<S>& a, int order) {
  if (order > a.order()) throw ConfigError("jet truncate: insufficient jet order");
  Jet<S> r = Jet<S>::constant(S(0.0), order);
  for (int n = 0; n <= order; ++n) r[n] = a[n];
  return r;
}

namespace detail {

// Propagates g through a first-order recurrence dg/dt = q(g) * f' where q is
// a quadratic in g, working in normalized Taylor coefficients. Covers the
// sigmoid (q = g(1-g)) and tanh (q = 1-g^2) cases needed by SiLU and tanh.
//
// q(g) normalized coefficients are supplied by `qfun` given the g
// coefficients computed so far.
template <class S, class QFun>
Jet<S> ode_compose(const Jet<S>& f, S g0, QFun&& qfun) {
  const int K = f.order();
  // Normalized coefficients of the input.
  std::vector<S> a(static_cast<std::size_t>(K) + 1, S(0.0));
  for (int n = 0; n <= K; ++n) a[static_cast<std::size_t>(n)] = f[n] * (1.0 / factorial(n));
  std::vector<S> g(static_cast<std::size_t>(K) + 1, S(0.0));
  g[0] = std::move(g0);
  for (int n = 0; n < K; ++n) {
    // q up to order n from g up to order n.
    std::vector<S> q = qfun(g, n);
    S acc = S(0.0);
    for (int i = 0; i <= n; ++i) {
      const int j = n - i;
      acc = acc + q[static_cast<std::size_t>(i)] * (a[static_cast<std::size_t>(j) + 1] * static_cast<double>(j + 1));
    }
    g[static_cast<std::size_t>(n) + 1] = acc * (1.0 / static_cast<double>(n + 1));
  }
  Jet<S> r = Jet<S>::constant(S(0.0), K);
  for (int n = 0; n <= K; ++n) r[n] = g[static_cast<std::size_t>(n)] * factorial(n);
  return r;
}

}  // namespace detail

template <class S>
Jet<S> sigmoid(const Jet<S>& f) {
  using std::exp;
  S g0;
  if constexpr (std::is_floating_point_v<S>) {
    g0 = 1.0 / (1.0 + std::exp(-f[0]));
  } else {
    g0 = sigmoid(f[0]);  // tape node
  }
  auto q = [](const std::vector<S>& g, int n) {
    // q = g * (1 - g), normalized convolution up to order n.
    std::vector<S> out(static_cast<std::size_t>(n) + 1, S(0.0));
    for (int m = 0; m <= n; ++m) {
      S acc = S(0.0);
      for (int i = 0; i <= m; ++i) {
        const S one_minus = (m - i == 0) ? S(1.0) - g[static_cast<std::size_t>(m - i)]
                                         : S(0.0) - g[static_cast<std::size_t>(m - i)];
        acc = acc + g[static_cast<std::size_t>(i)] * one_minus;
      }
      out[static_cast<std::size_t>(m)] = acc;
    }
    return out;
  };
  Jet<S> r = detail::ode_compose(f, std::move(g0), q);
  detail::check_finite(r, "jet sigmoid");
  return r;
}

template <class S>
Jet<S> silu(const Jet<S>& f) {
  Jet<S> r = f * sigmoid(f);
  detail::check_finite(r, "jet silu");
  return r;
}

template <class S>
Jet<S> tanh(const Jet<S>& f) {
  using std::tanh;
  S g0;
  if constexpr (std::is_floating_point_v<S>) {
    g0 = std::tanh(f[0]);
  } else {
    g0 = tanh(f[0]);  // tape node
  }
  auto q = [](const std::vector<S>& g, int n) {
    // q = 1 - g^2.
    std::vector<S> out(static_cast<std::size_t>(n) + 1, S(0.0));
    for (int m = 0; m <= n; ++m) {
      S acc = S(0.0);
      for (int i = 0; i <= m; ++i) acc = acc + g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(m - i)];
      out[static_cast<std::size_t>(m)] = (m == 0) ? S(1.0) - acc : S(0.0) - acc;
    }
    return out;
  };
  Jet<S> r = detail::ode_compose(f, std::move(g0), q);
  detail::check_finite(r, "jet tanh");
  return r;
}

/// Fixed-order deterministic reduction for gradients accumulated on
/// independent tapes (index order, no pairwise tricks).
template <class Vec>
Vec sum_in_order(const std::vector<Vec>& parts) {
  Vec acc = parts.at(0);
  for (std::size_t i = 1; i < parts.size(); ++i) acc += parts[i];
  return acc;
}

}  // namespace hion
