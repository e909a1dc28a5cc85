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

#include "hion/controller.hpp"

#include <fstream>

#include <json.hpp>

namespace hion {

namespace {

std::vector<int> with_bounds(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

Eigen::VectorXd TmanoController::pack_params() const {
  Eigen::VectorXd p(param_count());
  state_gen.pack(p.head(state_gen.param_count()));
  costate_gen.pack(p.tail(costate_gen.param_count()));
  return p;
}

void TmanoController::unpack_params(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != param_count()) throw ConfigError("unpack_params: size mismatch");
  state_gen.unpack(p.head(state_gen.param_count()));
  costate_gen.unpack(p.tail(costate_gen.param_count()));
}

TmanoController make_controller(SystemId system, const CostSpec& cost, const ControllerArch& arch,
                                std::uint64_t seed, std::optional<double> t_f_override) {
  validate_cost(system, cost);
  TmanoController c;
  c.system = system;
  c.spec = system_spec(system);
  c.cost = cost;
  c.t_f = t_f_override.value_or(c.spec.t_f);
  if (c.t_f <= 0.0) throw ConfigError("controller t_f must be > 0");
  const int n = c.spec.n_states;
  const int r = c.spec.n_reference;
  const int m = c.spec.n_controls;
  Rng rng(splitmix64(seed));
  c.state_gen = init_params(rng, with_bounds(1 + n + r, arch.state_hidden, c.spec.n_primitive));
  c.costate_gen = init_params(rng, with_bounds(1 + n + r + n + m, arch.costate_hidden, n));
  return c;
}

MaskResult invariant_mask(const SystemSpec& spec, const State& x_o, double x_r) {
  MaskResult out;
  out.masked_xo = x_o;
  out.shifted_xr = x_r;
  if (!spec.invariant_flags.empty() && spec.invariant_flags[0]) {
    out.delta = x_o[0];
    out.masked_xo[0] = 0.0;
    out.shifted_xr = x_r - out.delta;
  }
  return out;
}

ForwardResult forward(const TmanoController& ctrl, double t_hat, const State& x_o, double x_r) {
  const int k = ctrl.spec.ode_order;
  const int ord = k + 1;  // one extra order so the control rate (and exact
                          // co-state rates through it) exist
  const MaskResult mask = invariant_mask(ctrl.spec, x_o, x_r);

  const Jet<double> tj = jet_lift_time(t_hat, ord);
  std::vector<Jet<double>> sin;
  sin.push_back(tj);
  sin.push_back(Jet<double>::constant(mask.masked_xo[0], ord));
  sin.push_back(Jet<double>::constant(mask.masked_xo[1], ord));
  sin.push_back(Jet<double>::constant(mask.shifted_xr, ord));
  const Jet<double> x_hat = ctrl.state_gen.forward_jets(sin)[0];

  // Shifted (invariant) frame first; the offset is restored on the output.
  const Jet<double> x0s = taylor_operator(tj, mask.masked_xo, x_hat, k, 0.0);
  Jet<double> x0r = x0s;
  x0r[0] += mask.delta;

  const Jet<double> u = control_definition(ctrl.system, x0r);

  std::vector<Jet<double>> cin;
  cin.push_back(truncate(tj, 1));
  cin.push_back(Jet<double>::constant(mask.masked_xo[0], 1));
  cin.push_back(Jet<double>::constant(mask.masked_xo[1], 1));
  cin.push_back(Jet<double>::constant(mask.shifted_xr, 1));
  cin.push_back(truncate(x0s, 1));
  cin.push_back(truncate(derivative(x0s, 1), 1));
  cin.push_back(truncate(u, 1));
  std::vector<Jet<double>> lam = ctrl.costate_gen.forward_jets(cin);

  ForwardResult out;
  out.x0 = truncate(x0r, k);
  out.u = u;
  out.lambda = std::move(lam);
  out.extrapolated = (t_hat < 0.0) || (t_hat > ctrl.t_f * (1.0 + 1e-12) + 1e-12);
  return out;
}

void TmanoBatch::forward(const TmanoController& ctrl, const Eigen::VectorXd& t,
                         const Eigen::Matrix2Xd& x_o, const Eigen::VectorXd& x_r) {
  const Eigen::Index N = t.size();
  if (x_o.cols() != N || x_r.size() != N) throw ConfigError("batch forward: column mismatch");
  t_ = t;
  xo_ = x_o;
  xr_ = x_r;

  const bool invariant = !ctrl.spec.invariant_flags.empty() && ctrl.spec.invariant_flags[0];
  mxo_ = x_o;
  if (invariant) {
    delta_ = x_o.row(0).transpose().array();
    mxo_.row(0).setZero();
    sxr_ = x_r.array() - delta_;
  } else {
    delta_ = Eigen::ArrayXd::Zero(N);
    sxr_ = x_r.array();
  }

  // State generator over order-3 jets of t_hat.
  JetBatch sin;
  sin.setZero(4, N, 3);
  sin.ch[0].row(0) = t.transpose();
  sin.ch[0].row(1) = mxo_.row(0);
  sin.ch[0].row(2) = mxo_.row(1);
  sin.ch[0].row(3) = sxr_.transpose();
  sin.ch[1].row(0).setOnes();
  const JetBatch& hout = state_run_.forward(ctrl.state_gen, sin);
  for (int c = 0; c <= 3; ++c) h_[static_cast<std::size_t>(c)] = hout.ch[static_cast<std::size_t>(c)].row(0).transpose().array();

  // Taylor operator, k = 2, shifted frame.
  const Eigen::ArrayXd ta = t.array();
  const Eigen::ArrayXd t2 = ta.square();
  const Eigen::ArrayXd xo1 = mxo_.row(1).transpose().array();
  p_[0] = mxo_.row(0).transpose().array() + xo1 * ta + h_[0] * t2;
  p_[1] = xo1 + h_[1] * t2 + 2.0 * ta * h_[0];
  p_[2] = h_[2] * t2 + 4.0 * ta * h_[1] + 2.0 * h_[0];
  p_[3] = h_[3] * t2 + 6.0 * ta * h_[2] + 6.0 * h_[1];

  // Control definition on the state jets.
  switch (ctrl.system) {
    case SystemId::linear2:
      u_[0] = p_[2];
      u_[1] = p_[3];
      break;
    case SystemId::vanderpol: {
      const Eigen::ArrayXd one_m = 1.0 - p_[0].square();
      u_[0] = p_[2] - one_m * p_[1] + p_[0];
      u_[1] = p_[3] + 2.0 * p_[0] * p_[1].square() - one_m * p_[2] + p_[1];
      break;
    }
  }

  // Co-state generator over order-1 jets.
  JetBatch cin;
  cin.setZero(7, N, 1);
  cin.ch[0].row(0) = t.transpose();
  cin.ch[0].row(1) = mxo_.row(0);
  cin.ch[0].row(2) = mxo_.row(1);
  cin.ch[0].row(3) = sxr_.transpose();
  cin.ch[0].row(4) = p_[0].transpose();
  cin.ch[0].row(5) = p_[1].transpose();
  cin.ch[0].row(6) = u_[0].transpose();
  cin.ch[1].row(0).setOnes();
  cin.ch[1].row(4) = p_[1].transpose();
  cin.ch[1].row(5) = p_[2].transpose();
  cin.ch[1].row(6) = u_[1].transpose();
  const JetBatch& lout = costate_run_.forward(ctrl.costate_gen, cin);
  lam_[0] = lout.ch[0];
  lam_[1] = lout.ch[1];
}

Eigen::VectorXd TmanoBatch::backward(const TmanoController& ctrl,
                                     const std::array<Eigen::ArrayXd, 4>& gp_seed,
                                     const std::array<Eigen::ArrayXd, 2>& gu_seed,
                                     const std::array<Eigen::MatrixXd, 2>& glam) const {
  const Eigen::Index N = t_.size();
  Eigen::VectorXd grads = Eigen::VectorXd::Zero(ctrl.param_count());
  auto state_seg = grads.head(ctrl.state_gen.param_count());
  auto costate_seg = grads.tail(ctrl.costate_gen.param_count());

  std::array<Eigen::ArrayXd, 4> gp = gp_seed;
  std::array<Eigen::ArrayXd, 2> gu = gu_seed;

  // Co-state generator backward; its input adjoints feed the state/control
  // jets that entered as features.
  JetBatch glam_b;
  glam_b.order = 1;
  glam_b.ch[0] = glam[0];
  glam_b.ch[1] = glam[1];
  const JetBatch gcin = costate_run_.backward(ctrl.costate_gen, glam_b, costate_seg);
  gp[0] += gcin.ch[0].row(4).transpose().array();
  gp[1] += gcin.ch[1].row(4).transpose().array() + gcin.ch[0].row(5).transpose().array();
  gp[2] += gcin.ch[1].row(5).transpose().array();
  gu[0] += gcin.ch[0].row(6).transpose().array();
  gu[1] += gcin.ch[1].row(6).transpose().array();

  // Control-definition backward.
  switch (ctrl.system) {
    case SystemId::linear2:
      gp[2] += gu[0];
      gp[3] += gu[1];
      break;
    case SystemId::vanderpol: {
      const Eigen::ArrayXd one_m = 1.0 - p_[0].square();
      gp[0] += gu[0] * (2.0 * p_[0] * p_[1] + 1.0) + gu[1] * (2.0 * p_[1].square() + 2.0 * p_[0] * p_[2]);
      gp[1] += gu[0] * (-one_m) + gu[1] * (4.0 * p_[0] * p_[1] + 1.0);
      gp[2] += gu[0] + gu[1] * (-one_m);
      gp[3] += gu[1];
      break;
    }
  }

  // Taylor-operator backward into the state-generator output jets.
  const Eigen::ArrayXd ta = t_.array();
  const Eigen::ArrayXd t2 = ta.square();
  JetBatch gh;
  gh.setZero(1, N, 3);
  gh.ch[0].row(0) = (t2 * gp[0] + 2.0 * ta * gp[1] + 2.0 * gp[2]).transpose();
  gh.ch[1].row(0) = (t2 * gp[1] + 4.0 * ta * gp[2] + 6.0 * gp[3]).transpose();
  gh.ch[2].row(0) = (t2 * gp[2] + 6.0 * ta * gp[3]).transpose();
  gh.ch[3].row(0) = (t2 * gp[3]).transpose();
  state_run_.backward(ctrl.state_gen, gh, state_seg);

  return grads;
}

namespace {

nlohmann::json mlp_to_json(const Mlp& m) {
  nlohmann::json j;
  j["dims"] = m.dims;
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (int l = 0; l < m.n_layers(); ++l) {
    const auto& w = m.W[static_cast<std::size_t>(l)];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    weights.push_back(flat);
    const auto& bv = m.b[static_cast<std::size_t>(l)];
    biases.push_back(std::vector<double>(bv.data(), bv.data() + bv.size()));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp m;
  m.dims = j.at("dims").get<std::vector<int>>();
  if (m.dims.size() < 2) throw ConfigError("checkpoint: bad mlp dims");
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() != m.dims.size() - 1 || biases.size() != m.dims.size() - 1) {
    throw ConfigError("checkpoint: layer count mismatch");
  }
  for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
    const int rows = m.dims[l + 1];
    const int cols = m.dims[l];
    const auto flat = weights.at(l).get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != rows * cols) {
      throw ConfigError("checkpoint: weight size mismatch in layer " + std::to_string(l));
    }
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    }
    m.W.push_back(std::move(w));
    const auto bv = biases.at(l).get<std::vector<double>>();
    if (static_cast<int>(bv.size()) != rows) {
      throw ConfigError("checkpoint: bias size mismatch in layer " + std::to_string(l));
    }
    m.b.push_back(Eigen::Map<const Eigen::VectorXd>(bv.data(), rows));
  }
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const TmanoController& ctrl,
                     const CheckpointMeta& meta) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["system"] = to_string(ctrl.system);
  j["cost_id"] = to_string(ctrl.cost.id);
  j["kappa"] = ctrl.cost.kappa;
  j["t_f"] = ctrl.t_f;
  j["ode_order"] = ctrl.spec.ode_order;
  j["state_gen"] = mlp_to_json(ctrl.state_gen);
  j["costate_gen"] = mlp_to_json(ctrl.costate_gen);
  j["seed"] = meta.seed;
  j["epochs_trained"] = meta.epochs_trained;
  if (!meta.final_loss.empty()) j["final_loss"] = meta.final_loss;
  if (!meta.parent_hash.empty()) j["parent_hash"] = meta.parent_hash;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << j.dump(2) << "\n";
}

TmanoController load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("checkpoint parse error in " + path + ": " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw ConfigError("checkpoint: unsupported format_version");
    }
    TmanoController c;
    c.system = system_from_string(j.at("system").get<std::string>());
    c.spec = system_spec(c.system);
    c.cost.id = cost_from_string(j.at("cost_id").get<std::string>());
    c.cost.kappa = j.at("kappa").get<double>();
    validate_cost(c.system, c.cost);
    c.t_f = j.at("t_f").get<double>();
    if (c.t_f <= 0.0) throw ConfigError("checkpoint: t_f must be > 0");
    if (j.at("ode_order").get<int>() != c.spec.ode_order) {
      throw ConfigError("checkpoint: ode_order mismatch for system " + c.spec.name);
    }
    c.state_gen = mlp_from_json(j.at("state_gen"));
    c.costate_gen = mlp_from_json(j.at("costate_gen"));
    const int n = c.spec.n_states;
    const int r = c.spec.n_reference;
    if (c.state_gen.dims.front() != 1 + n + r || c.state_gen.dims.back() != c.spec.n_primitive) {
      throw ConfigError("checkpoint: state_gen dims do not match system " + c.spec.name);
    }
    if (c.costate_gen.dims.front() != 1 + n + r + n + c.spec.n_controls ||
        c.costate_gen.dims.back() != n) {
      throw ConfigError("checkpoint: costate_gen dims do not match system " + c.spec.name);
    }
    if (meta) {
      meta->seed = j.at("seed").get<std::uint64_t>();
      meta->epochs_trained = j.at("epochs_trained").get<long>();
      meta->final_loss.clear();
      if (j.contains("final_loss")) {
        meta->final_loss = j.at("final_loss").get<std::map<std::string, double>>();
      }
      meta->parent_hash = j.value("parent_hash", std::string{});
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint schema error in " + path + ": " + e.what());
  }
}

}  // namespace hion
