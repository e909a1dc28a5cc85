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

#include "hion/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hion/manifest.hpp"

namespace hion {

namespace {

constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;

std::string loss_cell(const std::optional<double>& v) {
  return v ? format_g17(*v) : std::string{};
}

void write_train_csv_header(std::ostream& out) {
  out << "epoch,total,l17b,l17d,l17e,l17f,lr,wall_ms\n";
}

void write_train_csv_row(std::ostream& out, const EpochRecord& rec) {
  out << rec.epoch << ',' << format_g17(rec.losses.total) << ','
      << loss_cell(rec.losses.terminal_state) << ',' << loss_cell(rec.losses.costate_dyn) << ','
      << loss_cell(rec.losses.costate_term) << ',' << loss_cell(rec.losses.stationarity) << ','
      << format_g17(rec.lr) << ',' << format_g17(rec.wall_ms) << '\n';
}

std::map<std::string, double> loss_map(const LossBreakdown& b) {
  std::map<std::string, double> m;
  m["total"] = b.total;
  if (b.terminal_state) m["l17b"] = *b.terminal_state;
  if (b.costate_dyn) m["l17d"] = *b.costate_dyn;
  if (b.costate_term) m["l17e"] = *b.costate_term;
  if (b.stationarity) m["l17f"] = *b.stationarity;
  return m;
}

std::string delta_tag(const std::string& label) {
  std::string tag = label;
  for (char& c : tag) {
    if (c == '.') c = 'p';
  }
  return tag;
}

void ensure_outdir(const std::string& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory: " + outdir);
}

struct CommonArgs {
  std::string config_path;
  std::string outdir = "out";
  std::optional<long> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config = true) {
  if (with_config) {
    cmd->add_option("-c,--config", args.config_path, "Configuration file")->required();
  }
  cmd->add_option("-o,--outdir", args.outdir, "Output directory");
  cmd->add_option("--seed", args.seed, "Seed override");
  cmd->add_option("--threads", args.threads, "Worker threads for independent runs")
      ->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------
// train / finetune
// ---------------------------------------------------------------------------

int run_train(const CommonArgs& args, const std::string& from_flag, bool is_finetune) {
  const auto t_start = std::chrono::steady_clock::now();
  Config cfg = Config::parse_file(args.config_path);
  TrainSetup setup = train_setup_from_config(cfg);
  cfg.finish();
  if (args.seed) setup.train.seed = static_cast<std::uint64_t>(*args.seed);

  std::string parent_path = !from_flag.empty() ? from_flag : setup.train.finetune_from;
  if (is_finetune && parent_path.empty()) {
    throw ConfigError("finetune requires a parent checkpoint (--from or train.finetune_from)");
  }

  TmanoController ctrl;
  CheckpointMeta meta;
  meta.seed = setup.train.seed;
  if (!parent_path.empty()) {
    ctrl = load_checkpoint(parent_path);
    if (ctrl.system != setup.system) {
      throw ConfigError("finetune refused: parent checkpoint is for system \"" +
                        to_string(ctrl.system) + "\", config requests \"" +
                        to_string(setup.system) + "\"");
    }
    validate_cost(setup.system, setup.cost);
    ctrl.cost = setup.cost;
    ctrl.t_f = setup.t_f;
    const std::vector<int> want_state =
        std::vector<int>{ctrl.state_gen.dims.begin() + 1, ctrl.state_gen.dims.end() - 1};
    const std::vector<int> want_costate =
        std::vector<int>{ctrl.costate_gen.dims.begin() + 1, ctrl.costate_gen.dims.end() - 1};
    if (setup.arch.state_hidden != want_state || setup.arch.costate_hidden != want_costate) {
      throw ConfigError("finetune refused: [model] hidden sizes do not match the parent checkpoint");
    }
    meta.parent_hash = sha256_file(parent_path);
  } else {
    ctrl = make_controller(setup.system, setup.cost, setup.arch, setup.train.seed, setup.t_f);
  }

  ensure_outdir(args.outdir);
  std::ofstream csv(args.outdir + "/train.csv", std::ios::binary);
  if (!csv) throw IoError("cannot write " + args.outdir + "/train.csv");
  write_train_csv_header(csv);

  const TrainResult result =
      train(ctrl, setup.train, [&csv](const EpochRecord& rec) { write_train_csv_row(csv, rec); });
  csv.close();

  meta.epochs_trained = result.epochs_run;
  meta.final_loss = loss_map(result.held_out);
  save_checkpoint(args.outdir + "/checkpoint.json", ctrl, meta);

  RunManifest manifest;
  manifest.command = is_finetune ? "finetune" : "train";
  manifest.config_path = args.config_path;
  manifest.config_snapshot = cfg.dump();
  manifest.seed = setup.train.seed;
  manifest.version = kVersion;
  manifest.outdir = args.outdir;
  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  manifest.add_artifact(args.outdir, "checkpoint.json");
  manifest.add_artifact(args.outdir, "train.csv");
  manifest.write(args.outdir + "/manifest.json");

  std::cout << "trained " << result.epochs_run << " epochs; held-out total loss "
            << format_g17(result.held_out.total) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tpbvp
// ---------------------------------------------------------------------------

State parse_state_arg(const std::string& text) {
  std::istringstream in(text);
  std::string part;
  std::vector<double> vals;
  while (std::getline(in, part, ',')) {
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (end == part.c_str()) throw ConfigError("cannot parse state component \"" + part + "\"");
    vals.push_back(v);
  }
  if (vals.size() != 2) {
    throw ConfigError("expected 2 state components, got " + std::to_string(vals.size()));
  }
  return State(vals[0], vals[1]);
}

int run_tpbvp(const CommonArgs& args, const std::string& ckpt, const std::string& x0_text,
              double xr, int n_points) {
  const auto t_start = std::chrono::steady_clock::now();
  if (n_points < 2) throw ConfigError("--n-points must be >= 2");
  const TmanoController ctrl = load_checkpoint(ckpt);
  const State x0 = parse_state_arg(x0_text);

  Trajectory traj;
  traj.rows.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t = ctrl.t_f * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const ForwardResult r = forward(ctrl, t, x0, xr);
    TrajectoryRow row;
    row.t = t;
    row.x = r.state_value();
    row.u = r.u[0];
    row.lambda = r.costate_value();
    row.x_ref = xr;
    row.phase = 0;
    row.observed = (i == 0);
    traj.rows.push_back(row);
  }
  ensure_outdir(args.outdir);
  write_trajectory_csv(args.outdir + "/tpbvp.csv", traj);

  RunManifest manifest;
  manifest.command = "tpbvp";
  manifest.config_path = ckpt;
  manifest.config_snapshot = "";
  manifest.seed = 0;
  manifest.version = kVersion;
  manifest.outdir = args.outdir;
  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  manifest.add_artifact(args.outdir, "tpbvp.csv");
  manifest.write(args.outdir + "/manifest.json");
  std::cout << "tpbvp: wrote " << n_points << " rows over [0, " << ctrl.t_f << "]\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate / compare
// ---------------------------------------------------------------------------

struct LabeledRun {
  std::string controller;
  std::string delta_label;
  RunResult result;
};

LabeledRun run_one(const Scenario& base, const Sampling& sampling, const TmanoController* hion,
                   const SlmpcConfig* slmpc) {
  Scenario sc = base;
  sc.sampling = sampling;
  LabeledRun out;
  out.delta_label = sampling.label();
  if (hion) {
    out.controller = "hion";
    HionPolicy policy(*hion);
    out.result = run_closed_loop(policy, sc);
  } else {
    out.controller = "slmpc";
    SlmpcPolicy policy(sc.system, *slmpc);
    out.result = run_closed_loop(policy, sc);
  }
  return out;
}

std::vector<LabeledRun> run_all(const Scenario& base,
                                const std::vector<std::pair<Sampling, bool>>& jobs,
                                const TmanoController* hion, const SlmpcConfig* slmpc,
                                int threads) {
  std::vector<LabeledRun> out(jobs.size());
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      out[i] = run_one(base, jobs[i].first, jobs[i].second ? hion : nullptr,
                       jobs[i].second ? nullptr : slmpc);
    }
    return out;
  }
  std::vector<std::future<LabeledRun>> futs;
  futs.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    futs.push_back(std::async(std::launch::async, [&, i] {
      return run_one(base, jobs[i].first, jobs[i].second ? hion : nullptr,
                     jobs[i].second ? nullptr : slmpc);
    }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = futs[i].get();
  return out;
}

int run_simulate(const CommonArgs& args, const std::string& ckpt, const std::string& slmpc_path,
                 const std::vector<std::string>& deltas) {
  const auto t_start = std::chrono::steady_clock::now();
  if (ckpt.empty() == slmpc_path.empty()) {
    throw ConfigError("simulate needs exactly one of --checkpoint or --slmpc");
  }
  Config cfg = Config::parse_file(args.config_path);
  Scenario scenario = scenario_from_config(cfg);
  cfg.finish();

  std::optional<TmanoController> hion;
  std::optional<SlmpcConfig> slmpc;
  if (!ckpt.empty()) {
    hion = load_checkpoint(ckpt);
    if (hion->system != scenario.system) {
      throw ConfigError("checkpoint system \"" + to_string(hion->system) +
                        "\" does not match scenario system \"" + to_string(scenario.system) + "\"");
    }
  } else {
    Config scfg = Config::parse_file(slmpc_path);
    slmpc = slmpc_from_config(scfg);
    scfg.finish();
    slmpc->cost = scenario.cost;
  }

  std::vector<std::pair<Sampling, bool>> jobs;
  if (deltas.empty()) {
    jobs.emplace_back(scenario.sampling, hion.has_value());
  } else {
    for (const std::string& d : deltas) jobs.emplace_back(Sampling::parse(d), hion.has_value());
  }

  const std::vector<LabeledRun> runs =
      run_all(scenario, jobs, hion ? &*hion : nullptr, slmpc ? &*slmpc : nullptr, args.threads);

  ensure_outdir(args.outdir);
  RunManifest manifest;
  std::ofstream metrics_csv(args.outdir + "/metrics.csv", std::ios::binary);
  if (!metrics_csv) throw IoError("cannot write metrics.csv");
  metrics_csv << "delta,J,tracking\n";
  for (const LabeledRun& run : runs) {
    const std::string name = runs.size() == 1
                                 ? std::string("trajectory.csv")
                                 : "trajectory_" + delta_tag(run.delta_label) + ".csv";
    write_trajectory_csv(args.outdir + "/" + name, run.result.trajectory);
    manifest.add_artifact(args.outdir, name);
    metrics_csv << run.delta_label << ',' << format_g17(run.result.metrics.J) << ','
                << format_g17(run.result.metrics.tracking) << '\n';
    std::cout << "delta=" << run.delta_label << " J=" << format_g17(run.result.metrics.J)
              << " tracking=" << format_g17(run.result.metrics.tracking) << "\n";
  }
  metrics_csv.close();
  manifest.add_artifact(args.outdir, "metrics.csv");

  manifest.command = "simulate";
  manifest.config_path = args.config_path;
  manifest.config_snapshot = cfg.dump();
  manifest.seed = 0;
  manifest.version = kVersion;
  manifest.outdir = args.outdir;
  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  manifest.write(args.outdir + "/manifest.json");
  return 0;
}

int run_compare(const CommonArgs& args, const std::string& ckpt, const std::string& slmpc_path) {
  const auto t_start = std::chrono::steady_clock::now();
  Config cfg = Config::parse_file(args.config_path);
  Scenario scenario = scenario_from_config(cfg);
  const std::vector<std::string> hion_deltas =
      cfg.get_string_list_or("compare.hion_deltas", {"realtime", "0.5", "tf"});
  cfg.finish();

  TmanoController hion = load_checkpoint(ckpt);
  if (hion.system != scenario.system) {
    throw ConfigError("checkpoint system does not match scenario system");
  }
  Config scfg = Config::parse_file(slmpc_path);
  SlmpcConfig slmpc = slmpc_from_config(scfg);
  scfg.finish();
  slmpc.cost = scenario.cost;

  std::vector<std::pair<Sampling, bool>> jobs;
  for (const std::string& d : hion_deltas) jobs.emplace_back(Sampling::parse(d), true);
  jobs.emplace_back(Sampling::every(slmpc.delta), false);

  std::vector<LabeledRun> runs = run_all(scenario, jobs, &hion, &slmpc, args.threads);

  ensure_outdir(args.outdir);
  RunManifest manifest;
  for (const LabeledRun& run : runs) {
    const std::string name =
        "trajectory_" + run.controller + "_" + delta_tag(run.delta_label) + ".csv";
    write_trajectory_csv(args.outdir + "/" + name, run.result.trajectory);
    manifest.add_artifact(args.outdir, name);
  }

  std::stable_sort(runs.begin(), runs.end(), [](const LabeledRun& a, const LabeledRun& b) {
    return a.result.metrics.J < b.result.metrics.J;
  });

  std::ofstream csv(args.outdir + "/compare.csv", std::ios::binary);
  if (!csv) throw IoError("cannot write compare.csv");
  csv << "controller,delta,J,tracking\n";
  std::cout << "controller  delta      J           tracking\n";
  for (const LabeledRun& run : runs) {
    csv << run.controller << ',' << run.delta_label << ',' << format_g17(run.result.metrics.J)
        << ',' << format_g17(run.result.metrics.tracking) << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%-11s %-10s %-11.6g %-11.6g", run.controller.c_str(),
                  run.delta_label.c_str(), run.result.metrics.J, run.result.metrics.tracking);
    std::cout << line << "\n";
  }
  csv.close();
  manifest.add_artifact(args.outdir, "compare.csv");

  manifest.command = "compare";
  manifest.config_path = args.config_path;
  manifest.config_snapshot = cfg.dump();
  manifest.seed = 0;
  manifest.version = kVersion;
  manifest.outdir = args.outdir;
  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  manifest.write(args.outdir + "/manifest.json");
  return 0;
}

}  // namespace

TrainSetup train_setup_from_config(const Config& cfg) {
  TrainSetup s;
  s.system = system_from_string(cfg.get_string("system.id"));
  s.t_f = cfg.get_number("system.t_f");
  if (!(s.t_f > 0.0)) throw ConfigError("system.t_f must be > 0");
  s.cost.id = cost_from_string(cfg.get_string("cost.id"));
  s.cost.kappa = cfg.get_number_or("cost.kappa", 1.0);
  validate_cost(s.system, s.cost);

  auto to_int_vec = [](const std::vector<long>& v) {
    std::vector<int> out;
    for (long x : v) out.push_back(static_cast<int>(x));
    return out;
  };
  s.arch.state_hidden = to_int_vec(cfg.get_int_list_or("model.state_hidden", {64, 64, 64}));
  s.arch.costate_hidden = to_int_vec(cfg.get_int_list_or("model.costate_hidden", {64, 64, 64}));

  TrainConfig& t = s.train;
  t.n_epochs = cfg.get_int_or("train.n_epochs", s.system == SystemId::vanderpol ? 50000 : 20000);
  t.batch_size = static_cast<int>(cfg.get_int_or("train.batch_size", 256));
  t.n_transient = static_cast<int>(cfg.get_int_or("train.n_transient", 8));
  t.lr = cfg.get_number_or("train.lr", 1e-3);
  t.adam_beta1 = cfg.get_number_or("train.adam_beta1", 0.9);
  t.adam_beta2 = cfg.get_number_or("train.adam_beta2", 0.999);
  t.adam_eps = cfg.get_number_or("train.adam_eps", 1e-8);
  t.seed = cfg.get_u64_or("train.seed", 1);
  t.cosine_decay = cfg.get_bool_or("train.cosine_decay", false);
  t.finetune_from = cfg.get_string_or("train.finetune_from", "");
  t.loss_weights.init_state = cfg.get_number_or("train.loss_weights.init_state", 1.0);
  t.loss_weights.terminal_state = cfg.get_number_or("train.loss_weights.terminal_state", 1.0);
  t.loss_weights.ode = cfg.get_number_or("train.loss_weights.ode", 1.0);
  t.loss_weights.costate_dyn = cfg.get_number_or("train.loss_weights.costate_dyn", 1.0);
  t.loss_weights.costate_term = cfg.get_number_or("train.loss_weights.costate_term", 1.0);
  t.loss_weights.stationarity = cfg.get_number_or("train.loss_weights.stationarity", 1.0);
  t.validate();
  return s;
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario s;
  s.system = system_from_string(cfg.get_string("scenario.system"));
  s.cost.id = cost_from_string(cfg.get_string("scenario.cost"));
  s.cost.kappa = cfg.get_number_or("scenario.kappa", 1.0);
  s.sampling = Sampling::parse(cfg.get_scalar_as_string("scenario.sampling_period"));
  s.duration = cfg.get_number("scenario.duration");
  const std::vector<double> init = cfg.get_number_list("scenario.initial_state");
  if (init.size() != 2) throw ConfigError("scenario.initial_state must have 2 components");
  s.initial_state = State(init[0], init[1]);
  s.schedule.clear();
  for (const auto& [time, value] : cfg.get_pair_list("scenario.reference_schedule")) {
    s.schedule.push_back({time, value});
  }
  s.integrator_step = cfg.get_number_or("scenario.integrator_step", 0.01);
  s.validate();
  return s;
}

SlmpcConfig slmpc_from_config(const Config& cfg) {
  SlmpcConfig s;
  s.horizon = cfg.get_number_or("slmpc.horizon", 2.5);
  s.n_steps = static_cast<int>(cfg.get_int_or("slmpc.n_steps", 25));
  s.delta = cfg.get_number_or("slmpc.delta", 0.5);
  if (cfg.has("slmpc.u_bound")) s.u_bound = cfg.get_number("slmpc.u_bound");
  s.validate();
  return s;
}

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"Hion: Hamiltonian-informed optimal neural controllers"};
  app.require_subcommand(1);

  CommonArgs train_args, finetune_args, tpbvp_args, sim_args, cmp_args;
  std::string finetune_from, tpbvp_ckpt, tpbvp_x0 = "0,0", sim_ckpt, sim_slmpc, cmp_ckpt,
              cmp_slmpc;
  double tpbvp_xr = 0.0;
  int tpbvp_n = 201;
  std::vector<std::string> sim_deltas;

  CLI::App* cmd_train = app.add_subcommand("train", "Train a controller from a config file");
  add_common(cmd_train, train_args);

  CLI::App* cmd_finetune =
      app.add_subcommand("finetune", "Continue training from a parent checkpoint");
  add_common(cmd_finetune, finetune_args);
  cmd_finetune->add_option("--from", finetune_from, "Parent checkpoint (overrides config)");

  CLI::App* cmd_tpbvp = app.add_subcommand("tpbvp", "Boundary-value solve on a time grid");
  add_common(cmd_tpbvp, tpbvp_args, /*with_config=*/false);
  cmd_tpbvp->add_option("--checkpoint", tpbvp_ckpt, "Trained checkpoint")->required();
  cmd_tpbvp->add_option("--x0", tpbvp_x0, "Observed state, comma separated")->required();
  cmd_tpbvp->add_option("--xr", tpbvp_xr, "Reference state")->required();
  cmd_tpbvp->add_option("--n-points", tpbvp_n, "Grid points over [0, t_f]");

  CLI::App* cmd_sim = app.add_subcommand("simulate", "Closed-loop simulation of a scenario");
  add_common(cmd_sim, sim_args);
  cmd_sim->add_option("--checkpoint", sim_ckpt, "Hion checkpoint");
  cmd_sim->add_option("--slmpc", sim_slmpc, "SLMPC config file");
  cmd_sim->add_option("--delta", sim_deltas,
                      "Sampling-period override (repeatable: number, realtime, tf)");

  CLI::App* cmd_cmp = app.add_subcommand("compare", "Hion vs SLMPC comparison table");
  add_common(cmd_cmp, cmp_args);
  cmd_cmp->add_option("--checkpoint", cmp_ckpt, "Hion checkpoint")->required();
  cmd_cmp->add_option("--slmpc", cmp_slmpc, "SLMPC config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(cmd_train)) return run_train(train_args, "", false);
    if (app.got_subcommand(cmd_finetune)) return run_train(finetune_args, finetune_from, true);
    if (app.got_subcommand(cmd_tpbvp)) {
      return run_tpbvp(tpbvp_args, tpbvp_ckpt, tpbvp_x0, tpbvp_xr, tpbvp_n);
    }
    if (app.got_subcommand(cmd_sim)) return run_simulate(sim_args, sim_ckpt, sim_slmpc, sim_deltas);
    if (app.got_subcommand(cmd_cmp)) return run_compare(cmp_args, cmp_ckpt, cmp_slmpc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "runtime abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime abort: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace hion
