#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fasim/config.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json complex_json(fasim::Complex z) { return json::array({z.real(), z.imag()}); }
json point_json(const fasim::Point& p) { return json::array({p.x, p.y}); }

fasim::Point parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw fasim::ConfigError("expected a point as 'x,y', got '" + s + "'");
  return fasim::Point{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw fasim::ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::string> out_dir;
};

fasim::ExperimentConfig load(const GlobalOpts& g) {
  if (g.config_path.empty()) throw fasim::ConfigError("--config is required");
  auto cfg = fasim::load_config(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.train.seed = *g.seed;
  }
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  return cfg;
}

fs::path prepare_out_dir(const fasim::ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

int cmd_trace(const GlobalOpts& g, const std::string& tx_s, const std::string& rx_s) {
  const auto cfg = load(g);
  const fasim::Point tx = parse_point(tx_s);
  const fasim::Point rx = parse_point(rx_s);
  const auto& layout = cfg.layout;
  const double lambda = cfg.radio.wavelength();

  const auto ind = fasim::indicator_functions(layout, tx, rx);
  json walls = json::array();
  for (std::size_t i = 0; i < layout.wall_count(); ++i) {
    json w;
    w["index"] = i;
    w["present"] = static_cast<bool>(ind.wall_nlos[i]);
    if (ind.wall_nlos[i]) {
      const auto d = fasim::angle_distances(layout, i, tx, rx);
      const double len = fasim::nlos_length(d);
      const double alpha = fasim::incidence_angle(d);
      const double gamma =
          fasim::fresnel_gamma(alpha, layout.permittivity()[i], cfg.radio.polarization);
      const fasim::Complex term =
          gamma * std::polar(1.0, -2.0 * std::numbers::pi * len / lambda) / len;
      w["reflection_point"] = point_json(fasim::reflection_point(layout.wall(i), tx, rx));
      w["d1"] = d.d1;
      w["d2"] = d.d2;
      w["d3"] = d.d3;
      w["length"] = len;
      w["incidence_rad"] = alpha;
      w["gamma"] = gamma;
      w["term"] = complex_json(term);
    }
    walls.push_back(std::move(w));
  }

  json out;
  out["tx"] = point_json(tx);
  out["rx"] = point_json(rx);
  out["walls"] = std::move(walls);
  json los;
  los["present"] = ind.los;
  if (ind.los) {
    const double len = fasim::distance(tx, rx);
    los["length"] = len;
    los["term"] = complex_json(std::polar(1.0, -2.0 * std::numbers::pi * len / lambda) / len);
  }
  out["los"] = std::move(los);
  const fasim::Complex h = fasim::channel_coefficient(layout, cfg.radio, tx, rx);
  out["coefficient"] = complex_json(h);
  out["magnitude"] = std::abs(h);
  out["path_loss_db"] = std::abs(h) > 0.0 ? -20.0 * std::log10(std::abs(h))
                                          : fasim::kPathLossFloorDb;
  std::cout << out.dump(2) << '\n';
  return 0;
}

json solution_json(const fasim::TwoRaySolution& s) {
  json cands = json::array();
  for (const auto& c : s.candidates) {
    json cj{{"theta", c.theta}, {"snr", c.snr}};
    if (c.n)
      cj["n"] = *c.n;
    else
      cj["n"] = nullptr;
    cands.push_back(std::move(cj));
  }
  const char* case_name = s.case_id == fasim::TwoRayCase::Case1   ? "case1"
                          : s.case_id == fasim::TwoRayCase::Case2 ? "case2"
                                                                  : "case3";
  return json{{"theta_star", s.theta_star},
              {"theta_star_pi", s.theta_star / std::numbers::pi},
              {"snr", s.snr},
              {"rate_bps_hz", s.rate},
              {"case", case_name},
              {"gamma_sign_mixed", s.gamma_sign_mixed},
              {"candidates", std::move(cands)}};
}

int cmd_tworay_solve(const GlobalOpts& g, int grid_points) {
  const auto cfg = load(g);
  if (!cfg.tworay) throw fasim::ConfigError("config has no 'tworay' block");
  const auto closed = fasim::solve_closed_form(*cfg.tworay);
  const auto oracle = fasim::exhaustive_search(*cfg.tworay, grid_points);
  json out;
  out["closed_form"] = solution_json(closed);
  out["exhaustive"] = solution_json(oracle);
  out["rate_gap_bps_hz"] = oracle.rate - closed.rate;
  out["optimality_ratio"] = oracle.rate > 0.0 ? closed.rate / oracle.rate : 1.0;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_radiomap(const GlobalOpts& g) {
  const auto cfg = load(g);
  if (!cfg.radiomap) throw fasim::ConfigError("config has no 'radiomap' block");
  const auto out_dir = prepare_out_dir(cfg);
  const auto& rm = *cfg.radiomap;

  const auto model = fasim::path_loss_map(cfg.layout, cfg.radio, rm.tx, rm.resolution, g.workers);
  const auto oracle = fasim::path_loss_map_reference(cfg.layout, cfg.radio, rm.tx, rm.resolution,
                                                     rm.oracle_order, g.workers);
  fasim::write_map_csv(out_dir / "model_map.csv", model);
  fasim::write_map_binary(out_dir / "model_map.bin", model);
  fasim::write_map_csv(out_dir / "oracle_map.csv", oracle);
  fasim::write_map_binary(out_dir / "oracle_map.bin", oracle);

  const auto metrics = fasim::map_metrics(model, oracle);
  const double p = cfg.constraints.p_max;
  std::size_t cells = 0;
  for (auto m : model.mask) cells += m;
  json out{{"mae_db", metrics.mae_db},
           {"rmse_db", metrics.rmse_db},
           {"average_rate_model_bps_hz", fasim::average_rate(model, cfg.radio, p)},
           {"average_rate_oracle_bps_hz", fasim::average_rate(oracle, cfg.radio, p)},
           {"oracle_order", rm.oracle_order},
           {"resolution_m", rm.resolution},
           {"masked_cells", cells}};
  out["average_rate_gap_bps_hz"] = std::abs(out["average_rate_model_bps_hz"].get<double>() -
                                            out["average_rate_oracle_bps_hz"].get<double>());
  write_json(out_dir / "metrics.json", out);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_optimize(const GlobalOpts& g, const std::string& method, int samples, int grid_count,
                 double spacing, std::optional<double> anchor_x) {
  const auto cfg = load(g);
  const auto out_dir = prepare_out_dir(cfg);
  if (cfg.scenario.receivers.empty())
    throw fasim::ConfigError("scenario needs at least one receiver");
  const fasim::FasLine fas{cfg.scenario.fas_y0, cfg.scenario.receivers[0]};

  json out;
  out["method"] = method;
  if (method == "gs") {
    const double ax = anchor_x ? *anchor_x : cfg.scenario.anchor_x_lo;
    const auto r = fasim::grid_search_positions(cfg.layout, cfg.radio, cfg.scenario.receivers,
                                                cfg.scenario.n_antennas, fas, cfg.constraints, ax,
                                                spacing, grid_count, 1000000, g.workers);
    out["sum_rate_bps_hz"] = r.sum_rate;
    out["combinations"] = r.combinations;
    out["positions_x"] = r.positions_x;
    out["thetas"] = r.thetas;
    json beams = json::array();
    for (const auto& w : r.beams.vectors) {
      json bw = json::array();
      for (Eigen::Index i = 0; i < w.size(); ++i) bw.push_back(complex_json(w[i]));
      beams.push_back(std::move(bw));
    }
    out["beams"] = std::move(beams);
  } else if (method == "fp") {
    const auto r = fasim::wmmse_fixed_positions(cfg.layout, cfg.radio, cfg.scenario.receivers,
                                                cfg.scenario.n_antennas, fas, cfg.constraints,
                                                samples, cfg.seed);
    out["mean_sum_rate_bps_hz"] = r.mean_rate;
    out["stddev_bps_hz"] = r.stddev;
    out["samples"] = r.samples;
  } else {
    throw fasim::ConfigError("optimize: method must be 'gs' or 'fp'");
  }
  write_json(out_dir / "optimize_result.json", out);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& baseline, bool timings) {
  const auto cfg = load(g);
  const auto out_dir = prepare_out_dir(cfg);
  if (cfg.scenario.receivers.empty())
    throw fasim::ConfigError("scenario needs at least one receiver");

  fasim::rl::PlacementEnv env(cfg.layout, cfg.radio, cfg.scenario.receivers, cfg.scenario.fas_y0,
                              cfg.constraints, cfg.scenario.anchor_x_lo, cfg.scenario.anchor_x_hi,
                              cfg.scenario.n_antennas, cfg.train.infeasible_penalty);

  json out;
  if (baseline.empty()) {
    fasim::rl::PpoDiagnostics diag;
    const auto ref = fasim::rl::ppo_init(env, cfg.train, &diag);
    fasim::save_checkpoint(out_dir / "ref_checkpoint.json", ref, cfg.train, cfg.seed);

    fasim::JsonlTrainLogger logger(out_dir / "grpo_log.jsonl", timings);
    const auto result = fasim::rl::grpo_train(env, cfg.train, ref, &logger);
    fasim::save_checkpoint(out_dir / "checkpoint.json", result.policy, cfg.train, cfg.seed);

    out["ppo_init_env_steps"] = diag.env_steps;
    out["grpo_env_steps"] = result.env_steps;
    out["grpo_iterations"] = cfg.train.grpo_iterations;
    out["skipped_updates"] = result.skipped_updates;
    if (!result.history.empty()) {
      out["final_group_mean"] = result.history.back().group_mean;
      out["final_group_max"] = result.history.back().group_max;
    }
    out["actor_parameters"] = diag.actor_parameters;
    out["critic_parameters"] = diag.critic_parameters;
  } else if (baseline == "ppo") {
    fasim::rl::TrainConfig tc = cfg.train;
    fasim::rl::PpoDiagnostics diag;
    const auto actor = fasim::rl::ppo_init(env, tc, &diag);
    fasim::save_checkpoint(out_dir / "ppo_checkpoint.json", actor, tc, cfg.seed);
    fasim::JsonlTrainLogger logger(out_dir / "ppo_log.jsonl", timings);
    for (std::size_t i = 0; i < diag.mean_step_rewards.size(); ++i) {
      fasim::rl::IterationRecord rec;
      rec.iteration = static_cast<int>(i);
      rec.group_mean = diag.mean_step_rewards[i];
      rec.group_max = diag.max_step_rewards[i];
      rec.kl_mean = 0.0;
      logger.on_iteration(rec);
    }
    out["env_steps"] = diag.env_steps;
    out["updates"] = diag.mean_step_rewards.size();
    if (!diag.mean_step_rewards.empty()) out["final_mean_reward"] = diag.mean_step_rewards.back();
  } else if (baseline == "wmmse-fp" || baseline == "wmmse-gs") {
    const fasim::FasLine fas{cfg.scenario.fas_y0, cfg.scenario.receivers[0]};
    fasim::JsonlTrainLogger logger(out_dir / "baseline_log.jsonl", timings);
    fasim::rl::IterationRecord rec;
    if (baseline == "wmmse-fp") {
      const auto r = fasim::wmmse_fixed_positions(cfg.layout, cfg.radio, cfg.scenario.receivers,
                                                  cfg.scenario.n_antennas, fas, cfg.constraints,
                                                  200, cfg.seed);
      rec.group_mean = r.mean_rate;
      rec.group_max = r.mean_rate + r.stddev;
      out["mean_sum_rate_bps_hz"] = r.mean_rate;
    } else {
      const auto r = fasim::grid_search_positions(cfg.layout, cfg.radio, cfg.scenario.receivers,
                                                  cfg.scenario.n_antennas, fas, cfg.constraints,
                                                  cfg.scenario.anchor_x_lo, 0.03, 26, 1000000,
                                                  g.workers);
      rec.group_mean = r.sum_rate;
      rec.group_max = r.sum_rate;
      out["sum_rate_bps_hz"] = r.sum_rate;
      out["combinations"] = r.combinations;
    }
    logger.on_iteration(rec);
  } else {
    throw fasim::ConfigError("train: --baseline must be ppo, wmmse-fp or wmmse-gs");
  }
  write_json(out_dir / "train_summary.json", out);
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor antenna-placement channel simulator and optimizer"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Experiment configuration file")->required(false);
  app.add_option("--seed", g.seed, "Override the configured random seed");
  app.add_option("--workers", g.workers, "Worker threads for grid/map evaluation")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "Override the configured output directory");

  std::string tx_s, rx_s;
  auto* trace = app.add_subcommand("trace", "Ray report for one Tx-Rx pair");
  trace->add_option("--tx", tx_s, "Transmitter position 'x,y'")->required();
  trace->add_option("--rx", rx_s, "Receiver position 'x,y'")->required();

  int grid_points = 100000;
  auto* tworay = app.add_subcommand("tworay-solve", "Closed-form and exhaustive two-ray solutions");
  tworay->add_option("--grid", grid_points, "Exhaustive search grid points");

  app.add_subcommand("radiomap", "Path-loss maps and fidelity metrics");

  std::string method = "gs";
  int samples = 200, grid_count = 26;
  double spacing = 0.03;
  std::optional<double> anchor_x;
  auto* optimize = app.add_subcommand("optimize", "Beamforming/placement baselines");
  optimize->add_option("--method", method, "gs (grid search) or fp (random fixed positions)");
  optimize->add_option("--samples", samples, "Samples for the fp method");
  optimize->add_option("--grid-count", grid_count, "Grid points for the gs method");
  optimize->add_option("--spacing", spacing, "Grid spacing in meters for the gs method");
  optimize->add_option("--anchor-x", anchor_x, "Grid anchor x (default: scenario anchor)");

  std::string baseline;
  bool timings = false;
  auto* train = app.add_subcommand("train", "Policy-gradient training and baselines");
  train->add_option("--baseline", baseline, "Run a baseline instead: ppo, wmmse-fp, wmmse-gs");
  train->add_flag("--timings", timings, "Record wall-clock times in training logs");

  try {
    app.parse(argc, argv);
    if (trace->parsed()) return cmd_trace(g, tx_s, rx_s);
    if (tworay->parsed()) return cmd_tworay_solve(g, grid_points);
    if (app.get_subcommand("radiomap")->parsed()) return cmd_radiomap(g);
    if (optimize->parsed()) return cmd_optimize(g, method, samples, grid_count, spacing, anchor_x);
    if (train->parsed()) return cmd_train(g, baseline, timings);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const fasim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fasim::InfeasibleError& e) {
    std::cerr << "infeasible scenario: " << e.what() << '\n';
    return 3;
  } catch (const fasim::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
