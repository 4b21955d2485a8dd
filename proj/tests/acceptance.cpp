// End-to-end acceptance suite. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fasim/config.hpp"
#include "fasim/rl/env.hpp"
#include "oracles.hpp"

using namespace fasim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const fs::path kConfigDir = FASIM_CONFIG_DIR;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.empty() ? "" : " | ", detail.c_str());
  if (!pass) ++g_failures;
}

fs::path out_dir() {
  const fs::path dir = fs::temp_directory_path() / "fasim_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string run_cli(const std::string& args) {
  const char* cli = std::getenv("FASIM_CLI");
  if (!cli) throw std::runtime_error("FASIM_CLI not set");
  const fs::path out = out_dir() / "cli_stdout.json";
  const std::string cmd = std::string(cli) + " " + args + " > " + out.string() + " 2>/dev/null";
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("cli failed: " + cmd);
  std::ifstream in(out);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double rect_rate_at(double theta, const Point& rx, double f, Polarization pol) {
  const Layout room = testing::rect(5, 5);
  RadioParams params;
  params.frequency_hz = f;
  params.polarization = pol;
  const Point tx = theta_to_position(theta, FasLine{0.5, rx});
  const Complex h = channel_coefficient(room, params, tx, rx);
  return std::log2(1.0 + std::norm(h) / params.noise_power_w);
}

// ---------------------------------------------------------------------------
// Criterion 1: published closed-form angles and rates for the 5x5 room.
void criterion_1() {
  Timer timer;
  struct Row {
    const char* config;
    Point rx;
    double f;
    double theta_table_pi;
    double rate_table;
  };
  const std::vector<Row> rows{
      {"tworay_rx1_5ghz.json", {1.5, 1.5}, 5e9, 0.6084, 25.4155},
      {"tworay_rx1_60ghz.json", {1.5, 1.5}, 60e9, 0.6010, 18.8406},
      {"tworay_rx2_5ghz.json", {4.25, 3.0}, 5e9, 0.2998, 20.9301},
      {"tworay_rx2_60ghz.json", {4.25, 3.0}, 60e9, 0.2998, 16.0837},
  };

  bool all_pass = true;
  std::string matched_notes;
  for (const Row& row : rows) {
    const json out = json::parse(
        run_cli("--config " + (kConfigDir / row.config).string() + " tworay-solve"));
    const double theta_pi = out.at("closed_form").at("theta_star_pi").get<double>();
    const double rate_tworay = out.at("closed_form").at("rate_bps_hz").get<double>();
    const bool theta_ok = std::abs(theta_pi - row.theta_table_pi) <= 0.0005;

    // Rate under both model interpretations (and both polarizations, which
    // the published table leaves unstated).
    double best_gap = std::abs(rate_tworay - row.rate_table);
    std::string best = "two-ray";
    for (Polarization pol : {Polarization::TM, Polarization::TE}) {
      const double rect = rect_rate_at(theta_pi * kPi, row.rx, row.f, pol);
      const double gap = std::abs(rect - row.rate_table);
      if (gap < best_gap) {
        best_gap = gap;
        best = std::string("full-rectangle/") + (pol == Polarization::TM ? "TM" : "TE");
      }
    }
    const bool rate_ok = best_gap <= 0.5;
    std::printf("    %-22s theta*=%.4fpi (published %.4fpi) %s; closest rate "
                "interpretation %s gap %.3f bps/Hz %s\n",
                row.config, theta_pi, row.theta_table_pi, theta_ok ? "ok" : "MISMATCH",
                best.c_str(), best_gap, rate_ok ? "ok" : "MISMATCH");
    matched_notes += std::string(row.config) + "->" + best + " ";
    all_pass = all_pass && theta_ok && rate_ok;
  }

  // Diagnostic: the published table's first receiver is stated as (1.5, 1.5),
  // but its angle/rate values are only reachable with the (1.25, 1.25)
  // receiver used by the rest of the published experiments. Not scored.
  for (double f : {5e9, 60e9}) {
    TwoRayInstance inst;
    inst.x1 = 1.25;
    inst.y1 = 1.25;
    inst.y0 = 0.5;
    inst.epsilon = 5.24;
    inst.params.frequency_hz = f;
    inst.theta_l = 0.6 * kPi;
    inst.theta_r = 0.82 * kPi;
    const auto sol = solve_closed_form(inst);
    const double expect = f == 5e9 ? 0.6084 : 0.6010;
    const double table_rate = f == 5e9 ? 25.4155 : 18.8406;
    double best_gap = std::abs(sol.rate - table_rate);
    for (Polarization pol : {Polarization::TM, Polarization::TE})
      best_gap = std::min(best_gap, std::abs(rect_rate_at(sol.theta_star, {1.25, 1.25}, f, pol) -
                                             table_rate));
    std::printf("    [diagnostic, rx1=(1.25,1.25)] f=%.0fGHz theta*=%.4fpi (published %.4fpi, "
                "diff %.0e pi) best rate gap %.3f bps/Hz\n",
                f / 1e9, sol.theta_star / kPi, expect,
                std::abs(sol.theta_star / kPi - expect), best_gap);
  }

  const bool in_time = timer.seconds() < 5.0;
  char detail[160];
  std::snprintf(detail, sizeof detail, "matched: %s| %.1fs%s", matched_notes.c_str(),
                timer.seconds(), in_time ? "" : " OVER TIME");
  report(1, "published closed-form angles and rates", all_pass && in_time, detail);
}

// ---------------------------------------------------------------------------
// Criterion 2: closed form against the exhaustive oracle, per case.
void criterion_2() {
  Timer timer;
  std::mt19937_64 rng(20240202);
  bool pass = true;
  std::string detail;
  for (TwoRayCase which : {TwoRayCase::Case1, TwoRayCase::Case2, TwoRayCase::Case3}) {
    const double floor_ratio = which == TwoRayCase::Case2 ? 0.99 : 0.999;
    double worst = 1.0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto inst = testing::random_tworay_instance(which, rng);
      const auto closed = solve_closed_form(inst);
      const auto oracle = exhaustive_search(inst, 100000);
      worst = std::min(worst, closed.rate / oracle.rate);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "case%d worst=%.5f ", static_cast<int>(which) + 1, worst);
    detail += buf;
    pass = pass && worst >= floor_ratio;
  }
  const bool in_time = timer.seconds() < 120.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "| %.1fs", timer.seconds());
  report(2, "closed form within case-wise bounds of the dense search", pass && in_time,
         detail + buf);
}

// ---------------------------------------------------------------------------
// Criterion 3: ray-model equivalence against the mirror-image reference and
// the brute-force visibility oracle.
void criterion_3() {
  Timer timer;
  std::mt19937_64 rng(3003);
  RadioParams params;

  double worst_rel = 0.0;
  std::uniform_real_distribution<double> wd(2.0, 12.0);
  for (int i = 0; i < 500; ++i) {
    const Layout room = testing::rect(wd(rng), wd(rng));
    const Point tx = testing::random_interior_point(room, rng, 0.02);
    const Point rx = testing::random_interior_point(room, rng, 0.02);
    params.frequency_hz = (i % 2 == 0) ? 5e9 : 60e9;
    const Complex a = channel_coefficient(room, params, tx, rx);
    const Complex b = image_method_reference(room, params, tx, rx, 1);
    worst_rel = std::max(worst_rel, std::abs(a - b) / std::abs(b));
  }

  int disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Layout layout = testing::random_rectilinear_layout(rng);
    const Point tx = testing::random_interior_point(layout, rng);
    const Point rx = testing::random_interior_point(layout, rng);
    const auto got = indicator_functions(layout, tx, rx);
    const auto want = testing::oracle_indicators(layout, tx, rx);
    if (got.los != want.los) ++disagreements;
    for (std::size_t i = 0; i < layout.wall_count(); ++i)
      if (got.wall_nlos[i] != want.walls[i]) ++disagreements;
  }

  const bool pass = worst_rel < 1e-10 && disagreements == 0 && timer.seconds() < 120.0;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "max rel err %.2e, oracle disagreements %d | %.1fs", worst_rel, disagreements,
                timer.seconds());
  report(3, "first-order model equals the mirror-image reference", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: scalar SNR formula equals the complex-channel route.
void criterion_4() {
  Timer timer;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double big = 60.0;
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    TwoRayInstance inst;
    inst.x1 = 0.8 + 5.0 * unit(rng);
    inst.y0 = 0.3 + 1.5 * unit(rng);
    inst.y1 = inst.y0 + 0.5 + 3.0 * unit(rng);
    inst.epsilon = 1.5 + 8.0 * unit(rng);
    inst.params.frequency_hz = unit(rng) < 0.5 ? 5e9 : 60e9;
    inst.params.polarization = unit(rng) < 0.5 ? Polarization::TM : Polarization::TE;
    inst.theta_l = inst.lower_bound() + 0.05;
    inst.theta_r = kPi - 0.25;
    const double theta = inst.theta_l + (inst.theta_r - inst.theta_l) * unit(rng);
    const Point tx = theta_to_position(theta, FasLine{inst.y0, {inst.x1, inst.y1}});
    if (tx.x <= 0.05 || tx.x >= big - 0.05) continue;
    const Layout room({{0, 0}, {0, big}, {big, big}, {big, 0}}, {inst.epsilon, 1.0, 1.0, 1.0});
    const Complex h = channel_coefficient(room, inst.params, tx, Point{inst.x1, inst.y1});
    const double via_channel = std::norm(h) / inst.params.noise_power_w;
    const double via_formula = snr_two_ray(theta, inst);
    worst = std::max(worst, std::abs(via_channel - via_formula) / via_formula);
    ++tested;
  }
  char detail[96];
  std::snprintf(detail, sizeof detail, "max rel err %.2e over 1000 pairs | %.1fs", worst,
                timer.seconds());
  report(4, "scalar SNR identity against the complex channel", worst < 1e-10, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: reflection-coefficient identities.
void criterion_5() {
  bool pass = true;
  const double root = std::sqrt(5.24);
  const double normal = (1.0 - root) / (1.0 + root);
  pass = pass &&
         std::abs(fresnel_gamma(kPi / 2, 5.24, Polarization::TM) - normal) < 1e-12 &&
         std::abs(fresnel_gamma(kPi / 2, 5.24, Polarization::TE) - normal) < 1e-12;
  for (double alpha : {0.05, 0.6, 1.2, kPi / 2})
    pass = pass && fresnel_gamma(alpha, 1.0, Polarization::TM) == 0.0 &&
           fresnel_gamma(alpha, 1.0, Polarization::TE) == 0.0;
  double worst = 0.0;
  for (int ia = 1; ia <= 200; ++ia)
    for (int ie = 0; ie <= 190; ++ie) {
      const double alpha = ia * (kPi / 2) / 200;
      const double eps = 1.0 + 0.1 * ie;
      worst = std::max({worst, std::abs(fresnel_gamma(alpha, eps, Polarization::TM)),
                        std::abs(fresnel_gamma(alpha, eps, Polarization::TE))});
    }
  pass = pass && worst <= 1.0 + 1e-12;
  char detail[64];
  std::snprintf(detail, sizeof detail, "normal incidence %.4f, max |gamma| %.6f", normal, worst);
  report(5, "reflection-coefficient identities", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 6: group-relative training machinery.
void criterion_6() {
  Timer timer;
  bool pass = true;
  std::string notes;

  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> rd(-40.0, 40.0);
  double worst_mean = 0.0, worst_std = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> rewards(2 + rng() % 40);
    for (double& r : rewards) r = rd(rng);
    const auto adv = rl::group_advantages(rewards);
    double mean = 0.0, var = 0.0;
    for (double a : adv) mean += a;
    mean /= adv.size();
    for (double a : adv) var += (a - mean) * (a - mean);
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_std = std::max(worst_std, std::abs(std::sqrt(var / adv.size()) - 1.0));
  }
  pass = pass && worst_mean < 1e-9 && worst_std < 1e-6;

  std::uniform_real_distribution<double> ud(1e-6, 100.0);
  for (int i = 0; i < 10000; ++i)
    if (rl::kl_estimate(ud(rng), 1.0) < 0.0) pass = false;

  // Finite-difference check of the objective gradient on a small policy.
  {
    rl::GaussianPolicy pol(1, 2, Eigen::VectorXd::Constant(1, -1.0),
                           Eigen::VectorXd::Constant(1, 1.0), -0.4, rng);
    rl::GaussianPolicy old_pol(1, 2, Eigen::VectorXd::Constant(1, -1.0),
                               Eigen::VectorXd::Constant(1, 1.0), -0.5, rng);
    rl::GaussianPolicy ref(1, 2, Eigen::VectorXd::Constant(1, -1.0),
                           Eigen::VectorXd::Constant(1, 1.0), -0.3, rng);
    rl::Group group;
    std::vector<double> rewards;
    for (int g = 0; g < 3; ++g) {
      rl::Trajectory t;
      std::mt19937_64 traj_rng(rl::derive_seed(6, 0, g));
      for (int i = 0; i < 2; ++i) {
        const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 0.2 * (g + 1) - 0.1 * i);
        const auto smp = old_pol.sample(s, traj_rng);
        t.observations.push_back(s);
        t.actions.push_back(smp.action);
        t.actions_u.push_back(smp.u);
        t.rewards.push_back(0.4 * g - 0.1 * i);
        t.log_probs.push_back(smp.log_prob);
      }
      t.final_reward = t.rewards.back();
      rewards.push_back(t.final_reward);
      group.trajectories.push_back(std::move(t));
    }
    group.advantages = rl::group_advantages(rewards);
    rl::TrainConfig cfg;
    cfg.clip = 0.5;
    cfg.kl_penalty = 0.05;
    rl::PolicyGrad grad = pol.zero_grad();
    rl::grpo_objective_and_grad(group, pol, old_pol, ref, cfg, grad);

    Eigen::VectorXd analytic(pol.parameter_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < grad.net.dw.size(); ++l) {
      analytic.segment(at, grad.net.dw[l].size()) =
          Eigen::Map<const Eigen::VectorXd>(grad.net.dw[l].data(), grad.net.dw[l].size());
      at += grad.net.dw[l].size();
      analytic.segment(at, grad.net.db[l].size()) = grad.net.db[l];
      at += grad.net.db[l].size();
    }
    analytic.tail(grad.dlog_std.size()) = grad.dlog_std;

    Eigen::VectorXd theta0(pol.parameter_count());
    theta0.head(pol.net().parameter_count()) = pol.net().flatten();
    theta0.tail(pol.log_std().size()) = pol.log_std();
    const double h = 1e-6;
    double worst_fd = 0.0;
    for (Eigen::Index i = 0; i < theta0.size(); ++i) {
      rl::GaussianPolicy p = pol;
      Eigen::VectorXd t = theta0;
      t[i] += h;
      p.net().unflatten(t.head(p.net().parameter_count()));
      p.log_std() = t.tail(p.log_std().size());
      const double up = rl::grpo_objective(group, p, old_pol, ref, cfg);
      t[i] -= 2 * h;
      p.net().unflatten(t.head(p.net().parameter_count()));
      p.log_std() = t.tail(p.log_std().size());
      const double dn = rl::grpo_objective(group, p, old_pol, ref, cfg);
      worst_fd = std::max(worst_fd, std::abs((up - dn) / (2 * h) - analytic[i]));
    }
    pass = pass && worst_fd < 1e-5;
    char buf[48];
    std::snprintf(buf, sizeof buf, "fd err %.2e ", worst_fd);
    notes += buf;
  }

  // Parameter budget: dropping the critic halves the trainable parameters.
  {
    Layout room = testing::rect(5, 5);
    RadioParams params;
    rl::PlacementEnv env(std::move(room), params, {{1.25, 1.25}, {4.25, 3.0}}, 0.5,
                         FasConstraints{0.23 * kPi, 0.82 * kPi, 0.003, 1.0}, 3.5, 4.25, 2);
    rl::TrainConfig cfg;
    cfg.ppo_init_steps = 0;
    rl::PpoDiagnostics diag;
    rl::ppo_init(env, cfg, &diag);
    const double actor = static_cast<double>(diag.actor_parameters);
    const double critic = static_cast<double>(diag.critic_parameters);
    const double frac = actor / (actor + critic);
    pass = pass && frac > 0.45 && frac < 0.55;
    char buf[64];
    std::snprintf(buf, sizeof buf, "actor fraction %.3f", frac);
    notes += buf;
  }

  char detail[160];
  std::snprintf(detail, sizeof detail, "adv mean %.1e std dev %.1e %s | %.1fs", worst_mean,
                worst_std, notes.c_str(), timer.seconds());
  report(6, "group-relative training machinery", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 7: trained policy beats its reference; bandit sanity.
void criterion_7() {
  Timer timer;
  Layout room = testing::rect(5, 5);
  RadioParams params;
  rl::PlacementEnv env(std::move(room), params, {{1.25, 1.25}, {4.25, 3.0}}, 0.5,
                       FasConstraints{0.23 * kPi, 0.82 * kPi, 0.003, 1.0}, 3.5, 4.25, 2);

  rl::TrainConfig cfg;
  cfg.seed = 12345;
  cfg.group_size = 8;
  cfg.trajectory_length = 5;
  cfg.ppo_init_steps = 5000;
  cfg.grpo_iterations = 500;  // 500 * 8 * 5 = 20000 environment steps
  cfg.inner_updates = 4;
  cfg.adam = true;

  rl::PpoDiagnostics diag;
  const auto ref = rl::ppo_init(env, cfg, &diag);

  std::mt19937_64 eval_rng(999);
  double ref_mean = 0.0;
  for (int e = 0; e < 200; ++e) {
    Eigen::VectorXd s = env.reset(eval_rng);
    double r = 0.0;
    for (int t = 0; t < cfg.trajectory_length; ++t) {
      const auto smp = ref.sample(s, eval_rng);
      auto [ns, reward] = env.step(s, smp.action);
      s = ns;
      r = reward;
    }
    ref_mean += r / 200.0;
  }

  const auto res = rl::grpo_train(env, cfg, ref, nullptr);
  double final_max = res.history.back().group_max;

  // Bandit sanity: the policy mean reaches the known optimum.
  struct BanditEnv : rl::Environment {
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    Eigen::VectorXd action_lower() const override { return Eigen::VectorXd::Constant(1, -1.0); }
    Eigen::VectorXd action_upper() const override { return Eigen::VectorXd::Constant(1, 1.0); }
    Eigen::VectorXd reset(std::mt19937_64&) override { return Eigen::VectorXd::Zero(1); }
    std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd&,
                                            const Eigen::VectorXd& a) override {
      const double d = a[0] - 0.7;
      return {Eigen::VectorXd::Zero(1), -d * d};
    }
  } bandit;
  rl::TrainConfig bc;
  bc.seed = 4;
  bc.group_size = 32;
  bc.trajectory_length = 1;
  bc.grpo_iterations = 500;
  bc.inner_updates = 2;
  bc.learning_rate = 0.01;
  bc.clip = 0.2;
  bc.kl_penalty = 0.0;
  bc.hidden = 16;
  bc.log_std_init = -1.0;
  bc.adam = true;
  std::mt19937_64 rng(rl::derive_seed(bc.seed, 99, 0));
  rl::GaussianPolicy bandit_ref(1, bc.hidden, bandit.action_lower(), bandit.action_upper(),
                                bc.log_std_init, rng);
  const auto bandit_res = rl::grpo_train(bandit, bc, bandit_ref, nullptr);
  const double bandit_mean = bandit_res.policy.mean_action(Eigen::VectorXd::Zero(1))[0];

  const bool pass = final_max > ref_mean && std::abs(bandit_mean - 0.7) < 0.05 &&
                    res.env_steps <= 20000 && timer.seconds() < 1800.0;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "group max %.2f vs reference mean %.2f (%ld env steps); bandit mean %.3f | %.0fs",
                final_max, ref_mean, res.env_steps, bandit_mean, timer.seconds());
  report(7, "trained policy improves on its reference", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: beamforming solver soundness.
void criterion_8() {
  Timer timer;
  std::mt19937_64 rng(8008);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_channels = [&](int k, int n) {
    std::vector<ChannelVector> h(k, ChannelVector(n));
    for (auto& hk : h)
      for (int i = 0; i < n; ++i) hk[i] = Complex{g(rng), g(rng)};
    return h;
  };

  bool monotone = true, power_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    const auto h = random_channels(k, k + static_cast<int>(rng() % 3));
    const auto result = wmmse(h, 1.0, 1e-2);
    power_ok = power_ok && result.beams.total_power() <= 1.0 + 1e-9;
    for (std::size_t i = 1; i < result.rate_history.size(); ++i)
      monotone = monotone && result.rate_history[i] >= result.rate_history[i - 1] - 1e-9;
  }

  double worst_gap = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto h = random_channels(2, 2);
    const double mine = wmmse(h, 1.0, 1e-2).sum_rate;
    double best = 0.0;
    BeamformingSet w;
    w.vectors.assign(2, Eigen::VectorXcd(2));
    std::uniform_real_distribution<double> ud(0.1, 1.0);
    for (int s = 0; s < 1000000; ++s) {
      for (auto& v : w.vectors)
        for (int i = 0; i < 2; ++i) v[i] = Complex{g(rng), g(rng)};
      const double scale = (s % 2 == 0) ? 1.0 : ud(rng);
      const double norm = std::sqrt(scale / w.total_power());
      for (auto& v : w.vectors) v *= norm;
      best = std::max(best, sum_rate(h, w, 1e-2));
    }
    worst_gap = std::max(worst_gap, best - mine);
  }

  const bool pass = monotone && power_ok && worst_gap <= 0.01;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "monotone %s, power ok %s, worst search lead %.4f bps/Hz | %.0fs",
                monotone ? "yes" : "no", power_ok ? "yes" : "no", worst_gap, timer.seconds());
  report(8, "beamforming solver soundness", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: radio-map fidelity against the order-3 reference.
void criterion_9() {
  Timer timer;
  bool pass = true;
  std::string notes;
  for (const char* cfg_name : {"radiomap_rect5.json", "radiomap_lroom.json"}) {
    const auto cfg = load_config(kConfigDir / cfg_name);
    const auto& rm = *cfg.radiomap;
    const auto model = path_loss_map(cfg.layout, cfg.radio, rm.tx, rm.resolution, 4);
    const auto oracle =
        path_loss_map_reference(cfg.layout, cfg.radio, rm.tx, rm.resolution, rm.oracle_order, 4);
    const auto metrics = map_metrics(model, oracle);
    const double gap =
        std::abs(average_rate(model, cfg.radio, 1.0) - average_rate(oracle, cfg.radio, 1.0));
    pass = pass && metrics.rmse_db <= 6.0 && gap < 0.5;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s rmse %.2f dB rate gap %.3f; ", cfg_name, metrics.rmse_db,
                  gap);
    notes += buf;
  }

  // Byte-identical reruns through the command line.
  const fs::path o1 = out_dir() / "rm_run1", o2 = out_dir() / "rm_run2";
  run_cli("--config " + (kConfigDir / "radiomap_rect5.json").string() + " --out " + o1.string() +
          " --workers 4 radiomap");
  run_cli("--config " + (kConfigDir / "radiomap_rect5.json").string() + " --out " + o2.string() +
          " --workers 2 radiomap");
  const bool identical = slurp(o1 / "model_map.bin") == slurp(o2 / "model_map.bin") &&
                         slurp(o1 / "oracle_map.bin") == slurp(o2 / "oracle_map.bin") &&
                         slurp(o1 / "metrics.json") == slurp(o2 / "metrics.json") &&
                         !slurp(o1 / "model_map.bin").empty();
  pass = pass && identical && timer.seconds() < 600.0;
  char detail[224];
  std::snprintf(detail, sizeof detail, "%sreruns identical %s | %.0fs", notes.c_str(),
                identical ? "yes" : "no", timer.seconds());
  report(9, "radio-map fidelity and determinism", pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures > 0)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures == 0 ? 0 : 1;
}
