#include "fasim/config.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace fasim {

using nlohmann::json;

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double angle_field(const json& j, const std::string& key, double fallback) {
  if (j.contains(key + "_pi")) return j.at(key + "_pi").get<double>() * std::numbers::pi;
  if (j.contains(key)) return j.at(key).get<double>();
  return fallback;
}

Point point_field(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [x, y] pair");
  return Point{j.at(0).get<double>(), j.at(1).get<double>()};
}

json policy_to_json(const rl::GaussianPolicy& p) {
  json net;
  net["dims"] = p.net().dims();
  json ws = json::array(), bs = json::array();
  for (const auto& w : p.net().weights()) {
    std::vector<double> flat(w.data(), w.data() + w.size());
    ws.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"data", flat}});
  }
  for (const auto& b : p.net().biases())
    bs.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  net["weights"] = ws;
  net["biases"] = bs;
  json out;
  out["net"] = net;
  out["log_std"] = std::vector<double>(p.log_std().data(), p.log_std().data() + p.log_std().size());
  out["lower"] = std::vector<double>(p.lower().data(), p.lower().data() + p.lower().size());
  out["upper"] = std::vector<double>(p.upper().data(), p.upper().data() + p.upper().size());
  return out;
}

rl::GaussianPolicy policy_from_json(const json& j) {
  const auto& net = j.at("net");
  const auto dims = net.at("dims").get<std::vector<int>>();
  auto lower_v = j.at("lower").get<std::vector<double>>();
  auto upper_v = j.at("upper").get<std::vector<double>>();
  Eigen::VectorXd lower = Eigen::Map<Eigen::VectorXd>(lower_v.data(), lower_v.size());
  Eigen::VectorXd upper = Eigen::Map<Eigen::VectorXd>(upper_v.data(), upper_v.size());
  if (dims.size() != 4) throw ConfigError("checkpoint: expected a three-layer network");
  std::mt19937_64 rng(0);
  rl::GaussianPolicy p(dims[0], dims[1], lower, upper, 0.0, rng);
  const auto& ws = net.at("weights");
  const auto& bs = net.at("biases");
  if (ws.size() != p.net().weights().size() || bs.size() != p.net().biases().size())
    throw ConfigError("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < ws.size(); ++l) {
    const auto rows = ws[l].at("rows").get<Eigen::Index>();
    const auto cols = ws[l].at("cols").get<Eigen::Index>();
    auto data = ws[l].at("data").get<std::vector<double>>();
    if (rows != p.net().weights()[l].rows() || cols != p.net().weights()[l].cols() ||
        static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw ConfigError("checkpoint: weight shape mismatch");
    p.net().weights()[l] = Eigen::Map<Eigen::MatrixXd>(data.data(), rows, cols);
    auto bias = bs[l].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(bias.size()) != p.net().biases()[l].size())
      throw ConfigError("checkpoint: bias shape mismatch");
    p.net().biases()[l] = Eigen::Map<Eigen::VectorXd>(bias.data(), bias.size());
  }
  auto ls = j.at("log_std").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(ls.size()) != p.log_std().size())
    throw ConfigError("checkpoint: log_std size mismatch");
  p.log_std() = Eigen::Map<Eigen::VectorXd>(ls.data(), ls.size());
  return p;
}

json train_to_json(const rl::TrainConfig& t) {
  return json{{"group_size", t.group_size},
              {"trajectory_length", t.trajectory_length},
              {"ppo_init_steps", t.ppo_init_steps},
              {"grpo_iterations", t.grpo_iterations},
              {"inner_updates", t.inner_updates},
              {"clip", t.clip},
              {"kl_penalty", t.kl_penalty},
              {"learning_rate", t.learning_rate},
              {"batch_size", t.batch_size},
              {"seed", t.seed},
              {"hidden", t.hidden},
              {"log_std_init", t.log_std_init},
              {"infeasible_penalty", t.infeasible_penalty},
              {"discount", t.discount},
              {"gae_lambda", t.gae_lambda},
              {"adam", t.adam},
              {"ppo_epochs", t.ppo_epochs},
              {"ppo_rollout", t.ppo_rollout},
              {"value_coeff", t.value_coeff},
              {"entropy_coeff", t.entropy_coeff}};
}

rl::TrainConfig train_from_json(const json& j) {
  rl::TrainConfig t;
  t.group_size = j.value("group_size", t.group_size);
  t.trajectory_length = j.value("trajectory_length", t.trajectory_length);
  t.ppo_init_steps = j.value("ppo_init_steps", t.ppo_init_steps);
  t.grpo_iterations = j.value("grpo_iterations", t.grpo_iterations);
  t.inner_updates = j.value("inner_updates", t.inner_updates);
  t.clip = j.value("clip", t.clip);
  t.kl_penalty = j.value("kl_penalty", t.kl_penalty);
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.seed = j.value("seed", t.seed);
  t.hidden = j.value("hidden", t.hidden);
  t.log_std_init = j.value("log_std_init", t.log_std_init);
  t.infeasible_penalty = j.value("infeasible_penalty", t.infeasible_penalty);
  t.discount = j.value("discount", t.discount);
  t.gae_lambda = j.value("gae_lambda", t.gae_lambda);
  t.adam = j.value("adam", t.adam);
  t.ppo_epochs = j.value("ppo_epochs", t.ppo_epochs);
  t.ppo_rollout = j.value("ppo_rollout", t.ppo_rollout);
  t.value_coeff = j.value("value_coeff", t.value_coeff);
  t.entropy_coeff = j.value("entropy_coeff", t.entropy_coeff);
  return t;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }

Layout load_layout(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.contains("corners") || !j.contains("permittivity"))
    throw ConfigError(path.string() + ": layout needs 'corners' and 'permittivity'");
  std::vector<Point> corners;
  for (std::size_t i = 0; i < j.at("corners").size(); ++i) {
    try {
      corners.push_back(point_field(j.at("corners").at(i)));
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ": corner " + std::to_string(i) + ": " + e.what());
    }
  }
  if (corners.empty() || !(corners[0] == Point{0.0, 0.0}))
    throw ConfigError(path.string() + ": first corner must be [0, 0]");
  auto permittivity = j.at("permittivity").get<std::vector<double>>();
  try {
    return Layout(std::move(corners), std::move(permittivity));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  ExperimentConfig cfg;
  cfg.schema_version = j.value("schema_version", 1);
  if (cfg.schema_version != 1)
    throw ConfigError(path.string() + ": unsupported schema_version " +
                      std::to_string(cfg.schema_version));

  if (j.contains("layout")) {
    cfg.layout_path = path.parent_path() / j.at("layout").get<std::string>();
    cfg.layout = load_layout(cfg.layout_path);
  }

  if (j.contains("radio")) {
    const json& r = j.at("radio");
    cfg.radio.frequency_hz = r.value("frequency_hz", cfg.radio.frequency_hz);
    cfg.radio.gt = r.value("gt", cfg.radio.gt);
    cfg.radio.gr = r.value("gr", cfg.radio.gr);
    if (r.contains("noise_dbm") && r.contains("noise_w"))
      throw ConfigError(path.string() + ": give noise_dbm or noise_w, not both");
    if (r.contains("noise_dbm")) cfg.radio.noise_power_w = dbm_to_watts(r.at("noise_dbm").get<double>());
    if (r.contains("noise_w")) cfg.radio.noise_power_w = r.at("noise_w").get<double>();
    const std::string pol = r.value("polarization", "TM");
    if (pol == "TM")
      cfg.radio.polarization = Polarization::TM;
    else if (pol == "TE")
      cfg.radio.polarization = Polarization::TE;
    else
      throw ConfigError(path.string() + ": polarization must be TM or TE");
    if (!(cfg.radio.frequency_hz > 0) || !(cfg.radio.gt > 0) || !(cfg.radio.gr > 0) ||
        !(cfg.radio.noise_power_w > 0))
      throw ConfigError(path.string() + ": radio parameters must be positive");
  }

  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    cfg.scenario.fas_y0 = s.value("fas_y0", cfg.scenario.fas_y0);
    if (s.contains("anchor_x")) {
      const json& a = s.at("anchor_x");
      if (a.is_array() && a.size() == 2) {
        cfg.scenario.anchor_x_lo = a.at(0).get<double>();
        cfg.scenario.anchor_x_hi = a.at(1).get<double>();
      } else if (a.is_number()) {
        cfg.scenario.anchor_x_lo = cfg.scenario.anchor_x_hi = a.get<double>();
      } else {
        throw ConfigError(path.string() + ": anchor_x must be a number or [lo, hi]");
      }
    }
    if (s.contains("receivers")) {
      cfg.scenario.receivers.clear();
      for (const json& p : s.at("receivers")) cfg.scenario.receivers.push_back(point_field(p));
    }
    cfg.scenario.n_antennas = s.value("antennas", cfg.scenario.n_antennas);
    if (cfg.scenario.n_antennas < static_cast<int>(cfg.scenario.receivers.size()))
      throw ConfigError(path.string() + ": receivers must not outnumber antennas");
  }

  if (j.contains("constraints")) {
    const json& c = j.at("constraints");
    cfg.constraints.theta_l = angle_field(c, "theta_l", cfg.constraints.theta_l);
    cfg.constraints.theta_r = angle_field(c, "theta_r", cfg.constraints.theta_r);
    cfg.constraints.delta = angle_field(c, "delta", cfg.constraints.delta);
    cfg.constraints.p_max = c.value("p_max", cfg.constraints.p_max);
    if (!(cfg.constraints.theta_l < cfg.constraints.theta_r) || cfg.constraints.delta < 0 ||
        !(cfg.constraints.p_max > 0))
      throw ConfigError(path.string() + ": bad constraints block");
  }

  if (j.contains("train")) cfg.train = train_from_json(j.at("train"));

  if (j.contains("tworay")) {
    const json& t = j.at("tworay");
    TwoRayInstance inst;
    inst.params = cfg.radio;
    inst.x1 = t.value("x1", inst.x1);
    inst.y1 = t.value("y1", inst.y1);
    inst.y0 = t.value("y0", inst.y0);
    inst.epsilon = t.value("epsilon", inst.epsilon);
    inst.theta_l = angle_field(t, "theta_l", inst.theta_l);
    inst.theta_r = angle_field(t, "theta_r", inst.theta_r);
    inst.tx_power_w = t.value("tx_power_w", inst.tx_power_w);
    try {
      inst.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path.string() + ": tworay: " + e.what());
    }
    cfg.tworay = inst;
  }

  if (j.contains("radiomap")) {
    const json& r = j.at("radiomap");
    RadioMapConfig rm;
    if (r.contains("tx")) rm.tx = point_field(r.at("tx"));
    rm.resolution = r.value("resolution", rm.resolution);
    rm.oracle_order = r.value("oracle_order", rm.oracle_order);
    if (!(rm.resolution > 0) || rm.oracle_order < 0 || rm.oracle_order > 3)
      throw ConfigError(path.string() + ": bad radiomap block");
    cfg.radiomap = rm;
  }

  if (j.contains("out_dir")) cfg.out_dir = path.parent_path() / j.at("out_dir").get<std::string>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.train.seed = j.value("seed", cfg.train.seed);
  return cfg;
}

void save_checkpoint(const std::filesystem::path& path, const rl::GaussianPolicy& policy,
                     const rl::TrainConfig& cfg, std::uint64_t seed) {
  json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["config"] = train_to_json(cfg);
  j["policy"] = policy_to_json(policy);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

rl::GaussianPolicy load_checkpoint(const std::filesystem::path& path, rl::TrainConfig* cfg_out) {
  const json j = parse_file(path);
  if (cfg_out && j.contains("config")) *cfg_out = train_from_json(j.at("config"));
  return policy_from_json(j.at("policy"));
}

JsonlTrainLogger::JsonlTrainLogger(const std::filesystem::path& path, bool with_timings)
    : out_(path), with_timings_(with_timings) {
  if (!out_) throw ConfigError("cannot write " + path.string());
}

void JsonlTrainLogger::on_iteration(const rl::IterationRecord& rec) {
  json j{{"iteration", rec.iteration},
         {"group_mean", rec.group_mean},
         {"group_max", rec.group_max},
         {"kl_mean", rec.kl_mean}};
  if (with_timings_ && rec.wall_clock_s)
    j["wall_clock_s"] = *rec.wall_clock_s;
  else
    j["wall_clock_s"] = nullptr;
  out_ << j.dump() << '\n';
  out_.flush();
}

void write_map_csv(const std::filesystem::path& path, const RadioMap& map) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "x,y,pl_db\n";
  char buf[96];
  for (int iy = 0; iy < map.ny; ++iy)
    for (int ix = 0; ix < map.nx; ++ix) {
      if (!map.masked(ix, iy)) continue;
      const Point p = map.cell_center(ix, iy);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, map.at(ix, iy));
      out << buf;
    }
}

void write_map_binary(const std::filesystem::path& path, const RadioMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  const char magic[8] = {'F', 'A', 'S', 'M', 'A', 'P', '0', '1'};
  out.write(magic, 8);
  auto write_d = [&](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  auto write_u = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  write_d(map.origin.x);
  write_d(map.origin.y);
  write_d(map.resolution);
  write_u(static_cast<std::uint32_t>(map.nx));
  write_u(static_cast<std::uint32_t>(map.ny));
  out.write(reinterpret_cast<const char*>(map.pl_db.data()),
            static_cast<std::streamsize>(map.pl_db.size() * sizeof(double)));
}

RadioMap read_map_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::string(magic, 8) != "FASMAP01") throw ConfigError(path.string() + ": bad magic");
  RadioMap map;
  auto read_d = [&](double& v) { in.read(reinterpret_cast<char*>(&v), sizeof v); };
  std::uint32_t nx = 0, ny = 0;
  read_d(map.origin.x);
  read_d(map.origin.y);
  read_d(map.resolution);
  in.read(reinterpret_cast<char*>(&nx), sizeof nx);
  in.read(reinterpret_cast<char*>(&ny), sizeof ny);
  map.nx = static_cast<int>(nx);
  map.ny = static_cast<int>(ny);
  map.pl_db.resize(static_cast<std::size_t>(map.nx) * map.ny);
  in.read(reinterpret_cast<char*>(map.pl_db.data()),
          static_cast<std::streamsize>(map.pl_db.size() * sizeof(double)));
  if (!in) throw ConfigError(path.string() + ": truncated map file");
  map.mask.resize(map.pl_db.size());
  for (std::size_t i = 0; i < map.pl_db.size(); ++i)
    map.mask[i] = std::isnan(map.pl_db[i]) ? 0 : 1;
  return map;
}

}  // namespace fasim
