#ifndef FASIM_CONFIG_HPP
#define FASIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fasim/errors.hpp"
#include "fasim/optim.hpp"
#include "fasim/radiomap.hpp"
#include "fasim/rl/trainers.hpp"
#include "fasim/tworay.hpp"

namespace fasim {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct ScenarioConfig {
  double fas_y0{0.5};
  double anchor_x_lo{0.0};
  double anchor_x_hi{0.0};
  std::vector<Point> receivers;
  int n_antennas{1};
};

struct TwoRayConfig {
  TwoRayInstance instance;
};

struct RadioMapConfig {
  Point tx;
  double resolution{0.05};
  int oracle_order{3};
};

struct ExperimentConfig {
  int schema_version{1};
  std::filesystem::path layout_path;
  Layout layout{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {1, 1, 1, 1}};
  RadioParams radio;
  ScenarioConfig scenario;
  FasConstraints constraints;
  rl::TrainConfig train;
  std::optional<TwoRayInstance> tworay;
  std::optional<RadioMapConfig> radiomap;
  std::filesystem::path out_dir{"out"};
  std::uint64_t seed{0};
};

/// Parses a layout file ({"corners": [[x,y],...], "permittivity": [...]},
/// clockwise corners starting at [0,0]); rejects malformed polygons with a
/// diagnostic naming the offending corner or wall.
Layout load_layout(const std::filesystem::path& path);

/// Parses an experiment file. Every field has a default; noise may be given
/// as "noise_dbm" or "noise_w", angles in radians or as multiples of pi via
/// the *_pi key variants.
ExperimentConfig load_config(const std::filesystem::path& path);

void save_checkpoint(const std::filesystem::path& path, const rl::GaussianPolicy& policy,
                     const rl::TrainConfig& cfg, std::uint64_t seed);
rl::GaussianPolicy load_checkpoint(const std::filesystem::path& path,
                                   rl::TrainConfig* cfg_out = nullptr);

/// Appends one JSON record per training iteration to a line-delimited file.
/// Wall-clock timing is off by default so that equal-seed runs produce
/// byte-identical logs.
class JsonlTrainLogger : public rl::TrainLogger {
 public:
  explicit JsonlTrainLogger(const std::filesystem::path& path, bool with_timings = false);
  void on_iteration(const rl::IterationRecord& rec) override;

 private:
  std::ofstream out_;
  bool with_timings_;
};

void write_map_csv(const std::filesystem::path& path, const RadioMap& map);
void write_map_binary(const std::filesystem::path& path, const RadioMap& map);
RadioMap read_map_binary(const std::filesystem::path& path);

}  // namespace fasim

#endif
