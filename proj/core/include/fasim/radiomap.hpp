#ifndef FASIM_RADIOMAP_HPP
#define FASIM_RADIOMAP_HPP

#include <cstdint>
#include <vector>

#include "fasim/channel.hpp"

namespace fasim {

/// Grid of path-loss values (-20 log10 |h|, dB) over a layout. Cells outside
/// the polygon are masked out; cells reached by no ray carry the 200 dB floor
/// so metrics stay finite.
struct RadioMap {
  Point origin;
  double resolution{0.05};
  int nx{0};
  int ny{0};
  std::vector<double> pl_db;     // row-major, ny rows of nx
  std::vector<std::uint8_t> mask;

  double& at(int ix, int iy) { return pl_db[static_cast<std::size_t>(iy) * nx + ix]; }
  double at(int ix, int iy) const { return pl_db[static_cast<std::size_t>(iy) * nx + ix]; }
  bool masked(int ix, int iy) const { return mask[static_cast<std::size_t>(iy) * nx + ix] != 0; }
  Point cell_center(int ix, int iy) const {
    return Point{origin.x + (ix + 0.5) * resolution, origin.y + (iy + 0.5) * resolution};
  }
};

inline constexpr double kPathLossFloorDb = 200.0;

RadioMap path_loss_map(const Layout& layout, const RadioParams& params, const Point& tx,
                       double resolution, int workers = 1);

/// Same grid evaluated with the image-method reference at the given
/// reflection order.
RadioMap path_loss_map_reference(const Layout& layout, const RadioParams& params, const Point& tx,
                                 double resolution, int max_order, int workers = 1);

struct MapMetrics {
  double mae_db{0.0};
  double rmse_db{0.0};
};

/// Mean absolute and root-mean-square path-loss difference over the shared
/// mask. Both maps must share the grid.
MapMetrics map_metrics(const RadioMap& a, const RadioMap& b);

/// Mean of log2(1 + p |h|^2 / sigma^2) over masked cells, |h| recovered from
/// the stored path loss.
double average_rate(const RadioMap& map, const RadioParams& params, double p_watts);

/// |h(theta1, theta2)| surface of the two-antenna channel vector norm over a
/// square angle grid.
struct Landscape {
  double theta_lo{0.0};
  double theta_hi{0.0};
  int n{0};
  std::vector<double> values;  // row-major, values[i*n + j] at (theta_i, theta_j)

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double theta(int i) const {
    return theta_lo + (theta_hi - theta_lo) * i / (n - 1);
  }
};

Landscape landscape_sweep(const Layout& layout, const RadioParams& params, const FasLine& fas,
                          const Point& rx, int grid, double theta_lo, double theta_hi,
                          int workers = 1);

/// Number of strict local maxima of the landscape over the interior grid.
int landscape_local_maxima(const Landscape& ls);

}  // namespace fasim

#endif
