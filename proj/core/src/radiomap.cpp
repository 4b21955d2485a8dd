#include "fasim/radiomap.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace fasim {

namespace {

void parallel_rows(int ny, int workers, const std::function<void(int)>& body) {
  const int nw = std::max(1, std::min(workers, ny));
  if (nw == 1) {
    for (int iy = 0; iy < ny; ++iy) body(iy);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (ny + nw - 1) / nw;
  for (int t = 0; t < nw; ++t) {
    const int b = t * chunk, e = std::min(ny, b + chunk);
    pool.emplace_back([&, b, e] {
      for (int iy = b; iy < e; ++iy) body(iy);
    });
  }
  for (auto& th : pool) th.join();
}

RadioMap evaluate_map(const Layout& layout, const Point& tx, double resolution, int workers,
                      const std::function<Complex(const Point&)>& coefficient) {
  if (!(resolution > 0.0)) throw std::invalid_argument("radio map: resolution must be positive");
  if (!layout.contains(tx)) throw std::invalid_argument("radio map: tx must lie inside the layout");

  const auto box = layout.bounding_box();
  RadioMap map;
  map.origin = Point{box[0], box[1]};
  map.resolution = resolution;
  map.nx = static_cast<int>(std::ceil((box[2] - box[0]) / resolution - 1e-9));
  map.ny = static_cast<int>(std::ceil((box[3] - box[1]) / resolution - 1e-9));
  map.pl_db.assign(static_cast<std::size_t>(map.nx) * map.ny,
                   std::numeric_limits<double>::quiet_NaN());
  map.mask.assign(static_cast<std::size_t>(map.nx) * map.ny, 0);

  parallel_rows(map.ny, workers, [&](int iy) {
    for (int ix = 0; ix < map.nx; ++ix) {
      const Point p = map.cell_center(ix, iy);
      if (!layout.contains(p)) continue;
      const std::size_t idx = static_cast<std::size_t>(iy) * map.nx + ix;
      map.mask[idx] = 1;
      const double mag = std::abs(coefficient(p));
      map.pl_db[idx] = mag > 0.0 ? std::min(-20.0 * std::log10(mag), kPathLossFloorDb)
                                 : kPathLossFloorDb;
    }
  });
  return map;
}

}  // namespace

RadioMap path_loss_map(const Layout& layout, const RadioParams& params, const Point& tx,
                       double resolution, int workers) {
  return evaluate_map(layout, tx, resolution, workers, [&](const Point& p) {
    return channel_coefficient(layout, params, tx, p);
  });
}

RadioMap path_loss_map_reference(const Layout& layout, const RadioParams& params, const Point& tx,
                                 double resolution, int max_order, int workers) {
  return evaluate_map(layout, tx, resolution, workers, [&](const Point& p) {
    return image_method_reference(layout, params, tx, p, max_order);
  });
}

MapMetrics map_metrics(const RadioMap& a, const RadioMap& b) {
  if (a.nx != b.nx || a.ny != b.ny || a.resolution != b.resolution ||
      !(a.origin == b.origin) || a.mask != b.mask)
    throw std::invalid_argument("map_metrics: maps do not share a grid");
  double abs_sum = 0.0, sq_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.pl_db.size(); ++i) {
    if (!a.mask[i]) continue;
    const double d = a.pl_db[i] - b.pl_db[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("map_metrics: empty mask");
  return MapMetrics{abs_sum / count, std::sqrt(sq_sum / count)};
}

double average_rate(const RadioMap& map, const RadioParams& params, double p_watts) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < map.pl_db.size(); ++i) {
    if (!map.mask[i]) continue;
    const double mag = std::pow(10.0, -map.pl_db[i] / 20.0);
    sum += std::log2(1.0 + p_watts * mag * mag / params.noise_power_w);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("average_rate: empty mask");
  return sum / count;
}

Landscape landscape_sweep(const Layout& layout, const RadioParams& params, const FasLine& fas,
                          const Point& rx, int grid, double theta_lo, double theta_hi,
                          int workers) {
  if (grid < 2) throw std::invalid_argument("landscape_sweep: grid must be >= 2");
  if (!(theta_lo > 0.0 && theta_hi < 3.14159265358979323846 && theta_lo < theta_hi))
    throw std::invalid_argument("landscape_sweep: angle range must lie inside (0, pi)");

  Landscape ls;
  ls.theta_lo = theta_lo;
  ls.theta_hi = theta_hi;
  ls.n = grid;
  ls.values.assign(static_cast<std::size_t>(grid) * grid, 0.0);

  // Coefficients depend on one angle each, so evaluate each axis once.
  std::vector<Complex> h(grid);
  for (int i = 0; i < grid; ++i)
    h[i] = channel_coefficient(layout, params, theta_to_position(ls.theta(i), fas), rx);

  parallel_rows(grid, workers, [&](int i) {
    for (int j = 0; j < grid; ++j)
      ls.values[static_cast<std::size_t>(i) * grid + j] =
          std::sqrt(std::norm(h[i]) + std::norm(h[j]));
  });
  return ls;
}

int landscape_local_maxima(const Landscape& ls) {
  int count = 0;
  for (int i = 1; i + 1 < ls.n; ++i) {
    for (int j = 1; j + 1 < ls.n; ++j) {
      const double v = ls.at(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (ls.at(i + di, j + dj) >= v) {
            strict = false;
            break;
          }
        }
      if (strict) ++count;
    }
  }
  return count;
}

}  // namespace fasim
