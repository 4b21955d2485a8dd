#include "fasim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fasim {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool finite_point(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double Wall::lo() const { return vertical() ? std::min(a.y, b.y) : std::min(a.x, b.x); }
double Wall::hi() const { return vertical() ? std::max(a.y, b.y) : std::max(a.x, b.x); }

Layout::Layout(std::vector<Point> corners, std::vector<double> wall_permittivity)
    : corners_(std::move(corners)), permittivity_(std::move(wall_permittivity)) {
  const std::size_t m = corners_.size();
  if (m < 4) throw std::invalid_argument("layout: at least 4 corners required");
  if (permittivity_.size() != m)
    throw std::invalid_argument("layout: expected one permittivity per wall (" +
                                std::to_string(m) + "), got " +
                                std::to_string(permittivity_.size()));
  for (std::size_t i = 0; i < m; ++i) {
    if (!finite_point(corners_[i]))
      throw std::invalid_argument("layout: corner " + std::to_string(i) + " is not finite");
    if (!(permittivity_[i] >= 1.0))
      throw std::invalid_argument("layout: permittivity of wall " + std::to_string(i) +
                                  " must be >= 1");
  }

  // Walls must be axis-aligned and alternate orientation; a repeated
  // orientation means two collinear "walls" that are really one.
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = corners_[i];
    const Point& b = corners_[(i + 1) % m];
    const bool vert = a.x == b.x && a.y != b.y;
    const bool horiz = a.y == b.y && a.x != b.x;
    if (!vert && !horiz)
      throw std::invalid_argument("layout: wall " + std::to_string(i) +
                                  " is not axis-aligned or has zero length");
    const Point& c = corners_[(i + 2) % m];
    const bool next_vert = b.x == c.x;
    if (vert == next_vert)
      throw std::invalid_argument("layout: walls " + std::to_string(i) + " and " +
                                  std::to_string((i + 1) % m) +
                                  " are collinear; merge them into one wall");
  }

  // Simplicity: non-adjacent walls may not touch at all.
  for (std::size_t i = 0; i < m; ++i) {
    const Wall wi = wall(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      const Wall wj = wall(j);
      if (wi.vertical() == wj.vertical()) {
        if (wi.coord() == wj.coord() && wi.lo() <= wj.hi() && wj.lo() <= wi.hi())
          throw std::invalid_argument("layout: walls " + std::to_string(i) + " and " +
                                      std::to_string(j) + " overlap");
      } else {
        const Wall& v = wi.vertical() ? wi : wj;
        const Wall& h = wi.vertical() ? wj : wi;
        if (v.coord() >= h.lo() && v.coord() <= h.hi() && h.coord() >= v.lo() &&
            h.coord() <= v.hi())
          throw std::invalid_argument("layout: walls " + std::to_string(i) + " and " +
                                      std::to_string(j) + " intersect (self-intersecting polygon)");
      }
    }
  }

  // Clockwise orientation (negative shoelace area with y pointing up).
  double area2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = corners_[i];
    const Point& b = corners_[(i + 1) % m];
    area2 += a.x * b.y - b.x * a.y;
  }
  if (area2 >= 0.0)
    throw std::invalid_argument("layout: corners must be listed in clockwise order");
}

Wall Layout::wall(std::size_t i) const {
  if (i >= corners_.size()) throw std::out_of_range("layout: wall index out of range");
  return Wall{corners_[i], corners_[(i + 1) % corners_.size()], permittivity_[i]};
}

bool Layout::contains(const Point& p) const {
  const std::size_t m = corners_.size();
  // Boundary points are not inside.
  for (std::size_t i = 0; i < m; ++i) {
    const Wall w = wall(i);
    if (w.vertical()) {
      if (p.x == w.coord() && p.y >= w.lo() && p.y <= w.hi()) return false;
    } else {
      if (p.y == w.coord() && p.x >= w.lo() && p.x <= w.hi()) return false;
    }
  }
  // Even-odd rule with a +x ray; the half-open extent makes corner crossings
  // count exactly once.
  bool inside = false;
  for (std::size_t i = 0; i < m; ++i) {
    const Wall w = wall(i);
    if (!w.vertical()) continue;
    if (p.y >= w.lo() && p.y < w.hi() && w.coord() > p.x) inside = !inside;
  }
  return inside;
}

std::array<double, 4> Layout::bounding_box() const {
  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (const Point& c : corners_) {
    minx = std::min(minx, c.x);
    miny = std::min(miny, c.y);
    maxx = std::max(maxx, c.x);
    maxy = std::max(maxy, c.y);
  }
  return {minx, miny, maxx, maxy};
}

Point theta_to_position(double theta, const FasLine& fas) {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw std::domain_error("theta_to_position: theta must lie in (0, pi)");
  if (fas.reference_rx.y == fas.y0)
    throw std::domain_error("theta_to_position: reference receiver on the antenna line");
  if (theta == kHalfPi) return Point{fas.reference_rx.x, fas.y0};
  const double dy = fas.reference_rx.y - fas.y0;
  return Point{fas.reference_rx.x - dy / std::tan(theta), fas.y0};
}

double position_to_theta(const Point& p, const FasLine& fas) {
  if (std::abs(p.y - fas.y0) > 1e-9)
    throw std::domain_error("position_to_theta: point is not on the antenna line");
  if (fas.reference_rx.y == fas.y0)
    throw std::domain_error("position_to_theta: reference receiver on the antenna line");
  const double dy = fas.reference_rx.y - fas.y0;
  const double dx = fas.reference_rx.x - p.x;
  if (dx == 0.0) return kHalfPi;
  double theta = std::atan2(dy, dx);
  if (theta <= 0.0) theta += std::numbers::pi;  // tan is pi-periodic
  return theta;
}

AngleDistances angle_distances(const Layout& layout, std::size_t wall_index, const Point& tx,
                               const Point& rx) {
  const Wall w = layout.wall(wall_index);
  AngleDistances d;
  if (w.vertical()) {
    d.d1 = std::abs(tx.x - w.coord());
    d.d2 = std::abs(rx.x - w.coord());
    d.d3 = std::abs(rx.y - tx.y);
  } else {
    d.d1 = std::abs(tx.y - w.coord());
    d.d2 = std::abs(rx.y - w.coord());
    d.d3 = std::abs(rx.x - tx.x);
  }
  if (d.d1 == 0.0 || d.d2 == 0.0)
    throw std::domain_error("angle_distances: point lies on wall " + std::to_string(wall_index));
  return d;
}

bool segment_intersects(const Point& a1, const Point& a2, const Point& b1, const Point& b2) {
  const double dx = a2.x - a1.x, dy = a2.y - a1.y;
  const double ex = b2.x - b1.x, ey = b2.y - b1.y;
  const double len_a2 = dx * dx + dy * dy;
  const double len_b2 = ex * ex + ey * ey;
  if (len_a2 == 0.0 || len_b2 == 0.0) return false;

  const double denom = dx * ey - dy * ex;
  const double scale = std::sqrt(len_a2 * len_b2);
  if (std::abs(denom) > 1e-12 * scale) {
    const double wx = b1.x - a1.x, wy = b1.y - a1.y;
    const double t = (wx * ey - wy * ex) / denom;  // parameter on (a1,a2)
    const double s = (wx * dy - wy * dx) / denom;  // parameter on [b1,b2]
    const double eps = 1e-12;
    return t > eps && t < 1.0 - eps && s >= -eps && s <= 1.0 + eps;
  }

  // Parallel; only collinear overlap can block.
  if (std::abs(cross(a1, a2, b1)) > 1e-12 * scale) return false;
  double s1 = (b1.x - a1.x) * dx + (b1.y - a1.y) * dy;
  double s2 = (b2.x - a1.x) * dx + (b2.y - a1.y) * dy;
  if (s1 > s2) std::swap(s1, s2);
  const double eps = 1e-12 * len_a2;
  const double lo = std::max(s1, 0.0 + eps);
  const double hi = std::min(s2, len_a2 - eps);
  return hi >= lo;
}

}  // namespace fasim
