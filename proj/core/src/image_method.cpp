#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "fasim/channel.hpp"

// Mirror-image path enumeration. Deliberately shares no geometry with the
// indicator/reflection-point route: reflection points come from intersecting
// the backtraced segment with the mirror wall, not from the u-offset formula.

namespace fasim {

namespace {

Point mirror(const Point& p, const Wall& w) {
  if (w.vertical()) return Point{2.0 * w.coord() - p.x, p.y};
  return Point{p.x, 2.0 * w.coord() - p.y};
}

// Intersection of segment [from, to] with the wall's line, accepted only if
// the segment strictly crosses the line and the point lies on the wall proper.
std::optional<Point> cross_point(const Point& from, const Point& to, const Wall& w) {
  const double f = w.vertical() ? from.x : from.y;
  const double t = w.vertical() ? to.x : to.y;
  const double c = w.coord();
  const double denom = t - f;
  if (denom == 0.0) return std::nullopt;
  const double s = (c - f) / denom;
  if (!(s > 0.0 && s < 1.0)) return std::nullopt;
  Point p = w.vertical() ? Point{c, from.y + s * (to.y - from.y)}
                         : Point{from.x + s * (to.x - from.x), c};
  const double along = w.vertical() ? p.y : p.x;
  if (along < w.lo() || along > w.hi()) return std::nullopt;
  return p;
}

bool leg_blocked(const Layout& layout, const Point& a, const Point& b) {
  for (std::size_t i = 0; i < layout.wall_count(); ++i) {
    const Wall w = layout.wall(i);
    if (segment_intersects(a, b, w.a, w.b)) return true;
  }
  return false;
}

double grazing_angle(const Point& from, const Point& to, const Wall& w) {
  const double perp = w.vertical() ? std::abs(to.x - from.x) : std::abs(to.y - from.y);
  const double par = w.vertical() ? std::abs(to.y - from.y) : std::abs(to.x - from.x);
  return std::atan2(perp, par);
}

struct PathCollector {
  const Layout& layout;
  const Point& tx;
  const Point& rx;
  Polarization pol;
  std::vector<RayPath> paths;

  // seq holds wall indices in bounce order, images[m] the source mirrored
  // through seq[0..m].
  void visit(std::vector<std::size_t>& seq, std::vector<Point>& images, int max_order) {
    if (!seq.empty()) try_sequence(seq, images);
    if (static_cast<int>(seq.size()) == max_order) return;
    for (std::size_t i = 0; i < layout.wall_count(); ++i) {
      if (!seq.empty() && seq.back() == i) continue;
      seq.push_back(i);
      images.push_back(mirror(images.back(), layout.wall(i)));
      visit(seq, images, max_order);
      seq.pop_back();
      images.pop_back();
    }
  }

  void try_sequence(const std::vector<std::size_t>& seq, const std::vector<Point>& images) {
    const std::size_t k = seq.size();
    std::vector<Point> bounce(k);
    Point pt = rx;
    for (std::size_t m = k; m-- > 0;) {
      const auto p = cross_point(pt, images[m + 1], layout.wall(seq[m]));
      if (!p) return;
      bounce[m] = *p;
      pt = *p;
    }
    std::vector<Point> pts;
    pts.reserve(k + 2);
    pts.push_back(tx);
    pts.insert(pts.end(), bounce.begin(), bounce.end());
    pts.push_back(rx);
    double gamma = 1.0;
    for (std::size_t m = 0; m < k; ++m) {
      if (leg_blocked(layout, pts[m], pts[m + 1])) return;
      const Wall w = layout.wall(seq[m]);
      gamma *= fresnel_gamma(grazing_angle(pts[m], pts[m + 1], w), w.epsilon, pol);
    }
    if (leg_blocked(layout, pts[k], pts[k + 1])) return;
    paths.push_back(RayPath{std::move(pts), distance(rx, images[k]), gamma,
                            static_cast<int>(k)});
  }
};

}  // namespace

std::vector<RayPath> trace_image_paths(const Layout& layout, const Point& tx, const Point& rx,
                                       int max_order, Polarization pol) {
  if (max_order < 0 || max_order > 3)
    throw std::invalid_argument("trace_image_paths: max_order must lie in [0, 3]");
  if (!layout.contains(tx) || !layout.contains(rx))
    throw std::domain_error("trace_image_paths: tx and rx must lie strictly inside the layout");
  PathCollector collector{layout, tx, rx, pol, {}};
  if (!leg_blocked(layout, tx, rx))
    collector.paths.push_back(RayPath{{tx, rx}, distance(tx, rx), 1.0, 0});
  std::vector<std::size_t> seq;
  std::vector<Point> images{tx};
  collector.visit(seq, images, max_order);
  return collector.paths;
}

Complex image_method_reference(const Layout& layout, const RadioParams& params, const Point& tx,
                               const Point& rx, int max_order) {
  const double lambda = params.wavelength();
  Complex sum{0.0, 0.0};
  for (const RayPath& p : trace_image_paths(layout, tx, rx, max_order, params.polarization))
    sum += p.gamma * std::polar(1.0, -2.0 * std::numbers::pi * p.length / lambda) / p.length;
  return std::sqrt(params.gt * params.gr) * lambda / (4.0 * std::numbers::pi) * sum;
}

}  // namespace fasim
