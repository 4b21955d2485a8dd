#include "fasim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fasim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool on_segment(const Wall& w, const Point& p) {
  if (w.vertical()) return p.x == w.coord() && p.y >= w.lo() && p.y <= w.hi();
  return p.y == w.coord() && p.x >= w.lo() && p.x <= w.hi();
}

bool blocked_by_any_wall(const Layout& layout, const Point& a, const Point& b) {
  for (std::size_t i = 0; i < layout.wall_count(); ++i) {
    const Wall w = layout.wall(i);
    if (segment_intersects(a, b, w.a, w.b)) return true;
  }
  return false;
}

}  // namespace

Point reflection_point(const Wall& wall, const Point& tx, const Point& rx) {
  double d1, d2, foot, toward;
  if (wall.vertical()) {
    d1 = std::abs(tx.x - wall.coord());
    d2 = std::abs(rx.x - wall.coord());
    foot = tx.y;
    toward = rx.y - tx.y;
  } else {
    d1 = std::abs(tx.y - wall.coord());
    d2 = std::abs(rx.y - wall.coord());
    foot = tx.x;
    toward = rx.x - tx.x;
  }
  if (d1 + d2 == 0.0) throw std::domain_error("reflection_point: both endpoints on the wall");
  const double sign_tx = wall.vertical() ? tx.x - wall.coord() : tx.y - wall.coord();
  const double sign_rx = wall.vertical() ? rx.x - wall.coord() : rx.y - wall.coord();
  if (sign_tx * sign_rx <= 0.0)
    throw std::domain_error("reflection_point: endpoints not strictly on the same side");
  const double d3 = std::abs(toward);
  const double u = d1 * d3 / (d1 + d2);
  const double along = foot + (toward >= 0.0 ? u : -u);
  return wall.vertical() ? Point{wall.coord(), along} : Point{along, wall.coord()};
}

RayIndicators indicator_functions(const Layout& layout, const Point& tx, const Point& rx) {
  if (!layout.contains(tx) || !layout.contains(rx))
    throw std::domain_error("indicator_functions: tx and rx must lie strictly inside the layout");
  const std::size_t m = layout.wall_count();
  RayIndicators ind;
  ind.wall_nlos.assign(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const Wall w = layout.wall(i);
    // No specular bounce when the pair straddles the wall's line (or touches
    // it), which happens for far walls of non-convex rooms.
    const double side_tx = w.vertical() ? tx.x - w.coord() : tx.y - w.coord();
    const double side_rx = w.vertical() ? rx.x - w.coord() : rx.y - w.coord();
    if (side_tx * side_rx <= 0.0) continue;
    const Point s = reflection_point(w, tx, rx);
    if (!on_segment(w, s)) continue;
    if (blocked_by_any_wall(layout, tx, s)) continue;
    if (blocked_by_any_wall(layout, s, rx)) continue;
    ind.wall_nlos[i] = true;
  }
  ind.los = !blocked_by_any_wall(layout, tx, rx);
  return ind;
}

double fresnel_gamma(double alpha, double epsilon, Polarization pol) {
  if (!(alpha > 0.0 && alpha <= std::numbers::pi / 2.0))
    throw std::domain_error("fresnel_gamma: incidence angle must lie in (0, pi/2]");
  const double s = std::sin(alpha);
  // epsilon - cos^2 = (epsilon - 1) + sin^2, exact for a vacuum wall.
  const double under = (epsilon - 1.0) + s * s;
  if (under < 0.0) throw std::domain_error("fresnel_gamma: epsilon < cos^2(alpha)");
  const double root = std::sqrt(under);
  if (pol == Polarization::TM) return (-epsilon * s + root) / (epsilon * s + root);
  return (s - root) / (s + root);
}

double nlos_length(const AngleDistances& d) {
  return std::hypot(d.d3, d.d1 + d.d2);
}

double incidence_angle(const AngleDistances& d) {
  if (d.d3 == 0.0) {
    if (d.d1 + d.d2 == 0.0) throw std::domain_error("incidence_angle: degenerate geometry");
    return std::numbers::pi / 2.0;
  }
  return std::atan((d.d1 + d.d2) / d.d3);
}

double los_length(double theta, double y0, double y1) {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw std::domain_error("los_length: theta must lie in (0, pi)");
  return (y1 - y0) / std::sin(theta);
}

Complex channel_coefficient(const Layout& layout, const RadioParams& params, const Point& tx,
                            const Point& rx) {
  const double lambda = params.wavelength();
  const RayIndicators ind = indicator_functions(layout, tx, rx);
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < layout.wall_count(); ++i) {
    if (!ind.wall_nlos[i]) continue;
    const AngleDistances d = angle_distances(layout, i, tx, rx);
    const double len = nlos_length(d);
    const double gamma = fresnel_gamma(incidence_angle(d), layout.permittivity()[i],
                                       params.polarization);
    sum += gamma * std::polar(1.0, -kTwoPi * len / lambda) / len;
  }
  if (ind.los) {
    const double len = distance(tx, rx);
    sum += std::polar(1.0, -kTwoPi * len / lambda) / len;
  }
  return std::sqrt(params.gt * params.gr) * lambda / (4.0 * std::numbers::pi) * sum;
}

ChannelVector channel_vector(const Layout& layout, const RadioParams& params,
                             std::span<const double> thetas, const FasLine& fas,
                             const Point& rx) {
  ChannelVector h(static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t j = 0; j < thetas.size(); ++j)
    h[static_cast<Eigen::Index>(j)] =
        channel_coefficient(layout, params, theta_to_position(thetas[j], fas), rx);
  return h;
}

Complex spatial_correlation(Complex h1, Complex h2) {
  const double m1 = std::abs(h1), m2 = std::abs(h2);
  if (m1 == 0.0 || m2 == 0.0)
    throw std::domain_error("spatial_correlation: zero channel coefficient");
  return h1 * std::conj(h2) / (m1 * m2);
}

}  // namespace fasim
