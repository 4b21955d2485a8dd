#ifndef FASIM_GEOMETRY_HPP
#define FASIM_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace fasim {

struct Point {
  double x{0.0};
  double y{0.0};
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

double distance(const Point& a, const Point& b);

/// One wall of a rectilinear layout. Walls are axis-aligned segments; `vertical`
/// walls have constant x, horizontal walls constant y.
struct Wall {
  Point a;
  Point b;
  double epsilon{1.0};

  bool vertical() const { return a.x == b.x; }
  /// The constant coordinate (x for vertical walls, y for horizontal ones).
  double coord() const { return vertical() ? a.x : a.y; }
  /// Extent along the wall direction, lo <= hi.
  double lo() const;
  double hi() const;
};

/// Simple rectilinear polygon given by its corner points in clockwise order,
/// one relative permittivity per wall. Wall i runs from corner i to corner i+1
/// (wrapping), so the wall count equals the corner count.
class Layout {
 public:
  Layout(std::vector<Point> corners, std::vector<double> wall_permittivity);

  std::size_t wall_count() const { return corners_.size(); }
  Wall wall(std::size_t i) const;
  const std::vector<Point>& corners() const { return corners_; }
  const std::vector<double>& permittivity() const { return permittivity_; }

  /// True iff p lies strictly inside the polygon (boundary points excluded).
  bool contains(const Point& p) const;

  /// {min_x, min_y, max_x, max_y}
  std::array<double, 4> bounding_box() const;

 private:
  std::vector<Point> corners_;
  std::vector<double> permittivity_;
};

/// Horizontal line y = y0 along which the transmit antennas slide. Antenna
/// positions on it are parameterized by the polar angle subtended at the
/// designated reference receiver.
struct FasLine {
  double y0{0.0};
  Point reference_rx;
};

/// Perpendicular distances of Tx (d1) and Rx (d2) to a wall, and their
/// separation d3 measured along the wall direction.
struct AngleDistances {
  double d1{0.0};
  double d2{0.0};
  double d3{0.0};
};

/// Maps a polar angle theta in (0, pi) to the antenna position on the line:
/// x = x_ref - (y_ref - y0) / tan(theta), handled exactly at theta = pi/2.
Point theta_to_position(double theta, const FasLine& fas);

/// Inverse of theta_to_position for points on the line.
double position_to_theta(const Point& p, const FasLine& fas);

AngleDistances angle_distances(const Layout& layout, std::size_t wall_index,
                               const Point& tx, const Point& rx);

/// True iff the open segment (a1,a2) crosses the closed segment [b1,b2].
/// Endpoints of the first segment never count, so a ray whose endpoint lies on
/// its own reflecting wall is not reported as blocked by it; touching the
/// second segment anywhere else, including its endpoints, does count.
bool segment_intersects(const Point& a1, const Point& a2, const Point& b1, const Point& b2);

}  // namespace fasim

#endif
