#ifndef FASIM_CHANNEL_HPP
#define FASIM_CHANNEL_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fasim/geometry.hpp"

namespace fasim {

using Complex = std::complex<double>;
using ChannelVector = Eigen::VectorXcd;

enum class Polarization { TM, TE };

struct RadioParams {
  double frequency_hz{5e9};
  double gt{1.0};
  double gr{1.0};
  double noise_power_w{1e-12};
  Polarization polarization{Polarization::TM};

  double wavelength() const { return 3e8 / frequency_hz; }
};

/// Presence flags for the rays between one Tx-Rx pair: one single-reflection
/// ray per wall plus the direct ray.
struct RayIndicators {
  std::vector<bool> wall_nlos;
  bool los{false};
};

/// Specular reflection point of the tx->wall->rx bounce on the wall's line.
/// The offset from the foot of tx's perpendicular is u = d1*d3/(d1+d2),
/// measured toward rx.
Point reflection_point(const Wall& wall, const Point& tx, const Point& rx);

/// Decides which rays exist: a wall's reflection requires its specular point
/// to fall within the finite wall segment and both sub-segments to be clear of
/// every other wall; the direct ray requires a clear tx->rx segment.
RayIndicators indicator_functions(const Layout& layout, const Point& tx, const Point& rx);

/// Amplitude reflection coefficient for incidence angle alpha measured from
/// the wall plane (alpha = pi/2 is normal incidence) and relative
/// permittivity epsilon >= 1. Lies in [-1, 1]; zero for epsilon = 1.
double fresnel_gamma(double alpha, double epsilon, Polarization pol);

/// Unfolded length of the single-reflection ray: sqrt(d3^2 + (d1+d2)^2).
double nlos_length(const AngleDistances& d);

/// Incidence angle of the single-reflection ray, in (0, pi/2]; exactly pi/2
/// for a perpendicular bounce (d3 = 0).
double incidence_angle(const AngleDistances& d);

/// Direct-ray length from the antenna at polar angle theta to a receiver at
/// height y1: (y1 - y0) / sin(theta).
double los_length(double theta, double y0, double y1);

/// Complex channel coefficient summing the existing single-reflection rays and
/// the direct ray, each with free-space spreading and phase, reflections
/// additionally weighted by their Fresnel coefficient.
Complex channel_coefficient(const Layout& layout, const RadioParams& params, const Point& tx,
                            const Point& rx);

/// Per-antenna channel coefficients for antennas at polar angles `thetas` on
/// the antenna line, all towards the same receiver.
ChannelVector channel_vector(const Layout& layout, const RadioParams& params,
                             std::span<const double> thetas, const FasLine& fas, const Point& rx);

/// Normalized correlation h1 * conj(h2) / (|h1| |h2|); |result| is 1 for any
/// two nonzero scalars, the phase carries the path-difference information.
Complex spatial_correlation(Complex h1, Complex h2);

/// One specular path found by the image method. `points` runs tx, reflection
/// points in bounce order, rx; `gamma` is the product of per-bounce
/// reflection coefficients.
struct RayPath {
  std::vector<Point> points;
  double length{0.0};
  double gamma{1.0};
  int order{0};
};

/// Enumerates all visible specular paths up to `max_order` bounces via mirror
/// images and backtracing. Independent of indicator_functions / Algorithm-1
/// machinery; used as the validation reference.
std::vector<RayPath> trace_image_paths(const Layout& layout, const Point& tx, const Point& rx,
                                       int max_order, Polarization pol);

/// Channel coefficient assembled from trace_image_paths. At max_order = 1 it
/// re-derives channel_coefficient through entirely different geometry.
Complex image_method_reference(const Layout& layout, const RadioParams& params, const Point& tx,
                               const Point& rx, int max_order);

}  // namespace fasim

#endif
