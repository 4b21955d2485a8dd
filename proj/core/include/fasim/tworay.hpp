#ifndef FASIM_TWORAY_HPP
#define FASIM_TWORAY_HPP

#include <optional>
#include <vector>

#include "fasim/channel.hpp"

namespace fasim {

/// Point-to-point link next to a single wall: the wall is the y-axis, the
/// receiver sits at (x1, y1) with x1 > 0, and the transmit antenna slides
/// along y = y0 (y0 < y1), parameterized by the polar angle theta at the
/// receiver. Valid angles run from arctan((y1-y0)/x1), where the antenna
/// would touch the wall, up to pi.
struct TwoRayInstance {
  double x1{1.0};
  double y1{1.0};
  double y0{0.0};
  double epsilon{5.24};
  RadioParams params;
  double theta_l{0.0};
  double theta_r{0.0};
  double tx_power_w{1.0};

  double lower_bound() const;
  void validate() const;
};

enum class TwoRayCase { Case1, Case2, Case3 };

struct TwoRayCandidate {
  double theta{0.0};
  double snr{0.0};
  std::optional<int> n;  // half-wavelength index; empty for anchor points
};

struct TwoRaySolution {
  double theta_star{0.0};
  double snr{0.0};  // includes the transmit power factor
  double rate{0.0};
  TwoRayCase case_id{TwoRayCase::Case1};
  std::vector<TwoRayCandidate> candidates;
  /// Set when the reflection coefficient changes sign between the anchor
  /// angle and a candidate, in which case both branch choices are evaluated.
  bool gamma_sign_mixed{false};
};

/// Receive SNR of the two-ray link at angle theta (transmit power excluded):
/// reflected-ray term, direct-ray term, and their interference term.
double snr_two_ray(double theta, const TwoRayInstance& inst);

/// Path length difference d_reflected - d_direct at theta; strictly
/// increasing over the valid angle range, from 0 up to 2*x1.
double path_difference(double theta, const TwoRayInstance& inst);

/// The angle where the ray path difference equals n half-wavelengths, i.e. a
/// stationary point of the interference term. Empty when no such angle
/// exists or the formula's plug-back residual check fails.
std::optional<double> f_of_n(int n, const TwoRayInstance& inst);

/// Closed-form maximizer of snr_two_ray over [theta_l, theta_r]: picks the
/// case from the bounds' position relative to pi/2, evaluates the in-range
/// stationary-angle candidates plus the case's anchor point, and returns the
/// argmax.
TwoRaySolution solve_closed_form(const TwoRayInstance& inst);

/// Dense grid evaluation with golden-section refinement around the best grid
/// point; reference for solve_closed_form.
TwoRaySolution exhaustive_search(const TwoRayInstance& inst, int grid_points = 100000);

}  // namespace fasim

#endif
