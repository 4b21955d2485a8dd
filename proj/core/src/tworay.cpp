#include "fasim/tworay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fasim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

double reflected_length(double theta, const TwoRayInstance& inst) {
  const double dy = inst.y1 - inst.y0;
  return std::hypot(dy, 2.0 * inst.x1 - dy / std::tan(theta));
}

double incidence(double theta, const TwoRayInstance& inst) {
  const double dy = inst.y1 - inst.y0;
  return std::atan(2.0 * inst.x1 / dy - 1.0 / std::tan(theta));
}

double gamma_at(double theta, const TwoRayInstance& inst) {
  return fresnel_gamma(incidence(theta, inst), inst.epsilon, inst.params.polarization);
}

// Nearest-integer with ties to even, as distinct from floor/ceil.
double round_half_even(double x) { return std::nearbyint(x); }

double rate_from_snr(double snr) { return std::log2(1.0 + snr); }

}  // namespace

double TwoRayInstance::lower_bound() const { return std::atan((y1 - y0) / x1); }

void TwoRayInstance::validate() const {
  if (!(x1 > 0.0)) throw std::invalid_argument("two-ray: x1 must be positive");
  if (!(y1 > y0)) throw std::invalid_argument("two-ray: y1 must exceed y0");
  if (!(epsilon >= 1.0)) throw std::invalid_argument("two-ray: epsilon must be >= 1");
  if (!(tx_power_w > 0.0)) throw std::invalid_argument("two-ray: transmit power must be positive");
  if (!(theta_l > lower_bound() && theta_l <= theta_r && theta_r < kPi))
    throw std::invalid_argument(
        "two-ray: bounds must satisfy arctan((y1-y0)/x1) < theta_l <= theta_r < pi");
}

double snr_two_ray(double theta, const TwoRayInstance& inst) {
  if (!(theta > inst.lower_bound() && theta < kPi))
    throw std::domain_error("snr_two_ray: theta outside (arctan((y1-y0)/x1), pi)");
  const double dy = inst.y1 - inst.y0;
  const double lambda = inst.params.wavelength();
  const double d_ref = reflected_length(theta, inst);
  const double d_dir = dy / std::sin(theta);
  const double gamma = gamma_at(theta, inst);
  const double prefactor = inst.params.gt * inst.params.gr * lambda * lambda /
                           (inst.params.noise_power_w * 16.0 * kPi * kPi);
  const double nlos = gamma * gamma / (d_ref * d_ref);
  const double los = std::sin(theta) * std::sin(theta) / (dy * dy);
  const double interaction =
      2.0 * gamma * std::cos(2.0 * kPi * (d_ref - d_dir) / lambda) / (d_dir * d_ref);
  return prefactor * (nlos + los + interaction);
}

double path_difference(double theta, const TwoRayInstance& inst) {
  const double dy = inst.y1 - inst.y0;
  return reflected_length(theta, inst) - dy / std::sin(theta);
}

std::optional<double> f_of_n(int n, const TwoRayInstance& inst) {
  if (n < 1) throw std::invalid_argument("f_of_n: n must be >= 1");
  const double dy = inst.y1 - inst.y0;
  const double lambda = inst.params.wavelength();
  const double a = 4.0 * inst.x1 * inst.x1 - n * n * lambda * lambda / 4.0;
  const double b = 4.0 * inst.x1 * dy;
  const double r = std::hypot(a, b);
  const double arg = n * lambda * dy / r;
  if (std::abs(arg) > 1.0) return std::nullopt;
  const double theta = std::asin(arg) - std::atan(-b / a);
  if (!(theta > inst.lower_bound() && theta < kPi)) return std::nullopt;
  // Squaring in the derivation can admit the wrong sine branch; keep only
  // angles that actually hit the target path difference.
  if (std::abs(path_difference(theta, inst) - n * lambda / 2.0) > 1e-9) return std::nullopt;
  return theta;
}

TwoRaySolution solve_closed_form(const TwoRayInstance& inst) {
  inst.validate();
  const double lambda = inst.params.wavelength();

  TwoRaySolution sol;
  if (inst.theta_r < kHalfPi)
    sol.case_id = TwoRayCase::Case1;
  else if (inst.theta_l >= kHalfPi)
    sol.case_id = TwoRayCase::Case3;
  else
    sol.case_id = TwoRayCase::Case2;

  const double anchor = sol.case_id == TwoRayCase::Case1   ? inst.theta_r
                        : sol.case_id == TwoRayCase::Case3 ? inst.theta_l
                                                           : kHalfPi;

  auto add_candidate = [&](double theta, std::optional<int> n) {
    for (const TwoRayCandidate& c : sol.candidates)
      if (c.theta == theta) return;
    sol.candidates.push_back({theta, inst.tx_power_w * snr_two_ray(theta, inst), n});
  };
  auto add_f_of_n = [&](int n) -> std::optional<double> {
    if (n < 1) return std::nullopt;
    const auto theta = f_of_n(n, inst);
    if (theta && *theta >= inst.theta_l && *theta <= inst.theta_r) {
      add_candidate(*theta, n);
      return theta;
    }
    return std::nullopt;
  };

  const double gamma_anchor = gamma_at(anchor, inst);
  if (gamma_anchor != 0.0) {
    const double q = path_difference(anchor, inst) / lambda;
    std::vector<int> picks;
    switch (sol.case_id) {
      case TwoRayCase::Case1:
        // Nearest stationary angle at or below theta_r: largest even or odd
        // half-wavelength count not exceeding the anchor path difference.
        picks.push_back(gamma_anchor > 0.0 ? 2 * static_cast<int>(std::floor(q))
                                           : 2 * static_cast<int>(round_half_even(q)) - 1);
        break;
      case TwoRayCase::Case3:
        picks.push_back(gamma_anchor > 0.0 ? 2 * static_cast<int>(std::ceil(q))
                                           : 2 * static_cast<int>(round_half_even(q)) + 1);
        break;
      case TwoRayCase::Case2:
        if (gamma_anchor > 0.0) {
          picks.push_back(2 * static_cast<int>(std::floor(q)));
          picks.push_back(2 * static_cast<int>(std::ceil(q)));
        } else {
          picks.push_back(2 * static_cast<int>(round_half_even(q)) - 1);
          picks.push_back(2 * static_cast<int>(round_half_even(q)) + 1);
        }
        break;
    }
    for (int n : picks) {
      const auto theta = add_f_of_n(n);
      if (!theta) continue;
      // The branch choice assumed the anchor's reflection sign; when the sign
      // has flipped at the candidate itself, evaluate the other branch too.
      const double gamma_cand = gamma_at(*theta, inst);
      if (gamma_cand * gamma_anchor < 0.0) {
        sol.gamma_sign_mixed = true;
        const double qc = path_difference(*theta, inst) / lambda;
        if (gamma_cand > 0.0) {
          add_f_of_n(2 * static_cast<int>(std::floor(qc)));
          add_f_of_n(2 * static_cast<int>(std::ceil(qc)));
        } else {
          add_f_of_n(2 * static_cast<int>(round_half_even(qc)) - 1);
          add_f_of_n(2 * static_cast<int>(round_half_even(qc)) + 1);
        }
      }
    }
  }
  add_candidate(anchor, std::nullopt);

  const auto best = std::max_element(
      sol.candidates.begin(), sol.candidates.end(),
      [](const TwoRayCandidate& a, const TwoRayCandidate& b) { return a.snr < b.snr; });
  sol.theta_star = best->theta;
  sol.snr = best->snr;
  sol.rate = rate_from_snr(sol.snr);
  return sol;
}

TwoRaySolution exhaustive_search(const TwoRayInstance& inst, int grid_points) {
  inst.validate();
  if (grid_points < 1000)
    throw std::invalid_argument("exhaustive_search: need at least 1000 grid points");

  auto snr = [&](double t) { return inst.tx_power_w * snr_two_ray(t, inst); };

  const double span = inst.theta_r - inst.theta_l;
  double best_theta = inst.theta_l;
  double best_snr = snr(best_theta);
  int best_i = 0;
  for (int i = 1; i < grid_points; ++i) {
    const double t = inst.theta_l + span * i / (grid_points - 1);
    const double s = snr(t);
    if (s > best_snr) {
      best_snr = s;
      best_theta = t;
      best_i = i;
    }
  }

  // Golden-section refinement inside the bracket around the best grid point.
  const double step = span / (grid_points - 1);
  double a = std::max(inst.theta_l, inst.theta_l + step * (best_i - 1));
  double b = std::min(inst.theta_r, inst.theta_l + step * (best_i + 1));
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = snr(c), fd = snr(d);
  while (b - a > 1e-13) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = snr(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = snr(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double mid_snr = snr(mid);
  if (mid_snr > best_snr) {
    best_theta = mid;
    best_snr = mid_snr;
  }

  TwoRaySolution sol;
  sol.case_id = inst.theta_r < kHalfPi    ? TwoRayCase::Case1
                : inst.theta_l >= kHalfPi ? TwoRayCase::Case3
                                          : TwoRayCase::Case2;
  sol.theta_star = best_theta;
  sol.snr = best_snr;
  sol.rate = rate_from_snr(best_snr);
  sol.candidates.push_back({best_theta, best_snr, std::nullopt});
  return sol;
}

}  // namespace fasim
