#ifndef FASIM_OPTIM_HPP
#define FASIM_OPTIM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fasim/channel.hpp"

namespace fasim {

/// One transmit beamforming vector per receiver, entries in sqrt(Watt).
struct BeamformingSet {
  std::vector<Eigen::VectorXcd> vectors;

  double total_power() const;
};

/// Feasible region for antenna angles and transmit power.
struct FasConstraints {
  double theta_l{0.0};
  double theta_r{0.0};
  double delta{0.0};
  double p_max{1.0};
};

/// Which channel index appears in the interference sum. Downlink is the
/// conventional form (receiver k hears every beam through its own channel);
/// AsPrinted swaps the indexing and is kept for comparison runs.
enum class SinrConvention { Downlink, AsPrinted };

double sinr(std::size_t k, const std::vector<ChannelVector>& channels, const BeamformingSet& beams,
            double sigma2, SinrConvention convention = SinrConvention::Downlink);

double sum_rate(const std::vector<ChannelVector>& channels, const BeamformingSet& beams,
                double sigma2, SinrConvention convention = SinrConvention::Downlink);

enum class ConstraintViolation { PowerExceeded, ThetaOutOfRange, ThetaUnsorted, SeparationTooSmall };

struct ConstraintReport {
  bool ok{true};
  std::vector<ConstraintViolation> violations;
  std::string detail;
};

/// Feasibility of (angles, beams): power within budget, angles sorted inside
/// [theta_l, theta_r], adjacent angles at least delta apart (boundaries
/// inclusive). The same predicate backs the training reward.
ConstraintReport check_constraints(std::span<const double> thetas, const BeamformingSet& beams,
                                   const FasConstraints& c);

struct WmmseResult {
  BeamformingSet beams;
  double sum_rate{0.0};
  int iterations{0};
  bool regularized{false};
  std::vector<double> rate_history;
};

/// Block-coordinate weighted-MMSE beamforming for sum-rate maximization under
/// a total power budget; the power constraint is enforced by bisection on the
/// dual multiplier. Sum rate is non-decreasing across iterations.
WmmseResult wmmse(const std::vector<ChannelVector>& channels, double p_max, double sigma2,
                  int max_iters = 200, double tol = 1e-6);

struct GridSearchResult {
  std::vector<double> positions_x;
  std::vector<double> thetas;
  BeamformingSet beams;
  double sum_rate{0.0};
  std::uint64_t combinations{0};
};

/// Enumerates all antenna placements on the grid {anchor_x + m*spacing :
/// m = 0..grid_count-1}, choose n_antennas at a time, runs wmmse on each and
/// returns the best. Throws when the combination count exceeds `cap`.
GridSearchResult grid_search_positions(const Layout& layout, const RadioParams& params,
                                       const std::vector<Point>& rxs, int n_antennas,
                                       const FasLine& fas, const FasConstraints& c,
                                       double anchor_x, double grid_spacing = 0.03,
                                       int grid_count = 26, std::uint64_t cap = 1000000,
                                       int workers = 1);

struct FixedPositionsResult {
  double mean_rate{0.0};
  double stddev{0.0};
  int samples{0};
};

/// Average wmmse sum-rate over uniformly random feasible angle tuples;
/// the random-placement baseline.
FixedPositionsResult wmmse_fixed_positions(const Layout& layout, const RadioParams& params,
                                           const std::vector<Point>& rxs, int n_antennas,
                                           const FasLine& fas, const FasConstraints& c,
                                           int samples, std::uint64_t seed);

}  // namespace fasim

#endif
