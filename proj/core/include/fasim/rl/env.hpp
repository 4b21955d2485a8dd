#ifndef FASIM_RL_ENV_HPP
#define FASIM_RL_ENV_HPP

#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fasim/optim.hpp"

namespace fasim::rl {

/// Environment with a pure transition function: step takes the state
/// explicitly, so rollouts may run concurrently with independent RNG streams.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual Eigen::VectorXd action_lower() const = 0;
  virtual Eigen::VectorXd action_upper() const = 0;
  virtual Eigen::VectorXd reset(std::mt19937_64& rng) = 0;
  virtual std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd& state,
                                                  const Eigen::VectorXd& action) = 0;
};

/// Decoded view of a flat action vector: n_antennas angles followed by the
/// interleaved real/imaginary beam components of each receiver's vector.
struct DecodedAction {
  std::vector<double> thetas;
  BeamformingSet beams;
};

/// Joint placement/beamforming environment. The state stacks receiver
/// positions, the transmit anchor, and the layout corners. A feasible action
/// earns the sum rate; an infeasible one earns the penalty constant. After a
/// step the anchor moves to the first antenna's position.
class PlacementEnv : public Environment {
 public:
  PlacementEnv(Layout layout, RadioParams params, std::vector<Point> rxs, double fas_y0,
               FasConstraints constraints, double anchor_x_lo, double anchor_x_hi, int n_antennas,
               double infeasible_penalty = -100.0);

  int state_dim() const override;
  int action_dim() const override;
  Eigen::VectorXd action_lower() const override;
  Eigen::VectorXd action_upper() const override;
  Eigen::VectorXd reset(std::mt19937_64& rng) override;
  std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd& state,
                                          const Eigen::VectorXd& action) override;

  DecodedAction decode(const Eigen::VectorXd& action) const;
  double reward_of(const DecodedAction& a) const;

  int n_antennas() const { return n_antennas_; }
  int n_receivers() const { return static_cast<int>(rxs_.size()); }
  const FasConstraints& constraints() const { return constraints_; }
  const Layout& layout() const { return layout_; }

 private:
  Eigen::VectorXd encode_state(const Point& anchor) const;

  Layout layout_;
  RadioParams params_;
  std::vector<Point> rxs_;
  FasLine fas_;
  FasConstraints constraints_;
  double anchor_x_lo_;
  double anchor_x_hi_;
  int n_antennas_;
  double penalty_;
};

}  // namespace fasim::rl

#endif
