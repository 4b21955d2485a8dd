#ifndef FASIM_RL_POLICY_HPP
#define FASIM_RL_POLICY_HPP

#include <random>

#include "fasim/rl/mlp.hpp"

namespace fasim::rl {

struct PolicySample {
  Eigen::VectorXd action;  // in environment units, inside the box
  Eigen::VectorXd u;       // pre-squash Gaussian draw, kept for ratio evaluation
  double log_prob{0.0};
};

struct PolicyGrad {
  MlpGrad net;
  Eigen::VectorXd dlog_std;

  void set_zero();
  bool finite() const;
};

/// Diagonal Gaussian over the network output with state-independent log-std,
/// squashed through tanh and mapped affinely into per-dimension box bounds.
/// Log densities include the squash Jacobian, so they are proper densities of
/// the boxed action.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int state_dim, int hidden, Eigen::VectorXd lower, Eigen::VectorXd upper,
                 double log_std_init, std::mt19937_64& rng);

  int action_dim() const { return static_cast<int>(lo_.size()); }
  std::size_t parameter_count() const { return net_.parameter_count() + log_std_.size(); }

  PolicySample sample(const Eigen::VectorXd& state, std::mt19937_64& rng) const;
  Eigen::VectorXd mean_action(const Eigen::VectorXd& state) const;
  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& u) const;

  /// log_prob plus `coeff * d(log_prob)/d(params)` accumulated into `grad`.
  double log_prob_with_grad(const Eigen::VectorXd& state, const Eigen::VectorXd& u, double coeff,
                            PolicyGrad& grad) const;

  /// Sum of per-dimension Gaussian entropies (squash Jacobian excluded).
  double entropy() const;

  Eigen::VectorXd squash(const Eigen::VectorXd& u) const;

  PolicyGrad zero_grad() const;
  void apply_step(const PolicyGrad& grad, double step_scale);

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  Eigen::VectorXd& log_std() { return log_std_; }
  const Eigen::VectorXd& lower() const { return lo_; }
  const Eigen::VectorXd& upper() const { return hi_; }

 private:
  Mlp net_;
  Eigen::VectorXd log_std_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

}  // namespace fasim::rl

#endif
