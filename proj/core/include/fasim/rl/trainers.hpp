#ifndef FASIM_RL_TRAINERS_HPP
#define FASIM_RL_TRAINERS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fasim/rl/env.hpp"
#include "fasim/rl/policy.hpp"

namespace fasim::rl {

struct TrainConfig {
  int group_size{8};            // trajectories per group
  int trajectory_length{5};     // steps per trajectory
  long ppo_init_steps{25000};   // environment steps for the reference policy
  int grpo_iterations{500};
  int inner_updates{4};         // gradient steps per group
  double clip{0.1};
  double kl_penalty{1e-4};
  double learning_rate{9.46e-4};
  int batch_size{64};
  std::uint64_t seed{0};

  int hidden{256};
  double log_std_init{-1.5};
  double infeasible_penalty{-100.0};
  double discount{0.99};
  double gae_lambda{0.95};
  bool adam{false};  // plain stochastic gradient steps by default
  int ppo_epochs{4};
  int ppo_rollout{320};  // steps collected per update
  double value_coeff{0.5};
  double entropy_coeff{0.0};

  void validate() const;
};

struct Trajectory {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::VectorXd> actions;    // environment units
  std::vector<Eigen::VectorXd> actions_u;  // pre-squash draws
  std::vector<double> rewards;
  std::vector<double> log_probs;
  double final_reward{0.0};
};

struct Group {
  std::vector<Trajectory> trajectories;
  std::vector<double> advantages;
};

struct IterationRecord {
  int iteration{0};
  double group_mean{0.0};
  double group_max{0.0};
  double kl_mean{0.0};
  std::optional<double> wall_clock_s;
};

class TrainLogger {
 public:
  virtual ~TrainLogger() = default;
  virtual void on_iteration(const IterationRecord& rec) = 0;
};

/// Rewards standardized within the group: (r - mean) / max(std, 1e-8), with
/// the population standard deviation.
std::vector<double> group_advantages(std::span<const double> rewards);

/// min(ratio * advantage, clip(ratio, 1-c, 1+c) * advantage).
double clipped_term(double ratio, double advantage, double c);

/// Nonnegative estimator r - log r - 1 with r = ref_prob / cur_prob.
double kl_estimate(double ref_prob, double cur_prob);

/// Mean over the group of the per-step clipped surrogate minus the KL
/// penalty, with ratios taken between `policy` and `old_policy` on the stored
/// observations.
double grpo_objective(const Group& group, const GaussianPolicy& policy,
                      const GaussianPolicy& old_policy, const GaussianPolicy& ref_policy,
                      const TrainConfig& cfg);

/// Objective value plus its gradient with respect to `policy`'s parameters.
double grpo_objective_and_grad(const Group& group, const GaussianPolicy& policy,
                               const GaussianPolicy& old_policy, const GaussianPolicy& ref_policy,
                               const TrainConfig& cfg, PolicyGrad& grad);

struct PpoDiagnostics {
  std::vector<double> value_losses;       // one entry per update
  std::vector<double> mean_step_rewards;  // one entry per update
  std::vector<double> max_step_rewards;
  std::size_t actor_parameters{0};
  std::size_t critic_parameters{0};
  long env_steps{0};
};

/// Clipped-surrogate PPO with a learned value baseline and generalized
/// advantage estimation, run for cfg.ppo_init_steps environment steps.
/// Returns the actor, which serves as the reference policy.
GaussianPolicy ppo_init(Environment& env, const TrainConfig& cfg,
                        PpoDiagnostics* diagnostics = nullptr);

struct GrpoResult {
  GaussianPolicy policy;
  std::vector<IterationRecord> history;
  long env_steps{0};
  int skipped_updates{0};
};

/// Group-relative training loop: per iteration, snapshot the old policy,
/// roll out a group of trajectories from one shared start, standardize the
/// final rewards within the group, and take inner gradient-ascent steps on
/// the objective.
GrpoResult grpo_train(Environment& env, const TrainConfig& cfg, const GaussianPolicy& ref_policy,
                      TrainLogger* logger = nullptr);

/// Deterministic per-stream seed derivation.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

}  // namespace fasim::rl

#endif
