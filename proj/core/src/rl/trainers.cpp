#include "fasim/rl/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fasim/errors.hpp"

namespace fasim::rl {

namespace {

// splitmix64; decorrelates the per-stream generators from the base seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Adam moments for a PolicyGrad-shaped buffer; inactive under plain SGD.
struct AdamState {
  PolicyGrad m, v;
  long t{0};

  static AdamState like(const GaussianPolicy& p) {
    AdamState s;
    s.m = p.zero_grad();
    s.v = p.zero_grad();
    return s;
  }
};

// One bias-corrected Adam step on a parameter buffer, ascent direction.
void adam_step(Eigen::Ref<Eigen::MatrixXd> param, Eigen::Ref<Eigen::MatrixXd> m,
               Eigen::Ref<Eigen::MatrixXd> v, const Eigen::Ref<const Eigen::MatrixXd>& g,
               double lr, long t) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  param.array() += lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

void ascend(GaussianPolicy& policy, const PolicyGrad& grad, const TrainConfig& cfg,
            AdamState* adam) {
  if (!cfg.adam) {
    policy.apply_step(grad, cfg.learning_rate);
    return;
  }
  auto& st = *adam;
  ++st.t;
  for (std::size_t l = 0; l < grad.net.dw.size(); ++l) {
    adam_step(policy.net().weights()[l], st.m.net.dw[l], st.v.net.dw[l], grad.net.dw[l],
              cfg.learning_rate, st.t);
    adam_step(policy.net().biases()[l], st.m.net.db[l], st.v.net.db[l], grad.net.db[l],
              cfg.learning_rate, st.t);
  }
  adam_step(policy.log_std(), st.m.dlog_std, st.v.dlog_std, grad.dlog_std, cfg.learning_rate,
            st.t);
}

Trajectory rollout(Environment& env, const GaussianPolicy& policy, Eigen::VectorXd state,
                   int length, std::mt19937_64& rng) {
  Trajectory traj;
  traj.observations.reserve(length);
  for (int t = 0; t < length; ++t) {
    const PolicySample s = policy.sample(state, rng);
    auto [next, reward] = env.step(state, s.action);
    traj.observations.push_back(std::move(state));
    traj.actions.push_back(s.action);
    traj.actions_u.push_back(s.u);
    traj.rewards.push_back(reward);
    traj.log_probs.push_back(s.log_prob);
    state = std::move(next);
  }
  traj.final_reward = traj.rewards.back();
  return traj;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return mix(base ^ mix(stream ^ mix(index)));
}

void TrainConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("train config: group size must be >= 2");
  if (trajectory_length < 1 || grpo_iterations < 0 || inner_updates < 1 || batch_size < 1 ||
      ppo_rollout < 1 || ppo_epochs < 1 || hidden < 1 || ppo_init_steps < 0)
    throw std::invalid_argument("train config: counts must be positive");
  if (!(clip > 0.0) || !(learning_rate > 0.0) || kl_penalty < 0.0)
    throw std::invalid_argument("train config: clip and learning rate must be positive");
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("group_advantages: need at least two rewards");
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / g;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(var / g);
  std::vector<double> adv(g);
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / std::max(std_dev, 1e-8);
  return adv;
}

double clipped_term(double ratio, double advantage, double c) {
  const double clipped = std::clamp(ratio, 1.0 - c, 1.0 + c);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(double ref_prob, double cur_prob) {
  if (!(ref_prob > 0.0) || !(cur_prob > 0.0))
    throw std::domain_error("kl_estimate: probabilities must be positive");
  const double r = ref_prob / cur_prob;
  return r - std::log(r) - 1.0;
}

namespace {

double grpo_pass(const Group& group, const GaussianPolicy& policy,
                 const GaussianPolicy& old_policy, const GaussianPolicy& ref_policy,
                 const TrainConfig& cfg, PolicyGrad* grad) {
  const std::size_t g_count = group.trajectories.size();
  if (group.advantages.size() != g_count)
    throw std::invalid_argument("grpo objective: advantages do not match trajectories");
  double objective = 0.0;
  for (std::size_t g = 0; g < g_count; ++g) {
    const Trajectory& traj = group.trajectories[g];
    const double adv = group.advantages[g];
    const double scale = 1.0 / (static_cast<double>(g_count) * traj.observations.size());
    for (std::size_t t = 0; t < traj.observations.size(); ++t) {
      const Eigen::VectorXd& s = traj.observations[t];
      const Eigen::VectorXd& u = traj.actions_u[t];
      const double lp_cur = policy.log_prob(s, u);
      const double lp_old =
          &policy == &old_policy ? lp_cur : old_policy.log_prob(s, u);
      const double lp_ref = ref_policy.log_prob(s, u);
      const double ratio = std::exp(lp_cur - lp_old);
      const double lr_ref = lp_ref - lp_cur;
      const double kl = std::exp(lr_ref) - lr_ref - 1.0;
      objective += scale * (clipped_term(ratio, adv, cfg.clip) - cfg.kl_penalty * kl);
      if (grad) {
        const double unclipped = ratio * adv;
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv;
        const double d_surr = unclipped <= clipped ? unclipped : 0.0;
        const double d_kl = 1.0 - std::exp(lr_ref);
        const double coeff = scale * (d_surr - cfg.kl_penalty * d_kl);
        policy.log_prob_with_grad(s, u, coeff, *grad);
      }
    }
  }
  return objective;
}

}  // namespace

double grpo_objective(const Group& group, const GaussianPolicy& policy,
                      const GaussianPolicy& old_policy, const GaussianPolicy& ref_policy,
                      const TrainConfig& cfg) {
  return grpo_pass(group, policy, old_policy, ref_policy, cfg, nullptr);
}

double grpo_objective_and_grad(const Group& group, const GaussianPolicy& policy,
                               const GaussianPolicy& old_policy,
                               const GaussianPolicy& ref_policy, const TrainConfig& cfg,
                               PolicyGrad& grad) {
  return grpo_pass(group, policy, old_policy, ref_policy, cfg, &grad);
}

GaussianPolicy ppo_init(Environment& env, const TrainConfig& cfg, PpoDiagnostics* diagnostics) {
  cfg.validate();
  std::mt19937_64 init_rng(derive_seed(cfg.seed, 0x70706f, 0));
  GaussianPolicy actor(env.state_dim(), cfg.hidden, env.action_lower(), env.action_upper(),
                       cfg.log_std_init, init_rng);
  Mlp critic({env.state_dim(), cfg.hidden, cfg.hidden, 1}, init_rng);

  if (diagnostics) {
    diagnostics->actor_parameters = actor.parameter_count();
    diagnostics->critic_parameters = critic.parameter_count();
    diagnostics->env_steps = 0;
  }
  if (cfg.ppo_init_steps == 0) return actor;

  std::mt19937_64 env_rng(derive_seed(cfg.seed, 0x656e76, 0));
  std::mt19937_64 sample_rng(derive_seed(cfg.seed, 0x616374, 0));
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 0x736866, 0));

  AdamState actor_adam = AdamState::like(actor);
  MlpGrad critic_m = critic.zero_grad(), critic_v = critic.zero_grad();
  long critic_t = 0;

  Eigen::VectorXd state = env.reset(env_rng);
  int episode_t = 0;
  long steps_done = 0;

  const int rollout_len = cfg.ppo_rollout;
  std::vector<Eigen::VectorXd> obs(rollout_len), us(rollout_len);
  std::vector<double> rewards(rollout_len), logps(rollout_len), values(rollout_len);
  std::vector<std::uint8_t> dones(rollout_len);

  while (steps_done < cfg.ppo_init_steps) {
    const int horizon = static_cast<int>(
        std::min<long>(rollout_len, cfg.ppo_init_steps - steps_done));
    double reward_sum = 0.0;
    double reward_max = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < horizon; ++t) {
      const PolicySample s = actor.sample(state, sample_rng);
      auto [next, reward] = env.step(state, s.action);
      obs[t] = state;
      us[t] = s.u;
      rewards[t] = reward;
      logps[t] = s.log_prob;
      values[t] = critic.forward(state)[0];
      ++episode_t;
      const bool done = episode_t >= cfg.trajectory_length;
      dones[t] = done;
      reward_sum += reward;
      reward_max = std::max(reward_max, reward);
      if (done) {
        state = env.reset(env_rng);
        episode_t = 0;
      } else {
        state = std::move(next);
      }
    }
    steps_done += horizon;

    // Generalized advantage estimation over the buffer; terminal steps do not
    // bootstrap.
    std::vector<double> adv(horizon), target(horizon);
    double next_value = dones[horizon - 1] ? 0.0 : critic.forward(state)[0];
    double gae = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      const double mask = dones[t] ? 0.0 : 1.0;
      const double delta = rewards[t] + cfg.discount * next_value * mask - values[t];
      gae = delta + cfg.discount * cfg.gae_lambda * mask * gae;
      adv[t] = gae;
      target[t] = adv[t] + values[t];
      next_value = values[t];
    }
    double adv_mean = 0.0, adv_sq = 0.0;
    for (double a : adv) {
      adv_mean += a;
      adv_sq += a * a;
    }
    adv_mean /= horizon;
    const double adv_std = std::sqrt(std::max(adv_sq / horizon - adv_mean * adv_mean, 0.0));
    for (double& a : adv) a = (a - adv_mean) / std::max(adv_std, 1e-8);

    std::vector<int> order(horizon);
    std::iota(order.begin(), order.end(), 0);
    double last_value_loss = 0.0;
    for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (int begin = 0; begin < horizon; begin += cfg.batch_size) {
        const int end = std::min(horizon, begin + cfg.batch_size);
        const double inv_b = 1.0 / (end - begin);
        PolicyGrad actor_grad = actor.zero_grad();
        MlpGrad critic_grad = critic.zero_grad();
        double value_loss = 0.0;
        for (int bi = begin; bi < end; ++bi) {
          const int i = order[bi];
          const double lp = actor.log_prob(obs[i], us[i]);
          const double ratio = std::exp(lp - logps[i]);
          const double unclipped = ratio * adv[i];
          const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv[i];
          const double coeff = (unclipped <= clipped ? unclipped : 0.0) * inv_b;
          actor.log_prob_with_grad(obs[i], us[i], coeff, actor_grad);

          std::vector<Eigen::VectorXd> acts;
          const double v = critic.forward_cached(obs[i], acts)[0];
          const double err = v - target[i];
          value_loss += err * err * inv_b;
          Eigen::VectorXd dv(1);
          dv[0] = -cfg.value_coeff * 2.0 * err * inv_b;  // ascent on -value loss
          critic.backward(acts, dv, critic_grad);
        }
        actor_grad.dlog_std.array() += cfg.entropy_coeff;
        if (!std::isfinite(value_loss) || !actor_grad.finite() || !critic_grad.finite())
          throw NumericError("ppo_init: non-finite loss or gradient; training diverged");
        ascend(actor, actor_grad, cfg, &actor_adam);
        if (!cfg.adam) {
          critic.apply_step(critic_grad, cfg.learning_rate);
        } else {
          ++critic_t;
          for (std::size_t l = 0; l < critic_grad.dw.size(); ++l) {
            adam_step(critic.weights()[l], critic_m.dw[l], critic_v.dw[l], critic_grad.dw[l],
                      cfg.learning_rate, critic_t);
            adam_step(critic.biases()[l], critic_m.db[l], critic_v.db[l], critic_grad.db[l],
                      cfg.learning_rate, critic_t);
          }
        }
        last_value_loss = value_loss;
      }
    }
    if (diagnostics) {
      diagnostics->value_losses.push_back(last_value_loss);
      diagnostics->mean_step_rewards.push_back(reward_sum / horizon);
      diagnostics->max_step_rewards.push_back(reward_max);
      diagnostics->env_steps = steps_done;
    }
  }
  return actor;
}

GrpoResult grpo_train(Environment& env, const TrainConfig& cfg, const GaussianPolicy& ref_policy,
                      TrainLogger* logger) {
  cfg.validate();
  GrpoResult result;
  result.policy = ref_policy;
  AdamState adam = AdamState::like(result.policy);
  const auto start = std::chrono::steady_clock::now();

  for (int iter = 0; iter < cfg.grpo_iterations; ++iter) {
    const GaussianPolicy old_policy = result.policy;

    std::mt19937_64 start_rng(derive_seed(cfg.seed, 0x737461, iter));
    const Eigen::VectorXd start_state = env.reset(start_rng);

    Group group;
    group.trajectories.reserve(cfg.group_size);
    std::vector<double> rewards(cfg.group_size);
    for (int g = 0; g < cfg.group_size; ++g) {
      std::mt19937_64 rng(derive_seed(cfg.seed, iter, g));
      group.trajectories.push_back(
          rollout(env, old_policy, start_state, cfg.trajectory_length, rng));
      rewards[g] = group.trajectories.back().final_reward;
    }
    result.env_steps += static_cast<long>(cfg.group_size) * cfg.trajectory_length;
    group.advantages = group_advantages(rewards);

    for (int inner = 0; inner < cfg.inner_updates; ++inner) {
      PolicyGrad grad = result.policy.zero_grad();
      grpo_objective_and_grad(group, result.policy, old_policy, ref_policy, cfg, grad);
      if (!grad.finite()) {
        ++result.skipped_updates;
        continue;
      }
      ascend(result.policy, grad, cfg, &adam);
    }

    double kl_sum = 0.0;
    std::size_t kl_count = 0;
    for (const Trajectory& traj : group.trajectories) {
      for (std::size_t t = 0; t < traj.observations.size(); ++t) {
        const double lr_ref = ref_policy.log_prob(traj.observations[t], traj.actions_u[t]) -
                              result.policy.log_prob(traj.observations[t], traj.actions_u[t]);
        kl_sum += std::exp(lr_ref) - lr_ref - 1.0;
        ++kl_count;
      }
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.group_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / cfg.group_size;
    rec.group_max = *std::max_element(rewards.begin(), rewards.end());
    rec.kl_mean = kl_sum / static_cast<double>(kl_count);
    rec.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(rec);
    if (logger) logger->on_iteration(rec);
  }
  return result;
}

}  // namespace fasim::rl
