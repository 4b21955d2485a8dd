#include "fasim/rl/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fasim::rl {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

// log(1 - tanh(u)^2) without catastrophic cancellation at large |u|.
double log_one_minus_tanh_sq(double u) {
  const double a = std::abs(u);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

}  // namespace

void PolicyGrad::set_zero() {
  net.set_zero();
  dlog_std.setZero();
}

bool PolicyGrad::finite() const { return net.finite() && dlog_std.allFinite(); }

GaussianPolicy::GaussianPolicy(int state_dim, int hidden, Eigen::VectorXd lower,
                               Eigen::VectorXd upper, double log_std_init, std::mt19937_64& rng)
    : lo_(std::move(lower)), hi_(std::move(upper)) {
  if (lo_.size() != hi_.size() || lo_.size() == 0)
    throw std::invalid_argument("policy: bound vectors must match and be non-empty");
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    if (!(lo_[i] < hi_[i])) throw std::invalid_argument("policy: lower bound must be below upper");
  const int out = static_cast<int>(lo_.size());
  net_ = Mlp({state_dim, hidden, hidden, out}, rng);
  // Small output head so initial pre-squash means sit near zero; otherwise
  // tanh saturates and every draw starts pinned to the box edges.
  net_.weights().back() *= 0.01;
  log_std_ = Eigen::VectorXd::Constant(out, log_std_init);
}

Eigen::VectorXd GaussianPolicy::squash(const Eigen::VectorXd& u) const {
  Eigen::VectorXd a(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    a[i] = lo_[i] + 0.5 * (std::tanh(u[i]) + 1.0) * (hi_[i] - lo_[i]);
  return a;
}

PolicySample GaussianPolicy::sample(const Eigen::VectorXd& state, std::mt19937_64& rng) const {
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::VectorXd mu = net_.forward(state);
  PolicySample s;
  s.u.resize(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    s.u[i] = mu[i] + std::exp(log_std_[i]) * unit(rng);
  s.action = squash(s.u);
  s.log_prob = log_prob(state, s.u);
  return s;
}

Eigen::VectorXd GaussianPolicy::mean_action(const Eigen::VectorXd& state) const {
  return squash(net_.forward(state));
}

double GaussianPolicy::log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& u) const {
  const Eigen::VectorXd mu = net_.forward(state);
  double lp = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double sigma = std::exp(log_std_[i]);
    const double z = (u[i] - mu[i]) / sigma;
    lp += -0.5 * z * z - log_std_[i] - kLogSqrt2Pi;
    lp -= log_one_minus_tanh_sq(u[i]) + std::log(0.5 * (hi_[i] - lo_[i]));
  }
  return lp;
}

double GaussianPolicy::log_prob_with_grad(const Eigen::VectorXd& state, const Eigen::VectorXd& u,
                                          double coeff, PolicyGrad& grad) const {
  std::vector<Eigen::VectorXd> acts;
  const Eigen::VectorXd mu = net_.forward_cached(state, acts);
  double lp = 0.0;
  Eigen::VectorXd dmu(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double sigma = std::exp(log_std_[i]);
    const double z = (u[i] - mu[i]) / sigma;
    lp += -0.5 * z * z - log_std_[i] - kLogSqrt2Pi;
    lp -= log_one_minus_tanh_sq(u[i]) + std::log(0.5 * (hi_[i] - lo_[i]));
    dmu[i] = coeff * z / sigma;
    grad.dlog_std[i] += coeff * (z * z - 1.0);
  }
  net_.backward(acts, dmu, grad.net);
  return lp;
}

double GaussianPolicy::entropy() const {
  double h = 0.0;
  for (Eigen::Index i = 0; i < log_std_.size(); ++i)
    h += 0.5 + kLogSqrt2Pi + log_std_[i];
  return h;
}

PolicyGrad GaussianPolicy::zero_grad() const {
  PolicyGrad g;
  g.net = net_.zero_grad();
  g.dlog_std = Eigen::VectorXd::Zero(log_std_.size());
  return g;
}

void GaussianPolicy::apply_step(const PolicyGrad& grad, double step_scale) {
  net_.apply_step(grad.net, step_scale);
  log_std_ += step_scale * grad.dlog_std;
}

}  // namespace fasim::rl
