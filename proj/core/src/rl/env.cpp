#include "fasim/rl/env.hpp"

#include <cmath>
#include <stdexcept>

namespace fasim::rl {

PlacementEnv::PlacementEnv(Layout layout, RadioParams params, std::vector<Point> rxs,
                           double fas_y0, FasConstraints constraints, double anchor_x_lo,
                           double anchor_x_hi, int n_antennas, double infeasible_penalty)
    : layout_(std::move(layout)),
      params_(params),
      rxs_(std::move(rxs)),
      fas_{fas_y0, Point{}},
      constraints_(constraints),
      anchor_x_lo_(anchor_x_lo),
      anchor_x_hi_(anchor_x_hi),
      n_antennas_(n_antennas),
      penalty_(infeasible_penalty) {
  if (rxs_.empty()) throw std::invalid_argument("env: at least one receiver required");
  if (n_antennas_ < static_cast<int>(rxs_.size()))
    throw std::invalid_argument("env: receivers must not outnumber antennas");
  fas_.reference_rx = rxs_[0];
  for (const Point& rx : rxs_)
    if (!layout_.contains(rx)) throw std::invalid_argument("env: receiver outside layout");
  const auto box = layout_.bounding_box();
  if (!(fas_.y0 > box[1] && fas_.y0 < box[3]))
    throw std::invalid_argument("env: antenna line outside the layout's vertical extent");
  if (fas_.reference_rx.y == fas_.y0)
    throw std::invalid_argument("env: reference receiver on the antenna line");
}

int PlacementEnv::state_dim() const {
  return 2 * static_cast<int>(rxs_.size()) + 2 + 2 * static_cast<int>(layout_.wall_count());
}

int PlacementEnv::action_dim() const {
  return n_antennas_ + 2 * static_cast<int>(rxs_.size()) * n_antennas_;
}

Eigen::VectorXd PlacementEnv::action_lower() const {
  Eigen::VectorXd lo(action_dim());
  lo.head(n_antennas_).setConstant(constraints_.theta_l);
  lo.tail(action_dim() - n_antennas_).setConstant(-std::sqrt(constraints_.p_max));
  return lo;
}

Eigen::VectorXd PlacementEnv::action_upper() const {
  Eigen::VectorXd hi(action_dim());
  hi.head(n_antennas_).setConstant(constraints_.theta_r);
  hi.tail(action_dim() - n_antennas_).setConstant(std::sqrt(constraints_.p_max));
  return hi;
}

Eigen::VectorXd PlacementEnv::encode_state(const Point& anchor) const {
  Eigen::VectorXd s(state_dim());
  Eigen::Index at = 0;
  for (const Point& rx : rxs_) {
    s[at++] = rx.x;
    s[at++] = rx.y;
  }
  s[at++] = anchor.x;
  s[at++] = anchor.y;
  for (const Point& c : layout_.corners()) {
    s[at++] = c.x;
    s[at++] = c.y;
  }
  return s;
}

Eigen::VectorXd PlacementEnv::reset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(anchor_x_lo_, anchor_x_hi_);
  return encode_state(Point{x(rng), fas_.y0});
}

DecodedAction PlacementEnv::decode(const Eigen::VectorXd& action) const {
  if (action.size() != action_dim()) throw std::invalid_argument("env: action dimension mismatch");
  DecodedAction d;
  d.thetas.assign(action.data(), action.data() + n_antennas_);
  const int k = static_cast<int>(rxs_.size());
  d.beams.vectors.resize(k);
  for (int u = 0; u < k; ++u) {
    Eigen::VectorXcd w(n_antennas_);
    for (int j = 0; j < n_antennas_; ++j) {
      const Eigen::Index base = n_antennas_ + 2 * (u * n_antennas_ + j);
      w[j] = Complex{action[base], action[base + 1]};
    }
    d.beams.vectors[u] = std::move(w);
  }
  return d;
}

double PlacementEnv::reward_of(const DecodedAction& a) const {
  if (!check_constraints(a.thetas, a.beams, constraints_).ok) return penalty_;
  std::vector<ChannelVector> h(rxs_.size());
  for (std::size_t k = 0; k < rxs_.size(); ++k)
    h[k] = channel_vector(layout_, params_, a.thetas, fas_, rxs_[k]);
  return sum_rate(h, a.beams, params_.noise_power_w);
}

std::pair<Eigen::VectorXd, double> PlacementEnv::step(const Eigen::VectorXd& state,
                                                      const Eigen::VectorXd& action) {
  (void)state;
  const DecodedAction a = decode(action);
  const double reward = reward_of(a);
  const Point anchor = theta_to_position(a.thetas.front(), fas_);
  return {encode_state(anchor), reward};
}

}  // namespace fasim::rl
