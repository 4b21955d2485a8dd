#include "fasim/rl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace fasim::rl {

void MlpGrad::set_zero() {
  for (auto& m : dw) m.setZero();
  for (auto& v : db) v.setZero();
}

void MlpGrad::add_scaled(const MlpGrad& other, double scale) {
  for (std::size_t l = 0; l < dw.size(); ++l) {
    dw[l] += scale * other.dw[l];
    db[l] += scale * other.db[l];
  }
}

double MlpGrad::squared_norm() const {
  double s = 0.0;
  for (const auto& m : dw) s += m.squaredNorm();
  for (const auto& v : db) s += v.squaredNorm();
  return s;
}

bool MlpGrad::finite() const {
  for (const auto& m : dw)
    if (!m.allFinite()) return false;
  for (const auto& v : db)
    if (!v.allFinite()) return false;
  return true;
}

Mlp::Mlp(std::vector<int> dims, std::mt19937_64& rng) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("mlp: need at least input and output dims");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = bound * unit(rng);
    w_.push_back(std::move(w));
    b_.push_back(Eigen::VectorXd::Zero(out));
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l)
    n += static_cast<std::size_t>(w_[l].size()) + static_cast<std::size_t>(b_[l].size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    h = w_[l] * h + b_[l];
    if (l + 1 < w_.size()) h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::VectorXd Mlp::forward_cached(const Eigen::VectorXd& x,
                                    std::vector<Eigen::VectorXd>& acts) const {
  acts.clear();
  acts.push_back(x);
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    h = w_[l] * h + b_[l];
    if (l + 1 < w_.size()) {
      h = h.cwiseMax(0.0);
      acts.push_back(h);
    }
  }
  return h;
}

void Mlp::backward(const std::vector<Eigen::VectorXd>& acts, const Eigen::VectorXd& dout,
                   MlpGrad& grad) const {
  Eigen::VectorXd delta = dout;
  for (std::size_t l = w_.size(); l-- > 0;) {
    grad.dw[l].noalias() += delta * acts[l].transpose();
    grad.db[l] += delta;
    if (l == 0) break;
    // ReLU derivative: the cached activation is already rectified.
    delta = (w_[l].transpose() * delta).cwiseProduct(
        acts[l].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  }
}

MlpGrad Mlp::zero_grad() const {
  MlpGrad g;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    g.dw.push_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
    g.db.push_back(Eigen::VectorXd::Zero(b_[l].size()));
  }
  return g;
}

void Mlp::apply_step(const MlpGrad& grad, double step_scale) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    w_[l] += step_scale * grad.dw[l];
    b_[l] += step_scale * grad.db[l];
  }
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    flat.segment(at, w_[l].size()) = Eigen::Map<const Eigen::VectorXd>(w_[l].data(), w_[l].size());
    at += w_[l].size();
    flat.segment(at, b_[l].size()) = b_[l];
    at += b_[l].size();
  }
  return flat;
}

void Mlp::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    throw std::invalid_argument("mlp: parameter vector size mismatch");
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(w_[l].data(), w_[l].size()) = flat.segment(at, w_[l].size());
    at += w_[l].size();
    b_[l] = flat.segment(at, b_[l].size());
    at += b_[l].size();
  }
}

}  // namespace fasim::rl
