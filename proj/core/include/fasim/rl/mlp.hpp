#ifndef FASIM_RL_MLP_HPP
#define FASIM_RL_MLP_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fasim::rl {

/// Gradient buffer matching an Mlp's parameters.
struct MlpGrad {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;

  void set_zero();
  void add_scaled(const MlpGrad& other, double scale);
  double squared_norm() const;
  bool finite() const;
};

/// Fully connected network with ReLU on every layer but the last. Forward
/// activations can be cached for a matching backward pass.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> dims, std::mt19937_64& rng);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t parameter_count() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  /// Forward pass that stores pre-activation inputs of every layer in `acts`
  /// (acts[0] = x, acts[l] = output of layer l after ReLU).
  Eigen::VectorXd forward_cached(const Eigen::VectorXd& x,
                                 std::vector<Eigen::VectorXd>& acts) const;
  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const std::vector<Eigen::VectorXd>& acts, const Eigen::VectorXd& dout,
                MlpGrad& grad) const;

  MlpGrad zero_grad() const;
  void apply_step(const MlpGrad& grad, double step_scale);

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);

  const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }
  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> w_;
  std::vector<Eigen::VectorXd> b_;
};

}  // namespace fasim::rl

#endif
