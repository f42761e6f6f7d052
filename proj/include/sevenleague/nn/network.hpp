#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace sl {

/// ln(1 + e^x) without overflow for large x.
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Derivative of softplus, the logistic sigmoid.
inline double softplus_grad(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Fully connected regressor: Softplus hidden layers, linear output layer, then an
/// affine map from standardized to physical output units. Inputs are expected
/// already min-max scaled; `input_lo`/`input_hi` record the scaling used.
struct Network {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;  // layer l: layer_sizes[l+1] x layer_sizes[l]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_lo, input_hi;
  Eigen::VectorXd output_mean, output_scale;
  std::string family;
  nlohmann::json metadata = nlohmann::json::object();

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layers() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

/// Network with He-style uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero
/// biases and identity scalers.
Network make_network(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Outputs in standardized units for a batch stored column-wise (d x B).
Eigen::MatrixXd forward_standardized(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Physical output for one scaled input. Throws std::invalid_argument on a size mismatch.
Eigen::VectorXd forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x_scaled);

/// Same shapes as the network parameters.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct LossAndGrad {
  double loss = 0;
  Gradients grads;
};

/// Mean squared error over batch and output components (standardized units) and
/// its gradient by reverse-mode differentiation. Columns of x and y are samples.
LossAndGrad loss_and_grad(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::MatrixXd>& y_standardized);

/// Mean squared error without gradients.
double batch_loss(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::MatrixXd>& y_standardized);

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(const Network& net, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Network& net, const Gradients& grads, double lr);
  long steps() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  Gradients m_, v_;
};

class WeightsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Versioned JSON {version, family, layer_sizes, scalers, weights, biases, metadata}.
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);
void save_weights(const Network& net, const std::filesystem::path& path);
/// Throws WeightsFormatError on parse failures, version or shape mismatches.
Network load_weights(const std::filesystem::path& path);

}  // namespace sl
