#include "sevenleague/nn/network.hpp"

#include <fstream>

#include "sevenleague/core/random.hpp"

namespace sl {

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

Network make_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("make_network: need at least input and output layers");
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("make_network: layer sizes must be positive");
  }
  Network net;
  net.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const double limit = std::sqrt(6.0 / fan_in);
    Eigen::MatrixXd w(layer_sizes[l + 1], fan_in);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = limit * (2.0 * rng.uniform() - 1.0);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
  }
  net.input_lo = Eigen::VectorXd::Zero(layer_sizes.front());
  net.input_hi = Eigen::VectorXd::Ones(layer_sizes.front());
  net.output_mean = Eigen::VectorXd::Zero(layer_sizes.back());
  net.output_scale = Eigen::VectorXd::Ones(layer_sizes.back());
  return net;
}

Eigen::MatrixXd forward_standardized(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.rows() != net.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  Eigen::MatrixXd act = x;
  for (int l = 0; l < net.layers(); ++l) {
    Eigen::MatrixXd z = (net.weights[l] * act).colwise() + net.biases[l];
    if (l + 1 < net.layers()) z = z.unaryExpr([](double v) { return softplus(v); });
    act = std::move(z);
  }
  return act;
}

Eigen::VectorXd forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x_scaled) {
  const Eigen::VectorXd raw = forward_standardized(net, x_scaled);
  return net.output_mean + net.output_scale.cwiseProduct(raw);
}

LossAndGrad loss_and_grad(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::MatrixXd>& y) {
  const int layers = net.layers();
  if (x.cols() == 0 || x.cols() != y.cols()) throw std::invalid_argument("loss_and_grad: empty or mismatched batch");
  if (y.rows() != net.output_dim()) throw std::invalid_argument("loss_and_grad: target dimension mismatch");

  // Forward pass keeping pre-activations and activations.
  std::vector<Eigen::MatrixXd> pre(static_cast<std::size_t>(layers));
  std::vector<Eigen::MatrixXd> act(static_cast<std::size_t>(layers + 1));
  act[0] = x;
  for (int l = 0; l < layers; ++l) {
    pre[l] = (net.weights[l] * act[l]).colwise() + net.biases[l];
    act[l + 1] = l + 1 < layers ? pre[l].unaryExpr([](double v) { return softplus(v); }) : pre[l];
  }

  const double count = static_cast<double>(y.size());
  const Eigen::MatrixXd residual = act[layers] - y;
  LossAndGrad out;
  out.loss = residual.squaredNorm() / count;
  out.grads.weights.resize(static_cast<std::size_t>(layers));
  out.grads.biases.resize(static_cast<std::size_t>(layers));

  Eigen::MatrixXd delta = (2.0 / count) * residual;
  for (int l = layers - 1; l >= 0; --l) {
    out.grads.weights[l] = delta * act[l].transpose();
    out.grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (net.weights[l].transpose() * delta).cwiseProduct(pre[l - 1].unaryExpr([](double v) { return softplus_grad(v); }));
    }
  }
  return out;
}

double batch_loss(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (x.cols() == 0) return 0.0;
  return (forward_standardized(net, x) - y).squaredNorm() / static_cast<double>(y.size());
}

Adam::Adam(const Network& net, double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (int l = 0; l < net.layers(); ++l) {
    m_.weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    m_.biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  v_ = m_;
}

void Adam::step(Network& net, const Gradients& grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (int l = 0; l < net.layers(); ++l) {
    update(net.weights[l], m_.weights[l], v_.weights[l], grads.weights[l]);
    update(net.biases[l], m_.biases[l], v_.biases[l], grads.biases[l]);
  }
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["family"] = net.family;
  doc["layer_sizes"] = net.layer_sizes;
  doc["scalers"] = {{"input", {{"lo", vec_json(net.input_lo)}, {"hi", vec_json(net.input_hi)}}},
                    {"output", {{"mean", vec_json(net.output_mean)}, {"scale", vec_json(net.output_scale)}}}};
  doc["weights"] = nlohmann::json::array();
  doc["biases"] = nlohmann::json::array();
  for (int l = 0; l < net.layers(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < net.weights[l].rows(); ++i) {
      rows.push_back(vec_json(net.weights[l].row(i).transpose()));
    }
    doc["weights"].push_back(rows);
    doc["biases"].push_back(vec_json(net.biases[l]));
  }
  doc["metadata"] = net.metadata;
  return doc;
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) throw WeightsFormatError("weights: unsupported version");
    Network net;
    net.family = doc.at("family").get<std::string>();
    net.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    const auto& w = doc.at("weights");
    const auto& b = doc.at("biases");
    if (net.layer_sizes.size() < 2 || w.size() + 1 != net.layer_sizes.size() || b.size() != w.size()) {
      throw WeightsFormatError("weights: layer count mismatch");
    }
    for (std::size_t l = 0; l < w.size(); ++l) {
      const int rows = net.layer_sizes[l + 1];
      const int cols = net.layer_sizes[l];
      if (static_cast<int>(w[l].size()) != rows) throw WeightsFormatError("weights: shape mismatch");
      Eigen::MatrixXd m(rows, cols);
      for (int i = 0; i < rows; ++i) {
        const auto row = w[l][static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != cols) throw WeightsFormatError("weights: shape mismatch");
        for (int j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
      }
      net.weights.push_back(std::move(m));
      net.biases.push_back(json_vec(b[l]));
      if (net.biases.back().size() != rows) throw WeightsFormatError("weights: bias shape mismatch");
    }
    const auto& scalers = doc.at("scalers");
    net.input_lo = json_vec(scalers.at("input").at("lo"));
    net.input_hi = json_vec(scalers.at("input").at("hi"));
    net.output_mean = json_vec(scalers.at("output").at("mean"));
    net.output_scale = json_vec(scalers.at("output").at("scale"));
    if (net.input_lo.size() != net.input_dim() || net.input_hi.size() != net.input_dim() ||
        net.output_mean.size() != net.output_dim() || net.output_scale.size() != net.output_dim()) {
      throw WeightsFormatError("weights: scaler shape mismatch");
    }
    net.metadata = doc.value("metadata", nlohmann::json::object());
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw WeightsFormatError(std::string("weights: ") + e.what());
  }
}

void save_weights(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path.string());
  out << network_to_json(net).dump(1) << '\n';
}

Network load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw WeightsFormatError(std::string("weights: parse error: ") + e.what());
  }
  return network_from_json(doc);
}

}  // namespace sl
