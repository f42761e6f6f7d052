#include "sevenleague/nn/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "sevenleague/core/random.hpp"

namespace sl {

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.lr_halving_period < 1 || !(cfg.lr0 > 0)) {
    throw std::invalid_argument("train config: epochs, batch_size, lr0 and lr_halving_period must be positive");
  }
}

double learning_rate(const TrainConfig& cfg, int epoch) {
  return std::ldexp(cfg.lr0, -(epoch / cfg.lr_halving_period));
}

Matrices to_matrices(const std::vector<TrainingRecord>& records) {
  Matrices m;
  if (records.empty()) return m;
  const auto n = static_cast<Eigen::Index>(records.size());
  m.x.resize(records.front().theta_scaled.size(), n);
  m.y.resize(records.front().c_flat.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& rec = records[static_cast<std::size_t>(j)];
    if (rec.theta_scaled.size() != m.x.rows() || rec.c_flat.size() != m.y.rows()) {
      throw std::invalid_argument("to_matrices: records have inconsistent sizes");
    }
    m.x.col(j) = rec.theta_scaled;
    m.y.col(j) = rec.c_flat;
  }
  return m;
}

std::string to_string(OutputScaling scaling) { return scaling == OutputScaling::shared ? "shared" : "per_output"; }

OutputScaling output_scaling_from_string(const std::string& name) {
  if (name == "shared") return OutputScaling::shared;
  if (name == "per_output") return OutputScaling::per_output;
  throw std::invalid_argument("unknown output scaling '" + name + "'");
}

void fit_output_scaler(Network& net, const Eigen::Ref<const Eigen::MatrixXd>& y, OutputScaling scaling) {
  if (y.rows() != net.output_dim() || y.cols() == 0) throw std::invalid_argument("fit_output_scaler: bad target shape");
  net.output_mean = y.rowwise().mean();
  const Eigen::MatrixXd centred = y.colwise() - net.output_mean;
  net.output_scale = (centred.rowwise().squaredNorm() / static_cast<double>(y.cols())).cwiseSqrt();
  if (scaling == OutputScaling::shared) {
    net.output_scale.setConstant(std::sqrt(centred.squaredNorm() / static_cast<double>(centred.size())));
  }
  for (Eigen::Index i = 0; i < net.output_scale.size(); ++i) {
    if (!(net.output_scale[i] > 0)) net.output_scale[i] = 1.0;
  }
}

Eigen::MatrixXd standardize(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  return (y.colwise() - net.output_mean).array().colwise() / net.output_scale.array();
}

TrainResult train(Network net, const std::vector<TrainingRecord>& train_set,
                  const std::vector<TrainingRecord>& validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  validate(cfg);
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  const Matrices tr = to_matrices(train_set);
  const Matrices va = to_matrices(validation_set);
  if (tr.x.rows() != net.input_dim() || tr.y.rows() != net.output_dim()) {
    throw std::invalid_argument("train: record sizes do not match the network");
  }
  const Eigen::MatrixXd ytr = standardize(net, tr.y);
  const Eigen::MatrixXd yva = va.y.size() ? standardize(net, va.y) : Eigen::MatrixXd();

  const auto n = static_cast<std::size_t>(tr.x.cols());
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::MatrixXd bx(tr.x.rows(), static_cast<Eigen::Index>(bs));
  Eigen::MatrixXd by(ytr.rows(), static_cast<Eigen::Index>(bs));

  Adam adam(net);
  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));
  Rng rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate(cfg, epoch);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    double sum = 0;
    for (std::size_t start = 0; start < n; start += bs) {
      const auto len = static_cast<Eigen::Index>(std::min(bs, n - start));
      for (Eigen::Index j = 0; j < len; ++j) {
        const Eigen::Index src = order[start + static_cast<std::size_t>(j)];
        bx.col(j) = tr.x.col(src);
        by.col(j) = ytr.col(src);
      }
      const LossAndGrad lg = loss_and_grad(net, bx.leftCols(len), by.leftCols(len));
      if (!std::isfinite(lg.loss)) {
        throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                            std::to_string(start) + "; lower lr0 or check the dataset");
      }
      sum += lg.loss * static_cast<double>(len);
      adam.step(net, lg.grads, lr);
    }
    EpochRecord rec{epoch, lr, sum / static_cast<double>(n), 0.0};
    rec.val_loss = yva.size() ? batch_loss(net, va.x, yva) : rec.train_loss;
    if (!std::isfinite(rec.val_loss)) {
      throw TrainingError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    }
    if (result.best_epoch < 0 || rec.val_loss < result.best_val_loss) {
      result.best_epoch = epoch;
      result.best_val_loss = rec.val_loss;
      result.net = net;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

double evaluate_mse(const Network& net, const std::vector<TrainingRecord>& records) {
  if (records.empty()) return 0.0;
  const Matrices m = to_matrices(records);
  return batch_loss(net, m.x, standardize(net, m.y));
}

double r_squared(const Network& net, const std::vector<TrainingRecord>& records) {
  if (records.empty()) return 0.0;
  const Matrices m = to_matrices(records);
  const Eigen::MatrixXd pred =
      (forward_standardized(net, m.x).array().colwise() * net.output_scale.array()).colwise() +
      net.output_mean.array();
  const double ss_res = (pred - m.y).squaredNorm();
  const double ss_tot = (m.y.array() - m.y.mean()).matrix().squaredNorm();
  return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

void save_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_history: cannot open " + path.string());
  out.precision(17);
  out << "epoch,lr,train_loss,val_loss\n";
  for (const auto& r : history) out << r.epoch << ',' << r.lr << ',' << r.train_loss << ',' << r.val_loss << '\n';
}

}  // namespace sl
