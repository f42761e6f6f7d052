#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sevenleague/dataset/dataset.hpp"
#include "sevenleague/nn/network.hpp"

namespace sl {

/// per_output: every target component gets its own standard deviation.
/// shared: components keep their own mean but share one RMS spread, so the loss
/// weighs absolute errors equally across components.
enum class OutputScaling { per_output, shared };

std::string to_string(OutputScaling scaling);
OutputScaling output_scaling_from_string(const std::string& name);

struct TrainConfig {
  int epochs = 2500;
  int batch_size = 16;
  double lr0 = 1e-3;
  int lr_halving_period = 500;
  std::uint64_t seed = 7;
  OutputScaling output_scaling = OutputScaling::per_output;
};

void validate(const TrainConfig& cfg);

/// lr0 * 2^-floor(epoch / lr_halving_period), epochs counted from 0.
double learning_rate(const TrainConfig& cfg, int epoch);

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double val_loss = 0;
};

struct TrainResult {
  Network net;  // parameters of the epoch with the lowest validation loss
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val_loss = 0;
};

/// Raised when a loss turns non-finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns are records: inputs d x n, targets in physical units o x n.
struct Matrices {
  Eigen::MatrixXd x, y;
};
Matrices to_matrices(const std::vector<TrainingRecord>& records);

/// Sets the output scaler to the per-component mean of `y` (columns are samples)
/// and the spread chosen by `scaling`. A zero spread is replaced by 1.
void fit_output_scaler(Network& net, const Eigen::Ref<const Eigen::MatrixXd>& y,
                       OutputScaling scaling = OutputScaling::per_output);

/// Targets mapped to the standardized units the network is trained in.
Eigen::MatrixXd standardize(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& y);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on the training part, validation loss after every epoch.
/// The output scaler of `net` is used as is; call fit_output_scaler first.
/// An empty validation set falls back to the training loss for checkpointing.
TrainResult train(Network net, const std::vector<TrainingRecord>& train_set,
                  const std::vector<TrainingRecord>& validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Mean squared error of `net` on `records` in standardized units.
double evaluate_mse(const Network& net, const std::vector<TrainingRecord>& records);

/// Coefficient of determination over all output components, physical units.
double r_squared(const Network& net, const std::vector<TrainingRecord>& records);

/// CSV with columns epoch, lr, train_loss, val_loss.
void save_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace sl
