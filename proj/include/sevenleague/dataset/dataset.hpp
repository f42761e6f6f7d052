#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sevenleague/compression/compression.hpp"
#include "sevenleague/dataset/param_space.hpp"

namespace sl {

/// One (theta, C) pair: theta min-max scaled to [0,1]^d, C flattened row-major (i, h, k).
struct TrainingRecord {
  Eigen::VectorXd theta_scaled;
  Eigen::VectorXd c_flat;
};

struct TrainingSet {
  ParamSpace space;
  GridConfig grid;
  std::vector<TrainingRecord> records;
  std::size_t failed = 0;
  std::vector<std::string> failures;

  std::size_t size() const { return records.size(); }
};

/// Raised by load_dataset when the file does not have the expected columns.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by load_dataset on unreadable content.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter tuples of the training set: the joint LHS design (row-major) crossed
/// with the equally spaced dt values in ascending order.
Eigen::MatrixXd training_inputs(const ParamSpace& space, std::uint64_t seed);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Compresses every training input. The dt values of one parameter tuple share a
/// path set (see compress_horizons); tuple t uses sub-stream t + 1 of `seed`.
/// A failed compression drops that record and logs its reason.
TrainingSet generate_dataset(const ParamSpace& space, const GridConfig& grid, std::uint64_t seed,
                             unsigned threads = 1, const ProgressCallback& progress = {});

struct DatasetSplit {
  std::vector<TrainingRecord> train;
  std::vector<TrainingRecord> validation;
  std::vector<TrainingRecord> test;
};

/// Shuffled 70/20/10 partition (floor, floor, remainder). Needs at least 10 records.
DatasetSplit split_dataset(const std::vector<TrainingRecord>& records, std::uint64_t seed);

/// CSV: header of x_<param> columns then c_<i>_<h>_<k> columns, 17 significant digits.
void save_dataset(const TrainingSet& set, const std::filesystem::path& path);

/// Reads a dataset CSV. When `expected` is given its parameter names and grid
/// dimensions must match the header, otherwise SchemaError is thrown.
std::vector<TrainingRecord> load_dataset(const std::filesystem::path& path, const TrainingSet* expected = nullptr);

/// Column names of a dataset with this space and grid.
std::vector<std::string> dataset_header(const ParamSpace& space, const GridConfig& grid);

}  // namespace sl
