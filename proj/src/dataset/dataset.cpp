#include "sevenleague/dataset/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

#include "sevenleague/core/lhs.hpp"
#include "sevenleague/core/parallel.hpp"
#include "sevenleague/core/random.hpp"

namespace sl {

Eigen::MatrixXd training_inputs(const ParamSpace& space, std::uint64_t seed) {
  validate(space);
  std::vector<Interval> lhs_ranges;
  std::vector<int> lhs_axes;
  int n_lhs = 1;
  for (int j = 0; j < space.dim(); ++j) {
    const auto& axis = space.axes[static_cast<std::size_t>(j)];
    if (axis.method == SamplingMethod::lhs) {
      lhs_ranges.push_back({axis.lo, axis.hi});
      lhs_axes.push_back(j);
      n_lhs = axis.count;
    }
  }
  const int dt_axis = space.index_of("dt");
  const auto& dt = space.axes[static_cast<std::size_t>(dt_axis)];
  const Eigen::VectorXd dt_values =
      dt.count == 1 ? Eigen::VectorXd(Eigen::VectorXd::Constant(1, dt.lo))
                    : Eigen::VectorXd(Eigen::VectorXd::LinSpaced(dt.count, dt.lo, dt.hi));
  const Eigen::MatrixXd design =
      lhs_ranges.empty() ? Eigen::MatrixXd(1, 0) : latin_hypercube(n_lhs, lhs_ranges, derive_seed(seed, 0));

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(n_lhs) * dt.count, space.dim());
  Eigen::Index row = 0;
  for (int r = 0; r < n_lhs; ++r) {
    for (int t = 0; t < dt.count; ++t, ++row) {
      for (std::size_t q = 0; q < lhs_axes.size(); ++q) inputs(row, lhs_axes[q]) = design(r, static_cast<Eigen::Index>(q));
      inputs(row, dt_axis) = dt_values[t];
    }
  }
  return inputs;
}

TrainingSet generate_dataset(const ParamSpace& space, const GridConfig& grid, std::uint64_t seed, unsigned threads,
                             const ProgressCallback& progress) {
  validate(grid);
  const Eigen::MatrixXd inputs = training_inputs(space, seed);
  const auto n = static_cast<std::size_t>(inputs.rows());
  const int dt_axis = space.index_of("dt");
  const auto n_dt = static_cast<std::size_t>(space.axes[static_cast<std::size_t>(dt_axis)].count);
  const std::size_t n_tuples = n / n_dt;
  std::vector<double> horizons(n_dt);
  for (std::size_t t = 0; t < n_dt; ++t) horizons[t] = inputs(static_cast<Eigen::Index>(t), dt_axis);

  std::vector<std::optional<TrainingRecord>> slots(n);
  std::vector<std::string> reasons(n);
  std::mutex progress_mutex;
  std::size_t done = 0;

  // Rows of one parameter tuple differ only in dt, so each tuple shares one path
  // set observed at every horizon.
  parallel_for(n_tuples, threads, [&](std::size_t tuple) {
    const std::size_t first = tuple * n_dt;
    auto describe = [&](std::size_t r) {
      std::ostringstream msg;
      msg << "record " << r << " theta=(" << inputs.row(static_cast<Eigen::Index>(r)) << "): ";
      return msg.str();
    };
    try {
      const ModelSpec model = model_from_theta(space, inputs.row(static_cast<Eigen::Index>(first)).transpose());
      const CompressionBatch batch = compress_horizons(model, grid, horizons, derive_seed(seed, tuple + 1));
      for (std::size_t t = 0; t < n_dt; ++t) {
        const std::size_t r = first + t;
        if (!batch.errors[t].empty()) {
          reasons[r] = describe(r) + batch.errors[t];
          continue;
        }
        const auto& c = batch.grids[t].c;
        slots[r] = TrainingRecord{scale_theta(space, inputs.row(static_cast<Eigen::Index>(r)).transpose()),
                                  Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()))};
      }
    } catch (const std::exception& e) {
      for (std::size_t t = 0; t < n_dt; ++t) reasons[first + t] = describe(first + t) + e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      done += n_dt;
      progress(done, n);
    }
  });

  TrainingSet set;
  set.space = space;
  set.grid = grid;
  for (std::size_t r = 0; r < n; ++r) {
    if (slots[r]) {
      set.records.push_back(std::move(*slots[r]));
    } else {
      ++set.failed;
      set.failures.push_back(reasons[r]);
    }
  }
  return set;
}

DatasetSplit split_dataset(const std::vector<TrainingRecord>& records, std::uint64_t seed) {
  const std::size_t n = records.size();
  if (n < 10) throw std::invalid_argument("split_dataset: need at least 10 records");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  const std::size_t n_train = n * 7 / 10;
  const std::size_t n_val = n * 2 / 10;
  DatasetSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    auto& part = i < n_train ? split.train : (i < n_train + n_val ? split.validation : split.test);
    part.push_back(records[order[i]]);
  }
  return split;
}

std::vector<std::string> dataset_header(const ParamSpace& space, const GridConfig& grid) {
  std::vector<std::string> header;
  for (const auto& axis : space.axes) header.push_back("x_" + axis.name);
  for (int i = 0; i < grid.m_a; ++i) {
    for (int h = 0; h < grid.m_b; ++h) {
      for (int k = 0; k < grid.m; ++k) {
        header.push_back("c_" + std::to_string(i) + "_" + std::to_string(h) + "_" + std::to_string(k));
      }
    }
  }
  return header;
}

namespace {

void write_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, res.ptr - buf);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void save_dataset(const TrainingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path.string());
  const auto header = dataset_header(set.space, set.grid);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& rec : set.records) {
    bool first = true;
    for (const Eigen::VectorXd* vec : {&rec.theta_scaled, &rec.c_flat}) {
      for (Eigen::Index j = 0; j < vec->size(); ++j) {
        if (!first) out << ',';
        write_double(out, (*vec)[j]);
        first = false;
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path.string());
}

std::vector<TrainingRecord> load_dataset(const std::filesystem::path& path, const TrainingSet* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ParseError("load_dataset: empty file " + path.string());
  const auto header = split_csv_line(line);

  std::size_t d = 0;
  while (d < header.size() && header[d].rfind("x_", 0) == 0) ++d;
  const std::size_t n_c = header.size() - d;
  if (d == 0 || n_c == 0) throw SchemaError("load_dataset: header needs x_ columns followed by c_ columns");
  for (std::size_t j = d; j < header.size(); ++j) {
    if (header[j].rfind("c_", 0) != 0) throw SchemaError("load_dataset: unexpected column '" + header[j] + "'");
  }
  if (expected && header != dataset_header(expected->space, expected->grid)) {
    throw SchemaError("load_dataset: header does not match the expected parameter space and grid");
  }

  std::vector<TrainingRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("load_dataset: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    TrainingRecord rec{Eigen::VectorXd(static_cast<Eigen::Index>(d)), Eigen::VectorXd(static_cast<Eigen::Index>(n_c))};
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0;
      const auto& f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError("load_dataset: bad number '" + f + "' on line " + std::to_string(line_no));
      }
      if (j < d) {
        rec.theta_scaled[static_cast<Eigen::Index>(j)] = v;
      } else {
        rec.c_flat[static_cast<Eigen::Index>(j - d)] = v;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace sl
