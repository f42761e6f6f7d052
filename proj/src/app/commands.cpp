#include "sevenleague/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sevenleague/app/experiments.hpp"
#include "sevenleague/core/normal.hpp"
#include "sevenleague/core/random.hpp"
#include "sevenleague/dataset/dataset.hpp"
#include "sevenleague/nn/trainer.hpp"
#include "sevenleague/sampler/bridge_sampler.hpp"

namespace sl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { open_output(path) << doc.dump(2) << '\n'; }

BridgeSampler load_sampler(const std::filesystem::path& weights) { return make_sampler(load_weights(weights)); }

}  // namespace

std::map<std::string, double> parse_assignments(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected name=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad number in '" + item + "'");
    }
  }
  return out;
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      out << std::left << std::setw(static_cast<int>(width[j])) << cells[j] << (j + 1 < cells.size() ? "  " : "");
    }
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
  for (const auto& row : rows) line(row);
}

CommandOutcome cmd_gen_dataset(const RunConfig& cfg, std::ostream& out) {
  write_resolved_config(cfg, "gen-dataset");
  const auto start = Clock::now();
  std::size_t last_pct = 0;
  const TrainingSet set = generate_dataset(cfg.space, cfg.grid, cfg.seed, cfg.threads, [&](std::size_t done, std::size_t total) {
    const std::size_t pct = 100 * done / total;
    if (pct >= last_pct + 10 || done == total) {
      out << "  progress " << done << "/" << total << '\n' << std::flush;
      last_pct = pct;
    }
  });
  const double wall = elapsed_ms(start);
  const auto path = cfg.out_dir / "dataset.csv";
  save_dataset(set, path);

  CommandOutcome outcome;
  outcome.report = {{"dataset", path.string()},
                    {"space", to_json(cfg.space)},
                    {"grid", to_json(cfg.grid)},
                    {"seed", cfg.seed},
                    {"records", set.size()},
                    {"failed", set.failed},
                    {"failures", set.failures},
                    {"wall_ms", wall}};
  write_json(cfg.out_dir / "dataset.manifest.json", outcome.report);
  print_table(out, {"family", "records", "failed", "wall_s", "file"},
              {{to_string(cfg.space.family), std::to_string(set.size()), std::to_string(set.failed), fmt(wall / 1000),
                path.string()}});
  return outcome;
}

CommandOutcome cmd_train(const RunConfig& cfg, const std::filesystem::path& dataset, std::ostream& out) {
  write_resolved_config(cfg, "train");
  TrainingSet expected;
  expected.space = cfg.space;
  expected.grid = cfg.grid;
  const auto records = load_dataset(dataset, &expected);
  const DatasetSplit split = split_dataset(records, cfg.seed);

  Network net = make_regressor(cfg.space, cfg.grid, derive_seed(cfg.train.seed, 1), cfg.hidden);
  fit_output_scaler(net, to_matrices(split.train).y, cfg.train.output_scaling);
  const auto start = Clock::now();
  TrainResult result = train(std::move(net), split.train, split.validation, cfg.train, [&](const EpochRecord& r) {
    if ((r.epoch + 1) % 250 == 0) {
      out << "  epoch " << r.epoch + 1 << " lr " << fmt(r.lr) << " train " << fmt(r.train_loss) << " val "
          << fmt(r.val_loss) << '\n'
          << std::flush;
    }
  });
  const double wall = elapsed_ms(start);

  const auto weights_path = cfg.out_dir / "weights.json";
  save_weights(result.net, weights_path);
  save_history(result.history, cfg.out_dir / "history.csv");
  CommandOutcome outcome;
  outcome.report = {{"weights", weights_path.string()},
                    {"records", records.size()},
                    {"train_mse", evaluate_mse(result.net, split.train)},
                    {"val_mse", evaluate_mse(result.net, split.validation)},
                    {"test_mse", evaluate_mse(result.net, split.test)},
                    {"test_r2", r_squared(result.net, split.test)},
                    {"best_epoch", result.best_epoch},
                    {"wall_ms", wall}};
  write_json(cfg.out_dir / "train_report.json", outcome.report);
  print_table(out, {"train_mse", "val_mse", "test_mse", "test_r2", "best_epoch", "wall_s"},
              {{fmt(outcome.report["train_mse"]), fmt(outcome.report["val_mse"]), fmt(outcome.report["test_mse"]),
                fmt(outcome.report["test_r2"], 6), std::to_string(result.best_epoch), fmt(wall / 1000)}});
  return outcome;
}

CommandOutcome cmd_sample(const RunConfig& cfg, const std::filesystem::path& weights,
                          const std::filesystem::path& pairs_csv, std::ostream& out) {
  write_resolved_config(cfg, "sample");
  const BridgeSampler sampler = load_sampler(weights);
  if (sampler.family() != cfg.space.family) {
    throw FamilyMismatchError("weights are for " + to_string(sampler.family()) + ", config asks for " +
                              to_string(cfg.space.family));
  }
  std::ifstream in(pairs_csv);
  if (!in) throw std::runtime_error("cannot open pairs file " + pairs_csv.string());
  std::string line;
  std::vector<BoundaryPair> pairs;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line_no == 1 && line.find_first_of("ab") != std::string::npos)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("pairs file: line " + std::to_string(line_no) + " needs a,b");
    try {
      pairs.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::logic_error&) {
      throw std::runtime_error("pairs file: bad number on line " + std::to_string(line_no));
    }
  }
  if (pairs.empty()) throw std::runtime_error("pairs file " + pairs_csv.string() + " holds no pairs");
  const std::size_t reps = std::max<std::size_t>(1, cfg.sample.n_per_pair);
  std::vector<BoundaryPair> expanded;
  expanded.reserve(pairs.size() * reps);
  for (const auto& p : pairs) expanded.insert(expanded.end(), reps, p);

  const Eigen::VectorXd theta = theta_from_values(sampler.space, cfg.sample.theta);
  SampleReport rep;
  const auto start = Clock::now();
  const auto z = sample(sampler, theta, expanded, cfg.seed, &rep);
  const double wall = elapsed_ms(start);

  auto csv = open_output(cfg.out_dir / "samples.csv");
  csv << "pair,a,b,z\n";
  for (std::size_t j = 0; j < z.size(); ++j) {
    csv << j / reps << ',' << expanded[j].a << ',' << expanded[j].b << ',' << z[j] << '\n';
  }
  CommandOutcome outcome;
  outcome.report = {{"n", z.size()},
                    {"pairs", pairs.size()},
                    {"wall_ms", wall},
                    {"extrapolated_a", rep.extrapolated_a},
                    {"extrapolated_b", rep.extrapolated_b},
                    {"non_monotone", rep.non_monotone},
                    {"repaired_cells", rep.grids.repaired_cells},
                    {"outside_training", rep.grids.outside_training}};
  write_json(cfg.out_dir / "samples.meta.json", outcome.report);
  print_table(out, {"samples", "pairs", "wall_ms", "extrap_a", "extrap_b", "non_monotone"},
              {{std::to_string(z.size()), std::to_string(pairs.size()), fmt(wall), std::to_string(rep.extrapolated_a),
                std::to_string(rep.extrapolated_b), std::to_string(rep.non_monotone)}});
  return outcome;
}

CommandOutcome cmd_validate_abm(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out) {
  write_resolved_config(cfg, "validate-abm");
  const BridgeSampler sampler = load_sampler(weights);
  const auto& settings = cfg.validate_abm;
  const auto cells = abm_error_table(sampler, settings, cfg.seed, true);

  CommandOutcome outcome;
  auto table = open_output(cfg.out_dir / "abm_table.csv");
  auto curves = open_output(cfg.out_dir / "abm_cdf_curves.csv");
  table << "a,level,b,error,extrapolated,wall_ms\n";
  curves << "a,level,x,cdf_sampled,cdf_exact\n";
  const Eigen::VectorXd theta = theta_from_values(sampler.space, settings.theta);
  const ModelSpec model = model_from_theta(sampler.space, theta);
  const double sigma = std::get<Abm>(model.dynamics).sigma;
  std::vector<std::vector<std::string>> rows;
  double worst = 0;
  for (const auto& c : cells) {
    worst = std::max(worst, c.error);
    table << c.a << ',' << c.level << ',' << c.b << ',' << c.error << ',' << c.extrapolated << ',' << c.wall_ms << '\n';
    const GaussianLaw law = abm_bridge_integral_law(c.a, c.b, sigma, model.dt_total);
    const Eigen::MatrixXd curve = empirical_cdf_curve(c.samples);
    for (Eigen::Index i = 0; i < curve.rows(); ++i) {
      curves << c.a << ',' << c.level << ',' << curve(i, 0) << ',' << curve(i, 1) << ','
             << std_normal_cdf((curve(i, 0) - law.mean) / law.std) << '\n';
    }
    rows.push_back({fmt(c.a), fmt(c.level), fmt(c.b), fmt(c.error * 1e3, 3), c.extrapolated ? "yes" : "no",
                    fmt(c.wall_ms, 3), c.error <= settings.tolerance ? "ok" : "FAIL"});
  }
  print_table(out, {"a", "level", "b", "error_e-3", "extrap", "ms", "check"}, rows);

  const auto heat = abm_error_heatmap(sampler, settings.heatmap, derive_seed(cfg.seed, 99));
  auto heat_csv = open_output(cfg.out_dir / "abm_heatmap.csv");
  heat_csv << "sigma,dt,error,boundary\n";
  std::size_t interior = 0, interior_ok = 0;
  for (const auto& h : heat) {
    heat_csv << h.sigma << ',' << h.dt << ',' << h.error << ',' << h.boundary << '\n';
    if (!h.boundary) {
      ++interior;
      interior_ok += h.error <= 0.01;
    }
  }
  const double interior_fraction = interior ? static_cast<double>(interior_ok) / interior : 1.0;
  out << "heat-map: " << interior_ok << "/" << interior << " interior cells at or below 0.01\n";

  outcome.exit_code = worst <= settings.tolerance ? kExitOk : kExitTolerance;
  outcome.report = {{"max_error", worst},
                    {"tolerance", settings.tolerance},
                    {"pass", outcome.exit_code == kExitOk},
                    {"heatmap_interior_fraction_below_0.01", interior_fraction}};
  nlohmann::json jcells = nlohmann::json::array();
  for (const auto& c : cells) {
    jcells.push_back({{"a", c.a}, {"level", c.level}, {"b", c.b}, {"error", c.error}, {"wall_ms", c.wall_ms}});
  }
  outcome.report["cells"] = jcells;
  write_json(cfg.out_dir / "abm_report.json", outcome.report);
  return outcome;
}

CommandOutcome cmd_bench_heston(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out) {
  write_resolved_config(cfg, "bench-heston");
  const BridgeSampler sampler = load_sampler(weights);
  const HestonParams params = heston_parameter_set(cfg.heston.set);
  const HestonBench bench = bench_heston(sampler, params, cfg.heston.n, cfg.heston.delta, cfg.seed);
  const std::string tag = "heston_" + cfg.heston.set;

  auto comp = open_output(cfg.out_dir / (tag + "_components.csv"));
  comp << "x,iv,v_end,g\n";
  for (std::size_t j = 0; j < bench.draws.x.size(); ++j) {
    comp << bench.draws.x[j] << ',' << bench.draws.iv[j] << ',' << bench.draws.v_end[j] << ',' << bench.draws.g[j]
         << '\n';
  }
  auto curves = open_output(cfg.out_dir / (tag + "_cdf_curves.csv"));
  curves << "method,x,cdf\n";
  for (const auto& [name, xs] : {std::pair{"7L", &bench.draws.x}, std::pair{"euler", &bench.euler}}) {
    const Eigen::MatrixXd curve = empirical_cdf_curve(*xs);
    for (Eigen::Index i = 0; i < curve.rows(); ++i) curves << name << ',' << curve(i, 0) << ',' << curve(i, 1) << '\n';
  }
  const bool ok = bench.error <= cfg.heston.tolerance && bench.speedup >= cfg.heston.min_speedup;
  CommandOutcome outcome;
  outcome.exit_code = ok ? kExitOk : kExitTolerance;
  outcome.report = {{"n", cfg.heston.n},
                    {"wall_ms", bench.sevenleague_ms},
                    {"speedup_vs_benchmark", bench.speedup},
                    {"benchmark_wall_ms", bench.euler_ms},
                    {"error", bench.error},
                    {"rejected", bench.rejected},
                    {"extrapolated_a", bench.draws.report.extrapolated_a},
                    {"extrapolated_b", bench.draws.report.extrapolated_b},
                    {"set", cfg.heston.set},
                    {"pass", ok}};
  write_json(cfg.out_dir / (tag + "_timing.json"), outcome.report);
  print_table(out, {"set", "n", "error_e-3", "7L_ms", "euler_ms", "speedup", "rejected", "check"},
              {{cfg.heston.set, std::to_string(cfg.heston.n), fmt(bench.error * 1e3, 3), fmt(bench.sevenleague_ms),
                fmt(bench.euler_ms), fmt(bench.speedup, 3), std::to_string(bench.rejected), ok ? "ok" : "FAIL"}});
  return outcome;
}

CommandOutcome cmd_sabr_iv(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out) {
  write_resolved_config(cfg, "sabr-iv");
  const BridgeSampler sampler = load_sampler(weights);
  const auto results = sabr_check(sampler, cfg.sabr, cfg.seed, cfg.threads);
  auto table = open_output(cfg.out_dir / "sabr_iv.csv");
  auto curves = open_output(cfg.out_dir / "sabr_cdf_curves.csv");
  table << "level,sigma_end,error\n";
  curves << "level,method,x,cdf\n";
  std::vector<std::vector<std::string>> rows;
  double worst = 0;
  for (const auto& r : results) {
    worst = std::max(worst, r.error);
    table << r.level << ',' << r.sigma_end << ',' << r.error << '\n';
    for (const auto& [name, xs] : {std::pair{"7L", &r.samples}, std::pair{"bundle", &r.oracle}}) {
      const Eigen::MatrixXd curve = empirical_cdf_curve(*xs);
      for (Eigen::Index i = 0; i < curve.rows(); ++i) {
        curves << r.level << ',' << name << ',' << curve(i, 0) << ',' << curve(i, 1) << '\n';
      }
    }
    rows.push_back({fmt(r.level), fmt(r.sigma_end), fmt(r.error * 1e3, 3), r.error <= cfg.sabr.tolerance ? "ok" : "FAIL"});
  }
  print_table(out, {"level", "sigma_end", "error_e-3", "check"}, rows);
  CommandOutcome outcome;
  outcome.exit_code = worst <= cfg.sabr.tolerance ? kExitOk : kExitTolerance;
  outcome.report = {{"max_error", worst}, {"tolerance", cfg.sabr.tolerance}, {"pass", outcome.exit_code == kExitOk}};
  write_json(cfg.out_dir / "sabr_report.json", outcome.report);
  return outcome;
}

}  // namespace sl
