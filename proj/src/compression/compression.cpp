#include "sevenleague/compression/compression.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "sevenleague/core/parallel.hpp"
#include "sevenleague/core/random.hpp"
#include "sevenleague/core/statistics.hpp"

namespace sl {

int GridConfig::steps_for(double dt) const {
  const int by_step = static_cast<int>(std::ceil(dt / max_step - 1e-9));
  return std::max(n_steps, by_step);
}

GridConfig GridConfig::resolved_for(const ModelSpec& model) const {
  GridConfig out = *this;
  if (a_range == ARange::long_term_multiple) {
    const auto* cir = std::get_if<Cir>(&model.dynamics);
    if (cir == nullptr) throw std::invalid_argument("grid A relative to the long-term level needs a CIR model");
    out.a_min = a_min * cir->ybar;
    out.a_max = a_max * cir->ybar;
    out.a_range = ARange::absolute;
  }
  return out;
}

void validate(const GridConfig& cfg) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("grid config: " + what);
  };
  require(cfg.m_a >= 1, "m_a must be at least 1");
  require(cfg.m_b >= 2, "m_b must be at least 2");
  require(cfg.m >= 2 && cfg.m <= kMaxCollocationPoints, "m must lie in [2, 10]");
  require(cfg.a_min <= cfg.a_max, "a_min must not exceed a_max");
  require(cfg.m_a == 1 || cfg.a_min < cfg.a_max, "a range must be non-degenerate when m_a > 1");
  require(cfg.q_lo > 0 && cfg.q_hi < 1 && cfg.q_lo < cfg.q_hi, "need 0 < q_lo < q_hi < 1");
  require(cfg.n_steps >= 2, "n_steps must be at least 2");
  require(cfg.max_step > 0, "max_step must be positive");
  require(cfg.neighbors() >= 1, "n_neighbors must be positive");
  require(2 * cfg.neighbors() * static_cast<std::size_t>(cfg.m_b) <= cfg.n_paths,
          "2 * n_neighbors must not exceed n_paths / m_b");
}

GridConfig default_grid_config(Family family) {
  GridConfig cfg;
  switch (family) {
    case Family::abm:
      cfg.m_a = 2, cfg.m_b = 2, cfg.m = 3;
      cfg.a_min = 0.0, cfg.a_max = 1.0;
      cfg.q_lo = 0.20, cfg.q_hi = 0.80;
      cfg.n_steps = 20, cfg.max_step = 0.05;
      break;
    case Family::gbm:
      cfg.m_a = 1, cfg.m_b = 6, cfg.m = 4;
      cfg.a_min = 1.0, cfg.a_max = 1.0;
      cfg.q_lo = 0.05, cfg.q_hi = 0.85;
      cfg.n_steps = 50, cfg.max_step = 0.02;
      break;
    case Family::cir:
      cfg.m_a = 6, cfg.m_b = 6, cfg.m = 4;
      cfg.a_min = 0.1, cfg.a_max = 2.5;
      cfg.a_range = ARange::long_term_multiple;
      cfg.q_lo = 0.10, cfg.q_hi = 0.90;
      cfg.n_steps = 16, cfg.max_step = 0.005;
      break;
  }
  return cfg;
}

nlohmann::json to_json(const GridConfig& cfg) {
  return {{"m_a", cfg.m_a},
          {"m_b", cfg.m_b},
          {"m", cfg.m},
          {"a_min", cfg.a_min},
          {"a_max", cfg.a_max},
          {"a_range", cfg.a_range == ARange::absolute ? "absolute" : "long_term_multiple"},
          {"q_lo", cfg.q_lo},
          {"q_hi", cfg.q_hi},
          {"n_paths", cfg.n_paths},
          {"n_neighbors", cfg.neighbors()},
          {"n_steps", cfg.n_steps},
          {"max_step", cfg.max_step}};
}

GridConfig grid_config_from_json(const nlohmann::json& doc, const GridConfig& base) {
  GridConfig cfg = base;
  cfg.m_a = doc.value("m_a", cfg.m_a);
  cfg.m_b = doc.value("m_b", cfg.m_b);
  cfg.m = doc.value("m", cfg.m);
  cfg.a_min = doc.value("a_min", cfg.a_min);
  cfg.a_max = doc.value("a_max", cfg.a_max);
  if (doc.contains("a_range")) {
    const auto name = doc.at("a_range").get<std::string>();
    if (name == "absolute") {
      cfg.a_range = ARange::absolute;
    } else if (name == "long_term_multiple") {
      cfg.a_range = ARange::long_term_multiple;
    } else {
      throw std::invalid_argument("grid config: unknown a_range '" + name + "'");
    }
  }
  cfg.q_lo = doc.value("q_lo", cfg.q_lo);
  cfg.q_hi = doc.value("q_hi", cfg.q_hi);
  cfg.n_paths = doc.value("n_paths", cfg.n_paths);
  cfg.n_neighbors = doc.value("n_neighbors", cfg.n_neighbors);
  cfg.n_steps = doc.value("n_steps", cfg.n_steps);
  cfg.max_step = doc.value("max_step", cfg.max_step);
  validate(cfg);
  return cfg;
}

Eigen::VectorXd build_grid_a(const GridConfig& cfg) {
  if (cfg.m_a < 1) throw std::invalid_argument("build_grid_a: m_a must be at least 1");
  if (cfg.a_min > cfg.a_max) throw std::invalid_argument("build_grid_a: a_min exceeds a_max");
  if (cfg.m_a == 1) return Eigen::VectorXd::Constant(1, cfg.a_min);
  return Eigen::VectorXd::LinSpaced(cfg.m_a, cfg.a_min, cfg.a_max);
}

std::vector<double> grid_b_levels(const GridConfig& cfg) {
  std::vector<double> levels(static_cast<std::size_t>(cfg.m_b));
  for (int h = 0; h < cfg.m_b; ++h) levels[static_cast<std::size_t>(h)] = cfg.q_lo + h * (cfg.q_hi - cfg.q_lo) / (cfg.m_b - 1);
  return levels;
}

Eigen::MatrixXd build_grid_b(const ModelSpec& model, const Eigen::VectorXd& a, const GridConfig& cfg) {
  const auto levels = grid_b_levels(cfg);
  Eigen::MatrixXd b(a.size(), cfg.m_b);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto row = terminal_quantiles(model, a[i], levels);
    for (int h = 0; h < cfg.m_b; ++h) b(i, h) = row[static_cast<std::size_t>(h)];
  }
  return b;
}

CompressionBatch compress_horizons(const ModelSpec& model, const GridConfig& raw_cfg, std::span<const double> horizons,
                                   std::uint64_t seed, unsigned threads,
                                   std::vector<CompressionDiagnostics>* diagnostics) {
  validate(model);
  const GridConfig cfg = raw_cfg.resolved_for(model);
  validate(cfg);
  const std::size_t n_h = horizons.size();
  const StepPlan plan = make_step_plan(horizons, cfg.n_steps, cfg.max_step);

  CompressionBatch batch;
  batch.grids.resize(n_h);
  batch.errors.resize(n_h);
  const CollocationBasis basis = optimal_collocation_points(cfg.m);
  const Eigen::VectorXd a = build_grid_a(cfg);
  for (std::size_t j = 0; j < n_h; ++j) {
    ModelSpec at = model;
    at.dt_total = horizons[j];
    auto& g = batch.grids[j];
    g.m_a = cfg.m_a;
    g.m_b = cfg.m_b;
    g.m = cfg.m;
    g.basis = basis;
    g.a = a;
    g.b = build_grid_b(at, a, cfg);
    g.c.assign(static_cast<std::size_t>(cfg.c_size()), 0.0);
  }
  if (diagnostics) diagnostics->assign(n_h, CompressionDiagnostics{Eigen::MatrixXd::Zero(cfg.m_a, cfg.m_b)});

  const std::size_t n_nb = cfg.neighbors();
  const unsigned inner_threads = static_cast<unsigned>(cfg.m_a) >= threads ? 1u : threads;
  std::mutex error_mutex;

  parallel_for(static_cast<std::size_t>(cfg.m_a), inner_threads == 1 ? threads : 1u, [&](std::size_t i) {
    const auto all = simulate_plan(model, a[static_cast<Eigen::Index>(i)], cfg.n_paths, plan, derive_seed(seed, i),
                                   inner_threads);
    std::vector<PathSummary> paths(cfg.n_paths);
    std::vector<double> bundle(2 * n_nb);
    for (std::size_t j = 0; j < n_h; ++j) {
      for (std::size_t p = 0; p < cfg.n_paths; ++p) paths[p] = all[p * n_h + j];
      // Stable sort keeps path-index order among equal terminals.
      std::stable_sort(paths.begin(), paths.end(),
                       [](const PathSummary& x, const PathSummary& y) { return x.terminal < y.terminal; });
      auto& g = batch.grids[j];
      try {
        for (int h = 0; h < cfg.m_b; ++h) {
          const double target = g.b(static_cast<Eigen::Index>(i), h);
          const auto split = std::lower_bound(paths.begin(), paths.end(), target,
                                              [](const PathSummary& p, double v) { return p.terminal < v; });
          const auto below = static_cast<std::size_t>(split - paths.begin());
          const std::size_t above = paths.size() - below;
          if (below < n_nb || above < n_nb) {
            std::ostringstream msg;
            msg << "compress: only " << below << " paths below and " << above << " above b[" << i << "][" << h
                << "] = " << target << ", need " << n_nb << " on each side";
            throw CompressionError(msg.str());
          }
          for (std::size_t q = 0; q < 2 * n_nb; ++q) bundle[q] = paths[below - n_nb + q].integral;
          std::sort(bundle.begin(), bundle.end());
          if (diagnostics) {
            (*diagnostics)[j].bundle_width(static_cast<Eigen::Index>(i), h) =
                paths[below + n_nb - 1].terminal - paths[below - n_nb].terminal;
          }
          for (int k = 0; k < cfg.m; ++k) {
            g.z(static_cast<int>(i), h, k) = quantile_sorted(bundle, basis.levels[k]);
            if (k > 0 && !(g.z(static_cast<int>(i), h, k) > g.z(static_cast<int>(i), h, k - 1))) {
              std::ostringstream msg;
              msg << "compress: collocation points not increasing in cell (" << i << ", " << h
                  << "); increase n_paths or n_neighbors";
              throw CompressionError(msg.str());
            }
          }
        }
      } catch (const CompressionError& e) {
        std::lock_guard lock(error_mutex);
        if (batch.errors[j].empty()) batch.errors[j] = e.what();
      }
    }
  });
  return batch;
}

CollocationGrids compress(const ModelSpec& model, const GridConfig& cfg, std::uint64_t seed, unsigned threads,
                          CompressionDiagnostics* diagnostics) {
  const double horizon[] = {model.dt_total};
  std::vector<CompressionDiagnostics> diag;
  CompressionBatch batch = compress_horizons(model, cfg, horizon, seed, threads, diagnostics ? &diag : nullptr);
  if (!batch.errors[0].empty()) throw CompressionError(batch.errors[0]);
  if (diagnostics) *diagnostics = std::move(diag[0]);
  return std::move(batch.grids[0]);
}

std::vector<std::vector<double>> nearest_bundles(const ModelSpec& model, double a, std::span<const double> targets,
                                                 std::size_t n_paths, std::size_t n_neighbors, int n_steps,
                                                 std::uint64_t seed, unsigned threads) {
  validate(model);
  auto paths = simulate_batch(model, a, n_paths, n_steps, seed, threads);
  std::stable_sort(paths.begin(), paths.end(),
                   [](const PathSummary& x, const PathSummary& y) { return x.terminal < y.terminal; });
  std::vector<std::vector<double>> out;
  for (double b : targets) {
    const auto split = std::lower_bound(paths.begin(), paths.end(), b,
                                        [](const PathSummary& p, double v) { return p.terminal < v; });
    const auto below = static_cast<std::size_t>(split - paths.begin());
    if (below < n_neighbors || paths.size() - below < n_neighbors) {
      throw CompressionError("nearest_bundles: not enough paths on both sides of b");
    }
    std::vector<double> bundle(2 * n_neighbors);
    for (std::size_t j = 0; j < bundle.size(); ++j) bundle[j] = paths[below - n_neighbors + j].integral;
    std::sort(bundle.begin(), bundle.end());
    out.push_back(std::move(bundle));
  }
  return out;
}

std::vector<double> model_theta(const ModelSpec& model) {
  std::vector<double> theta;
  if (const auto* m = std::get_if<Abm>(&model.dynamics)) theta = {m->mu, m->sigma};
  if (const auto* m = std::get_if<Gbm>(&model.dynamics)) theta = {m->mu, m->sigma};
  if (const auto* m = std::get_if<Cir>(&model.dynamics)) theta = {m->kappa, m->ybar, m->gamma};
  theta.push_back(model.dt_total);
  return theta;
}

nlohmann::json grids_to_json(const CollocationGrids& grids, const ModelSpec& model) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["family"] = to_string(model.family());
  doc["transform"] = to_string(model.transform);
  doc["theta"] = model_theta(model);
  doc["A"] = std::vector<double>(grids.a.begin(), grids.a.end());
  nlohmann::json b = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (int i = 0; i < grids.m_a; ++i) {
    std::vector<double> row(static_cast<std::size_t>(grids.m_b));
    nlohmann::json c_row = nlohmann::json::array();
    for (int h = 0; h < grids.m_b; ++h) {
      row[static_cast<std::size_t>(h)] = grids.b(i, h);
      std::vector<double> cell(static_cast<std::size_t>(grids.m));
      for (int k = 0; k < grids.m; ++k) cell[static_cast<std::size_t>(k)] = grids.z(i, h, k);
      c_row.push_back(cell);
    }
    b.push_back(row);
    c.push_back(c_row);
  }
  doc["B"] = b;
  doc["C"] = c;
  doc["xi"] = std::vector<double>(grids.basis.xi.begin(), grids.basis.xi.end());
  return doc;
}

CollocationGrids grids_from_json(const nlohmann::json& doc) {
  if (doc.value("version", 0) != 1) throw std::runtime_error("grids: unsupported version");
  CollocationGrids grids;
  const auto a = doc.at("A").get<std::vector<double>>();
  const auto b = doc.at("B").get<std::vector<std::vector<double>>>();
  const auto c = doc.at("C").get<std::vector<std::vector<std::vector<double>>>>();
  const auto xi = doc.at("xi").get<std::vector<double>>();
  grids.m_a = static_cast<int>(a.size());
  grids.m_b = b.empty() ? 0 : static_cast<int>(b.front().size());
  grids.m = static_cast<int>(xi.size());
  if (b.size() != a.size() || c.size() != a.size()) throw std::runtime_error("grids: inconsistent shapes");
  grids.basis = optimal_collocation_points(grids.m);
  grids.a = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  grids.b.resize(grids.m_a, grids.m_b);
  grids.c.assign(static_cast<std::size_t>(grids.m_a * grids.m_b * grids.m), 0.0);
  for (int i = 0; i < grids.m_a; ++i) {
    if (static_cast<int>(b[static_cast<std::size_t>(i)].size()) != grids.m_b ||
        static_cast<int>(c[static_cast<std::size_t>(i)].size()) != grids.m_b) {
      throw std::runtime_error("grids: inconsistent shapes");
    }
    for (int h = 0; h < grids.m_b; ++h) {
      grids.b(i, h) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      const auto& cell = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
      if (static_cast<int>(cell.size()) != grids.m) throw std::runtime_error("grids: inconsistent shapes");
      for (int k = 0; k < grids.m; ++k) grids.z(i, h, k) = cell[static_cast<std::size_t>(k)];
    }
  }
  return grids;
}

}  // namespace sl
