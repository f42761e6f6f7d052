#include "sevenleague/app/config.hpp"

#include <fstream>
#include <set>

namespace sl {

namespace {

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& known, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& target) {
  if (doc.contains(key)) target = doc.at(key).get<T>();
}

}  // namespace

RunConfig default_run_config(Family family, const std::string& preset) {
  RunConfig cfg;
  cfg.preset = preset;
  if (preset == "desk") {
    cfg.space = desk_param_space(family);
  } else if (preset == "full") {
    cfg.space = full_param_space(family);
  } else if (preset == "sabr") {
    if (family != Family::gbm) throw ConfigError("preset 'sabr' needs family GBM");
    cfg.space = sabr_param_space();
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  cfg.grid = default_grid_config(family);
  if (family == Family::abm) cfg.train.output_scaling = OutputScaling::shared;
  cfg.validate_abm.heatmap.sigma = linspace(0.05, 0.60, 12);
  cfg.validate_abm.heatmap.dt = linspace(0.10, 1.09, 12);
  return cfg;
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
  try {
    reject_unknown(doc,
                   {"family", "preset", "space", "grid", "train", "hidden", "seed", "threads", "out", "sample",
                    "validate_abm", "heston", "sabr"},
                   "config");
    const Family family = family_from_string(doc.at("family").get<std::string>());
    RunConfig cfg = default_run_config(family, doc.value("preset", std::string("desk")));
    if (doc.contains("space")) {
      cfg.space = param_space_from_json(doc.at("space"));
      if (cfg.space.family != family) throw ConfigError("config: space family differs from 'family'");
    }
    if (doc.contains("grid")) {
      reject_unknown(doc.at("grid"),
                     {"m_a", "m_b", "m", "a_min", "a_max", "a_range", "q_lo", "q_hi", "n_paths", "n_neighbors",
                      "n_steps", "max_step"},
                     "grid");
      cfg.grid = grid_config_from_json(doc.at("grid"), cfg.grid);
    }
    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      reject_unknown(t, {"epochs", "batch_size", "lr0", "lr_halving_period", "seed", "output_scaling"},
                    "train");
      read(t, "epochs", cfg.train.epochs);
      read(t, "batch_size", cfg.train.batch_size);
      read(t, "lr0", cfg.train.lr0);
      read(t, "lr_halving_period", cfg.train.lr_halving_period);
      read(t, "seed", cfg.train.seed);
      if (t.contains("output_scaling")) {
        cfg.train.output_scaling = output_scaling_from_string(t.at("output_scaling").get<std::string>());
      }
      validate(cfg.train);
    }
    read(doc, "hidden", cfg.hidden);
    for (int w : cfg.hidden) {
      if (w < 1) throw ConfigError("config: hidden widths must be positive");
    }
    read(doc, "seed", cfg.seed);
    read(doc, "threads", cfg.threads);
    if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();

    if (doc.contains("sample")) {
      const auto& s = doc.at("sample");
      reject_unknown(s, {"theta", "n_per_pair"}, "sample");
      read(s, "theta", cfg.sample.theta);
      read(s, "n_per_pair", cfg.sample.n_per_pair);
    }
    if (doc.contains("validate_abm")) {
      const auto& v = doc.at("validate_abm");
      reject_unknown(v, {"theta", "a", "b_levels", "n", "tolerance", "heatmap"}, "validate_abm");
      auto& out = cfg.validate_abm;
      read(v, "theta", out.theta);
      read(v, "a", out.a);
      read(v, "b_levels", out.b_levels);
      read(v, "n", out.n);
      read(v, "tolerance", out.tolerance);
      if (v.contains("heatmap")) {
        const auto& h = v.at("heatmap");
        reject_unknown(h, {"mu", "a", "level", "sigma", "dt", "n", "small_sigma", "small_dt"}, "heatmap");
        read(h, "mu", out.heatmap.mu);
        read(h, "a", out.heatmap.a);
        read(h, "level", out.heatmap.level);
        read(h, "sigma", out.heatmap.sigma);
        read(h, "dt", out.heatmap.dt);
        read(h, "n", out.heatmap.n);
        read(h, "small_sigma", out.heatmap.small_sigma);
        read(h, "small_dt", out.heatmap.small_dt);
      }
    }
    if (doc.contains("heston")) {
      const auto& h = doc.at("heston");
      reject_unknown(h, {"set", "n", "delta", "tolerance", "min_speedup"}, "heston");
      read(h, "set", cfg.heston.set);
      read(h, "n", cfg.heston.n);
      read(h, "delta", cfg.heston.delta);
      read(h, "tolerance", cfg.heston.tolerance);
      read(h, "min_speedup", cfg.heston.min_speedup);
    }
    if (doc.contains("sabr")) {
      const auto& s = doc.at("sabr");
      reject_unknown(s,
                     {"alpha", "dt", "sigma0", "levels", "n", "oracle_paths", "oracle_neighbors", "oracle_steps",
                      "tolerance"},
                     "sabr");
      read(s, "alpha", cfg.sabr.alpha);
      read(s, "dt", cfg.sabr.dt);
      read(s, "sigma0", cfg.sabr.sigma0);
      read(s, "levels", cfg.sabr.levels);
      read(s, "n", cfg.sabr.n);
      read(s, "oracle_paths", cfg.sabr.oracle_paths);
      read(s, "oracle_neighbors", cfg.sabr.oracle_neighbors);
      read(s, "oracle_steps", cfg.sabr.oracle_steps);
      read(s, "tolerance", cfg.sabr.tolerance);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json doc;
  doc["family"] = to_string(cfg.space.family);
  doc["preset"] = cfg.preset;
  doc["space"] = to_json(cfg.space);
  doc["grid"] = to_json(cfg.grid);
  doc["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"lr0", cfg.train.lr0},
                  {"lr_halving_period", cfg.train.lr_halving_period},
                  {"seed", cfg.train.seed},
                  {"output_scaling", to_string(cfg.train.output_scaling)}};
  doc["hidden"] = cfg.hidden;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  doc["out"] = cfg.out_dir.string();
  doc["sample"] = {{"theta", cfg.sample.theta}, {"n_per_pair", cfg.sample.n_per_pair}};
  const auto& v = cfg.validate_abm;
  doc["validate_abm"] = {{"theta", v.theta},
                         {"a", v.a},
                         {"b_levels", v.b_levels},
                         {"n", v.n},
                         {"tolerance", v.tolerance},
                         {"heatmap",
                          {{"mu", v.heatmap.mu},
                           {"a", v.heatmap.a},
                           {"level", v.heatmap.level},
                           {"sigma", v.heatmap.sigma},
                           {"dt", v.heatmap.dt},
                           {"n", v.heatmap.n},
                           {"small_sigma", v.heatmap.small_sigma},
                           {"small_dt", v.heatmap.small_dt}}}};
  doc["heston"] = {{"set", cfg.heston.set},
                   {"n", cfg.heston.n},
                   {"delta", cfg.heston.delta},
                   {"tolerance", cfg.heston.tolerance},
                   {"min_speedup", cfg.heston.min_speedup}};
  doc["sabr"] = {{"alpha", cfg.sabr.alpha},
                 {"dt", cfg.sabr.dt},
                 {"sigma0", cfg.sabr.sigma0},
                 {"levels", cfg.sabr.levels},
                 {"n", cfg.sabr.n},
                 {"oracle_paths", cfg.sabr.oracle_paths},
                 {"oracle_neighbors", cfg.sabr.oracle_neighbors},
                 {"oracle_steps", cfg.sabr.oracle_steps},
                 {"tolerance", cfg.sabr.tolerance}};
  return doc;
}

std::filesystem::path write_resolved_config(const RunConfig& cfg, const std::string& command) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / (command + ".config.json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
  return path;
}

}  // namespace sl
