#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sevenleague/app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Seven-League sampler for time-integrated stochastic bridges"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, family = "ABM", preset = "desk", out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--family", family, "model family when no config is given (ABM, GBM, CIR)");
  app.add_option("--preset", preset, "preset when no config is given (desk, full, sabr)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::string dataset, weights, pairs, theta, heston_set;
  std::optional<std::size_t> n_per_pair;
  auto* gen = app.add_subcommand("gen-dataset", "simulate the training set");
  auto* train = app.add_subcommand("train", "train the regressor on a dataset");
  train->add_option("--dataset", dataset, "dataset CSV (default <out>/dataset.csv)");
  auto* sample = app.add_subcommand("sample", "sample integrated bridges for (a,b) pairs");
  sample->add_option("--weights", weights, "trained weights")->required()->check(CLI::ExistingFile);
  sample->add_option("--pairs", pairs, "CSV of a,b pairs")->required()->check(CLI::ExistingFile);
  sample->add_option("--theta", theta, "model parameters, e.g. mu=0.04,sigma=0.3,dt=1");
  sample->add_option("--n-per-pair", n_per_pair, "samples per pair");
  auto* validate = app.add_subcommand("validate-abm", "ABM error table and heat-map against the exact law");
  validate->add_option("--weights", weights, "trained ABM weights")->required()->check(CLI::ExistingFile);
  auto* heston = app.add_subcommand("bench-heston", "Heston log-price against the Euler benchmark");
  heston->add_option("--weights", weights, "trained CIR weights")->required()->check(CLI::ExistingFile);
  heston->add_option("--set", heston_set, "parameter set I..VI");
  auto* sabr = app.add_subcommand("sabr-iv", "SABR integrated variance against a brute-force bundle");
  sabr->add_option("--weights", weights, "trained GBM square-transform weights")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sl::kExitError;
  }

  try {
    sl::RunConfig cfg = config_path.empty() ? sl::default_run_config(sl::family_from_string(family), preset)
                                            : sl::load_run_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!theta.empty()) cfg.sample.theta = sl::parse_assignments(theta);
    if (n_per_pair) cfg.sample.n_per_pair = *n_per_pair;
    if (!heston_set.empty()) cfg.heston.set = heston_set;

    sl::CommandOutcome outcome;
    if (*gen) outcome = sl::cmd_gen_dataset(cfg, std::cout);
    if (*train) outcome = sl::cmd_train(cfg, dataset.empty() ? cfg.out_dir / "dataset.csv" : std::filesystem::path(dataset), std::cout);
    if (*sample) outcome = sl::cmd_sample(cfg, weights, pairs, std::cout);
    if (*validate) outcome = sl::cmd_validate_abm(cfg, weights, std::cout);
    if (*heston) outcome = sl::cmd_bench_heston(cfg, weights, std::cout);
    if (*sabr) outcome = sl::cmd_sabr_iv(cfg, weights, std::cout);
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sl::kExitError;
  }
}
