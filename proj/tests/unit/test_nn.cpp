#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sevenleague/core/random.hpp"
#include "sevenleague/nn/network.hpp"
#include "sevenleague/nn/trainer.hpp"

using namespace sl;

namespace {

// Targets y = A x + c with a fixed A; inputs uniform in [0,1]^2.
std::vector<TrainingRecord> linear_records(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingRecord> records;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(2), y(3);
    x << rng.uniform(), rng.uniform();
    y << 0.3 * x[0] - 0.2 * x[1] + 0.1, 0.5 * x[1] + 1.0, x[0] + x[1] - 0.4;
    records.push_back({x, y});
  }
  return records;
}

double relative_gradient_error(const Network& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const auto analytic = loss_and_grad(net, x, y);
  const double h = 1e-6;
  double worst = 0;
  Network probe = net;
  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = batch_loss(probe, x, y);
    param = saved - h;
    const double down = batch_loss(probe, x, y);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(numeric - grad) / std::max(1e-3, std::abs(numeric) + std::abs(grad)));
  };
  for (int l = 0; l < probe.layers(); ++l) {
    for (Eigen::Index i = 0; i < probe.weights[l].size(); ++i) {
      check(probe.weights[l].data()[i], analytic.grads.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < probe.biases[l].size(); ++i) check(probe.biases[l][i], analytic.grads.biases[l][i]);
  }
  return worst;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("softplus") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(1000.0) == 1000.0);
  CHECK(softplus(-1000.0) == 0.0);
  CHECK(softplus(-30.0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-10));
  CHECK(softplus_grad(0.0) == 0.5);
  CHECK(softplus_grad(-800.0) == 0.0);
  CHECK(softplus_grad(800.0) == 1.0);
}

TEST_CASE("forward pass by hand") {
  Network zero = make_network({3, 4, 2}, 1);
  for (auto& w : zero.weights) w.setZero();
  CHECK(forward(zero, Eigen::Vector3d(0.1, 0.2, 0.3)).cwiseAbs().maxCoeff() == 0.0);

  Network chain = make_network({1, 1, 1, 1, 1, 1}, 1);
  for (auto& w : chain.weights) w.setOnes();
  const double s1 = softplus(0.0), s2 = softplus(s1), s3 = softplus(s2), s4 = softplus(s3);
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(forward(chain, x)[0] == doctest::Approx(s4).epsilon(1e-14));
  chain.output_mean[0] = 2;
  chain.output_scale[0] = 3;
  CHECK(forward(chain, x)[0] == doctest::Approx(2 + 3 * s4).epsilon(1e-14));
  CHECK_THROWS_AS(forward(chain, Eigen::Vector2d(0, 0)), std::invalid_argument);
}

TEST_CASE("He-uniform initialisation") {
  const Network net = make_network({3, 50, 50, 12}, 4);
  CHECK(net.parameter_count() == 3 * 50 + 50 + 50 * 50 + 50 + 50 * 12 + 12);
  CHECK(net.weights[0].cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 3));
  CHECK(net.weights[1].cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 50));
  CHECK(net.biases[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(make_network({3, 50, 50, 12}, 4).weights[1] == net.weights[1]);
  CHECK_THROWS_AS(make_network({3}, 1), std::invalid_argument);
}

TEST_CASE("backpropagation matches central differences") {
  const Network net = make_network({3, 6, 5, 4, 2}, 5);
  Rng rng(6);
  Eigen::MatrixXd x(3, 7), y(2, 7);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.normal();
  CHECK(relative_gradient_error(net, x, y) <= 1e-5);
}

TEST_CASE("loss properties") {
  const Network net = make_network({2, 5, 3}, 7);
  Eigen::MatrixXd x(2, 4);
  x << 0.1, 0.2, 0.3, 0.4, 0.9, 0.8, 0.7, 0.6;
  const Eigen::MatrixXd fit = forward_standardized(net, x);
  const auto perfect = loss_and_grad(net, x, fit);
  CHECK(perfect.loss == 0.0);
  for (const auto& g : perfect.grads.weights) CHECK(g.cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(3, 4);
  Eigen::MatrixXd x2(2, 8), y2(3, 8);
  x2 << x, x;
  y2 << y, y;
  const auto once = loss_and_grad(net, x, y);
  const auto twice = loss_and_grad(net, x2, y2);
  CHECK(once.loss == doctest::Approx(twice.loss).epsilon(1e-14));
  CHECK((once.grads.weights[0] - twice.grads.weights[0]).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("learning-rate schedule halves every 500 epochs") {
  const TrainConfig cfg;
  CHECK(learning_rate(cfg, 0) == 1e-3);
  CHECK(learning_rate(cfg, 499) == 1e-3);
  CHECK(learning_rate(cfg, 500) == 0.5e-3);
  CHECK(learning_rate(cfg, 999) == 0.5e-3);
  CHECK(learning_rate(cfg, 1000) == 0.25e-3);
  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("first Adam step moves each parameter by about the learning rate") {
  Network net = make_network({1, 1}, 1);
  net.weights[0](0, 0) = 0.5;
  Gradients g;
  g.weights = {Eigen::MatrixXd::Constant(1, 1, 3.0)};
  g.biases = {Eigen::VectorXd::Constant(1, -0.2)};
  Adam adam(net);
  adam.step(net, g, 1e-3);
  CHECK(net.weights[0](0, 0) == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
  CHECK(net.biases[0][0] == doctest::Approx(1e-3).epsilon(1e-4));
  CHECK(adam.steps() == 1);
}

TEST_CASE("training fits a linear map and is reproducible") {
  const auto records = linear_records(2000, 8);
  const auto split = split_dataset(records, 9);
  Network net = make_network({2, 20, 20, 3}, 10);
  fit_output_scaler(net, to_matrices(split.train).y);
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.lr_halving_period = 200;
  int calls = 0;
  const TrainResult result = train(net, split.train, split.validation, cfg, [&](const EpochRecord&) { ++calls; });
  CHECK(calls == cfg.epochs);
  CHECK(result.history.size() == static_cast<std::size_t>(cfg.epochs));
  CHECK(result.best_val_loss == doctest::Approx(result.history[result.best_epoch].val_loss));
  CHECK(evaluate_mse(result.net, split.test) <= 1e-6);
  CHECK(r_squared(result.net, split.test) > 0.9999);

  cfg.epochs = 30;
  const TrainResult a = train(net, split.train, split.validation, cfg);
  const TrainResult b = train(net, split.train, split.validation, cfg);
  for (int l = 0; l < a.net.layers(); ++l) CHECK(a.net.weights[l] == b.net.weights[l]);
}

TEST_CASE("output scaler") {
  Network net = make_network({1, 2}, 1);
  Eigen::MatrixXd y(2, 4);
  y << 1, 2, 3, 4, 5, 5, 5, 5;
  fit_output_scaler(net, y);
  CHECK(net.output_mean[0] == doctest::Approx(2.5));
  CHECK(net.output_scale[1] == 1.0);
  const Eigen::MatrixXd s = standardize(net, y);
  CHECK(s.row(0).mean() == doctest::Approx(0.0));
  CHECK(s(1, 0) == 0.0);

  fit_output_scaler(net, y, OutputScaling::shared);
  CHECK(net.output_mean[1] == doctest::Approx(5.0));
  CHECK(net.output_scale[0] == doctest::Approx(std::sqrt(1.25 / 2)));
  CHECK(net.output_scale[1] == net.output_scale[0]);
  CHECK(output_scaling_from_string(to_string(OutputScaling::shared)) == OutputScaling::shared);
  CHECK_THROWS(output_scaling_from_string("minmax"));
}

TEST_CASE("non-finite targets abort training") {
  auto records = linear_records(20, 11);
  records[3].c_flat[0] = std::nan("");
  Network net = make_network({2, 4, 3}, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  CHECK_THROWS_AS(train(net, records, {}, cfg), TrainingError);
  CHECK_THROWS_AS(train(net, {}, {}, cfg), std::invalid_argument);
}

TEST_CASE("weights round-trip and malformed files") {
  const auto dir = std::filesystem::temp_directory_path() / "sevenleague_test_nn";
  std::filesystem::create_directories(dir);
  Network net = make_network({3, 7, 5}, 12);
  net.family = "ABM";
  net.output_mean.setConstant(0.25);
  net.metadata["note"] = "x";
  save_weights(net, dir / "w.json");
  const Network back = load_weights(dir / "w.json");
  const Eigen::Vector3d x(0.2, 0.4, 0.6);
  CHECK(forward(back, x) == forward(net, x));
  CHECK(back.family == "ABM");
  CHECK(back.metadata["note"] == "x");

  {
    std::ifstream in(dir / "w.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream(dir / "truncated.json") << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_weights(dir / "truncated.json"), WeightsFormatError);
  auto doc = network_to_json(net);
  doc["layer_sizes"] = std::vector<int>{3, 8, 5};
  CHECK_THROWS_AS(network_from_json(doc), WeightsFormatError);
  doc = network_to_json(net);
  doc["version"] = 7;
  CHECK_THROWS_AS(network_from_json(doc), WeightsFormatError);
}

}
