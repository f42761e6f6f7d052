#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sl {

/// dY = mu dt + sigma dW
struct Abm {
  double mu = 0;
  double sigma = 1;
};

/// dY = mu Y dt + sigma Y dW
struct Gbm {
  double mu = 0;
  double sigma = 1;
};

/// dY = kappa (ybar - Y) dt + gamma sqrt(Y) dW
struct Cir {
  double kappa = 1;
  double ybar = 1;
  double gamma = 1;
};

enum class Family { abm, gbm, cir };

/// The f in Z = int f(Y(t)) dt.
enum class Transform { identity, square };

using Dynamics = std::variant<Abm, Gbm, Cir>;

/// A time-homogeneous SDE on a horizon [0, dt_total] plus the integrand transform.
struct ModelSpec {
  Dynamics dynamics;
  Transform transform = Transform::identity;
  double dt_total = 1;

  Family family() const { return static_cast<Family>(dynamics.index()); }
};

/// Throws std::invalid_argument when parameters are non-finite or non-positive where required.
void validate(const ModelSpec& model);

std::string to_string(Family family);
std::string to_string(Transform transform);
Family family_from_string(const std::string& name);
Transform transform_from_string(const std::string& name);

inline double apply_transform(Transform t, double y) { return t == Transform::square ? y * y : y; }

/// Terminal value and trapezoid integral of f(Y) for one simulated path.
struct PathSummary {
  double terminal = 0;
  double integral = 0;
};

/// Time steps of a simulation and the step counts at which each horizon is reached.
struct StepPlan {
  std::vector<double> h;
  std::vector<int> marks;
};

/// Steps hitting every horizon (ascending) exactly, with every step on [0, t]
/// at most min(max_step, t / min_steps) for each horizon t. A single horizon gets
/// max(min_steps, ceil(t / max_step)) equal steps.
StepPlan make_step_plan(std::span<const double> horizons, int min_steps, double max_step);

/// Paths from Y(0) = a following `plan`; entry p * marks.size() + j holds path p at
/// horizon j. model.dt_total is not used. Sub-stream p of `seed` drives path p.
std::vector<PathSummary> simulate_plan(const ModelSpec& model, double a, std::size_t n_paths, const StepPlan& plan,
                                       std::uint64_t seed, unsigned threads = 1);

/// Simulates n_paths paths from Y(0) = a with n_steps equal steps, keeping only
/// the terminal value and the running integral. ABM and GBM use exact step
/// updates; CIR uses full-truncation Euler and reports max(Y, 0) as its value.
/// Path p draws from sub-stream p of `seed`, so the output does not depend on
/// `threads`.
std::vector<PathSummary> simulate_batch(const ModelSpec& model, double a, std::size_t n_paths, int n_steps,
                                        std::uint64_t seed, unsigned threads = 1);

/// Exact draws of the CIR terminal value Y(dt_total) | Y(0) = v0: a scaled
/// non-central chi-square realised as a Poisson mixture of gamma variables.
std::vector<double> cir_terminal_sample(const ModelSpec& model, double v0, std::size_t n, std::uint64_t seed);

/// Quantile of Y(dt_total) | Y(0) = a at level p: Gaussian, lognormal, or scaled
/// non-central chi-square inverted numerically.
double terminal_quantile(const ModelSpec& model, double a, double p);

/// Several levels at once.
std::vector<double> terminal_quantiles(const ModelSpec& model, double a, std::span<const double> levels);

struct GaussianLaw {
  double mean = 0;
  double std = 0;
};

/// Law of int_0^dt Y dt given Y(0) = a, Y(dt) = b for an ABM: Gaussian with mean
/// dt (a + b) / 2 and standard deviation sigma dt^{3/2} / sqrt(12). The drift
/// does not enter once both endpoints are fixed.
GaussianLaw abm_bridge_integral_law(double a, double b, double sigma, double dt = 1.0);

}  // namespace sl
