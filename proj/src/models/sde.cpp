#include "sevenleague/models/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "sevenleague/core/normal.hpp"
#include "sevenleague/core/parallel.hpp"
#include "sevenleague/core/random.hpp"
#include "sevenleague/core/statistics.hpp"

namespace sl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

constexpr std::size_t kDrawChunk = 4096;

}  // namespace

void validate(const ModelSpec& model) {
  require(std::isfinite(model.dt_total) && model.dt_total > 0, "model: dt_total must be positive and finite");
  std::visit(overloaded{
                 [](const Abm& m) {
                   require(std::isfinite(m.mu) && std::isfinite(m.sigma), "ABM: non-finite parameter");
                   require(m.sigma > 0, "ABM: sigma must be positive");
                 },
                 [](const Gbm& m) {
                   require(std::isfinite(m.mu) && std::isfinite(m.sigma), "GBM: non-finite parameter");
                   require(m.sigma > 0, "GBM: sigma must be positive");
                 },
                 [](const Cir& m) {
                   require(std::isfinite(m.kappa) && std::isfinite(m.ybar) && std::isfinite(m.gamma),
                           "CIR: non-finite parameter");
                   require(m.kappa > 0 && m.ybar > 0 && m.gamma > 0, "CIR: kappa, ybar, gamma must be positive");
                 },
             },
             model.dynamics);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::abm: return "ABM";
    case Family::gbm: return "GBM";
    case Family::cir: return "CIR";
  }
  return "?";
}

std::string to_string(Transform transform) { return transform == Transform::square ? "square" : "identity"; }

Family family_from_string(const std::string& name) {
  if (name == "ABM") return Family::abm;
  if (name == "GBM") return Family::gbm;
  if (name == "CIR") return Family::cir;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

Transform transform_from_string(const std::string& name) {
  if (name == "identity") return Transform::identity;
  if (name == "square") return Transform::square;
  throw std::invalid_argument("unknown transform '" + name + "'");
}

StepPlan make_step_plan(std::span<const double> horizons, int min_steps, double max_step) {
  require(!horizons.empty(), "step plan: no horizons");
  require(min_steps >= 1 && max_step > 0, "step plan: need min_steps >= 1 and max_step > 0");
  StepPlan plan;
  double prev = 0.0;
  for (double t : horizons) {
    require(std::isfinite(t) && t > prev, "step plan: horizons must be positive and strictly increasing");
    const double limit = std::min(max_step, t / min_steps);
    const int k = std::max(1, static_cast<int>(std::ceil((t - prev) / limit - 1e-9)));
    const double h = (t - prev) / k;
    for (int s = 0; s < k; ++s) plan.h.push_back(h);
    plan.marks.push_back(static_cast<int>(plan.h.size()));
    prev = t;
  }
  return plan;
}

std::vector<PathSummary> simulate_plan(const ModelSpec& model, double a, std::size_t n_paths, const StepPlan& plan,
                                       std::uint64_t seed, unsigned threads) {
  validate(model);
  require(n_paths >= 1, "simulate: n_paths must be positive");
  require(!plan.h.empty() && !plan.marks.empty(), "simulate: empty step plan");
  require(std::isfinite(a), "simulate: initial value must be finite");
  const Family family = model.family();
  if (family == Family::cir) require(a >= 0, "simulate: CIR initial value must be non-negative");
  if (family == Family::gbm) require(a > 0, "simulate: GBM initial value must be positive");

  const std::size_t n_marks = plan.marks.size();
  const std::size_t n_steps = plan.h.size();
  std::vector<double> sqrt_h(n_steps);
  for (std::size_t s = 0; s < n_steps; ++s) sqrt_h[s] = std::sqrt(plan.h[s]);
  const Transform transform = model.transform;
  std::vector<PathSummary> out(n_paths * n_marks);

  auto run = [&](auto&& step) {
    parallel_for(n_paths, threads, [&](std::size_t p) {
      Rng rng(derive_seed(seed, p));
      double y = a;
      double f_prev = apply_transform(transform, a);
      double integral = 0.0;
      std::size_t mark = 0;
      for (std::size_t s = 0; s < n_steps; ++s) {
        const double value = step(y, plan.h[s], sqrt_h[s], rng.normal());
        const double f_next = apply_transform(transform, value);
        integral = trapezoid_step(integral, f_prev, f_next, plan.h[s]);
        f_prev = f_next;
        if (s + 1 == static_cast<std::size_t>(plan.marks[mark])) out[p * n_marks + mark++] = {value, integral};
      }
    });
  };

  std::visit(overloaded{
                 [&](const Abm& m) {
                   run([mu = m.mu, sigma = m.sigma](double& y, double h, double sh, double z) {
                     return y += mu * h + sigma * sh * z;
                   });
                 },
                 [&](const Gbm& m) {
                   const double drift = m.mu - 0.5 * m.sigma * m.sigma;
                   run([drift, sigma = m.sigma](double& y, double h, double sh, double z) {
                     return y *= std::exp(drift * h + sigma * sh * z);
                   });
                 },
                 [&](const Cir& m) {
                   // Full truncation: the auxiliary state may dip below zero, the
                   // process value is its positive part.
                   run([m](double& y, double h, double sh, double z) {
                     const double pos = std::max(y, 0.0);
                     y += m.kappa * h * (m.ybar - pos) + m.gamma * sh * std::sqrt(pos) * z;
                     return std::max(y, 0.0);
                   });
                 },
             },
             model.dynamics);
  return out;
}

std::vector<PathSummary> simulate_batch(const ModelSpec& model, double a, std::size_t n_paths, int n_steps,
                                        std::uint64_t seed, unsigned threads) {
  validate(model);
  require(n_steps >= 2, "simulate_batch: n_steps must be at least 2");
  StepPlan plan;
  plan.h.assign(static_cast<std::size_t>(n_steps), model.dt_total / n_steps);
  plan.marks = {n_steps};
  return simulate_plan(model, a, n_paths, plan, seed, threads);
}

std::vector<double> cir_terminal_sample(const ModelSpec& model, double v0, std::size_t n, std::uint64_t seed) {
  validate(model);
  const auto* cir = std::get_if<Cir>(&model.dynamics);
  require(cir != nullptr, "cir_terminal_sample: model is not CIR");
  require(std::isfinite(v0) && v0 >= 0, "cir_terminal_sample: v0 must be non-negative");

  const double decay = std::exp(-cir->kappa * model.dt_total);
  const double d = 4.0 * cir->kappa * cir->ybar / (cir->gamma * cir->gamma);
  const double c = cir->gamma * cir->gamma * (1.0 - decay) / (4.0 * cir->kappa);
  const double lambda = v0 * decay / c;

  std::vector<double> out(n);
  const std::size_t chunks = (n + kDrawChunk - 1) / kDrawChunk;
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    Rng rng(derive_seed(seed, chunk));
    std::poisson_distribution<long> poisson(lambda > 0 ? 0.5 * lambda : 1.0);
    const std::size_t hi = std::min(n, (chunk + 1) * kDrawChunk);
    for (std::size_t i = chunk * kDrawChunk; i < hi; ++i) {
      const long k = lambda > 0 ? poisson(rng) : 0;
      std::gamma_distribution<double> gamma(0.5 * d + static_cast<double>(k), 2.0);
      out[i] = c * gamma(rng);
    }
  }
  return out;
}

std::vector<double> terminal_quantiles(const ModelSpec& model, double a, std::span<const double> levels) {
  validate(model);
  for (double p : levels) {
    if (!(p > 0 && p < 1)) throw std::domain_error("terminal_quantile: level must lie in (0, 1)");
  }
  const double dt = model.dt_total;
  std::vector<double> out;
  out.reserve(levels.size());
  std::visit(overloaded{
                 [&](const Abm& m) {
                   for (double p : levels) out.push_back(a + m.mu * dt + m.sigma * std::sqrt(dt) * std_normal_inv_cdf(p));
                 },
                 [&](const Gbm& m) {
                   require(a > 0, "terminal_quantile: GBM initial value must be positive");
                   const double loc = std::log(a) + (m.mu - 0.5 * m.sigma * m.sigma) * dt;
                   for (double p : levels) out.push_back(std::exp(loc + m.sigma * std::sqrt(dt) * std_normal_inv_cdf(p)));
                 },
                 [&](const Cir& m) {
                   require(a >= 0, "terminal_quantile: CIR initial value must be non-negative");
                   const double decay = std::exp(-m.kappa * dt);
                   const double c = m.gamma * m.gamma * (1.0 - decay) / (4.0 * m.kappa);
                   const double d = 4.0 * m.kappa * m.ybar / (m.gamma * m.gamma);
                   const boost::math::non_central_chi_squared law(d, a * decay / c);
                   for (double p : levels) out.push_back(c * boost::math::quantile(law, p));
                 },
             },
             model.dynamics);
  return out;
}

double terminal_quantile(const ModelSpec& model, double a, double p) {
  const double level[] = {p};
  return terminal_quantiles(model, a, level).front();
}

GaussianLaw abm_bridge_integral_law(double a, double b, double sigma, double dt) {
  if (!(sigma >= 0)) throw std::invalid_argument("abm_bridge_integral_law: sigma must be non-negative");
  return {0.5 * dt * (a + b), sigma * std::pow(dt, 1.5) / std::sqrt(12.0)};
}

}  // namespace sl
