#include "sevenleague/dataset/param_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace sl {

namespace {

std::vector<std::string> allowed_names(Family family) {
  if (family == Family::cir) return {"kappa", "ybar", "gamma", "dt"};
  return {"mu", "sigma", "dt"};
}

}  // namespace

std::vector<std::string> ParamSpace::names() const {
  std::vector<std::string> out;
  for (const auto& axis : axes) out.push_back(axis.name);
  return out;
}

int ParamSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void validate(const ParamSpace& space) {
  const auto allowed = allowed_names(space.family);
  auto known = [&](const std::string& n) { return std::find(allowed.begin(), allowed.end(), n) != allowed.end(); };
  if (space.axes.empty()) throw std::invalid_argument("param space: no axes");
  int lhs_count = -1;
  for (const auto& axis : space.axes) {
    if (!known(axis.name)) throw std::invalid_argument("param space: unknown parameter '" + axis.name + "'");
    if (!(axis.lo < axis.hi)) throw std::invalid_argument("param space: '" + axis.name + "' needs lo < hi");
    if (axis.count < 1) throw std::invalid_argument("param space: '" + axis.name + "' needs count >= 1");
    if (axis.name == "dt" && axis.method != SamplingMethod::equally_spaced) {
      throw std::invalid_argument("param space: dt must be equally spaced");
    }
    if (axis.name != "dt" && axis.method != SamplingMethod::lhs) {
      throw std::invalid_argument("param space: only dt may be equally spaced");
    }
    if (axis.method == SamplingMethod::lhs) {
      if (lhs_count >= 0 && lhs_count != axis.count) {
        throw std::invalid_argument("param space: LHS axes form one joint design and need equal counts");
      }
      lhs_count = axis.count;
    }
  }
  if (space.index_of("dt") < 0) throw std::invalid_argument("param space: dt axis is required");
  for (const auto& [name, value] : space.fixed) {
    if (!known(name)) throw std::invalid_argument("param space: unknown fixed parameter '" + name + "'");
    (void)value;
  }
}

ModelSpec model_from_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != space.dim()) throw std::invalid_argument("model_from_theta: theta has wrong dimension");
  auto get = [&](const std::string& name) {
    if (const int i = space.index_of(name); i >= 0) return theta[i];
    if (auto it = space.fixed.find(name); it != space.fixed.end()) return it->second;
    return 0.0;
  };
  ModelSpec model;
  model.transform = space.transform;
  model.dt_total = get("dt");
  switch (space.family) {
    case Family::abm: model.dynamics = Abm{get("mu"), get("sigma")}; break;
    case Family::gbm: model.dynamics = Gbm{get("mu"), get("sigma")}; break;
    case Family::cir: model.dynamics = Cir{get("kappa"), get("ybar"), get("gamma")}; break;
  }
  return model;
}

Eigen::VectorXd theta_from_values(const ParamSpace& space, const std::map<std::string, double>& values) {
  Eigen::VectorXd theta(space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    const auto& name = space.axes[static_cast<std::size_t>(j)].name;
    const auto it = values.find(name);
    if (it == values.end()) throw std::invalid_argument("theta: no value for '" + name + "'");
    theta[j] = it->second;
  }
  return theta;
}

Eigen::VectorXd scale_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  Eigen::VectorXd out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const auto& axis = space.axes[static_cast<std::size_t>(i)];
    out[i] = (theta[i] - axis.lo) / (axis.hi - axis.lo);
  }
  return out;
}

Eigen::VectorXd unscale_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& scaled) {
  Eigen::VectorXd out(scaled.size());
  for (Eigen::Index i = 0; i < scaled.size(); ++i) {
    const auto& axis = space.axes[static_cast<std::size_t>(i)];
    out[i] = axis.lo + scaled[i] * (axis.hi - axis.lo);
  }
  return out;
}

ParamSpace full_param_space(Family family) {
  ParamSpace space;
  space.family = family;
  const ParamAxis dt{"dt", 0.10, 1.09, 100, SamplingMethod::equally_spaced};
  switch (family) {
    case Family::abm:
      space.axes = {{"mu", 0.0, 0.1, 600}, {"sigma", 0.01, 0.60, 600}, dt};
      break;
    case Family::gbm:
      space.axes = {{"mu", 0.0, 0.1, 600}, {"sigma", 0.05, 0.60, 600}, dt};
      break;
    case Family::cir:
      space.axes = {{"kappa", 0.5, 1.5, 500}, {"ybar", 0.01, 0.50, 500}, {"gamma", 0.1, 0.5, 500}, dt};
      break;
  }
  return space;
}

ParamSpace desk_param_space(Family family) {
  ParamSpace space = full_param_space(family);
  for (auto& axis : space.axes) axis.count = axis.method == SamplingMethod::lhs ? 100 : 20;
  return space;
}

ParamSpace sabr_param_space(int lhs_count, int dt_count) {
  ParamSpace space;
  space.family = Family::gbm;
  space.transform = Transform::square;
  space.axes = {{"sigma", 0.05, 0.60, lhs_count}, {"dt", 0.10, 1.09, dt_count, SamplingMethod::equally_spaced}};
  space.fixed["mu"] = 0.0;
  return space;
}

std::string to_string(SamplingMethod method) { return method == SamplingMethod::lhs ? "LHS" : "EQ-SP"; }

SamplingMethod sampling_method_from_string(const std::string& name) {
  if (name == "LHS") return SamplingMethod::lhs;
  if (name == "EQ-SP") return SamplingMethod::equally_spaced;
  throw std::invalid_argument("unknown sampling method '" + name + "'");
}

nlohmann::json to_json(const ParamSpace& space) {
  nlohmann::json doc;
  doc["family"] = to_string(space.family);
  doc["transform"] = to_string(space.transform);
  doc["params"] = nlohmann::json::array();
  for (const auto& axis : space.axes) {
    doc["params"].push_back(
        {{"name", axis.name}, {"lo", axis.lo}, {"hi", axis.hi}, {"count", axis.count}, {"method", to_string(axis.method)}});
  }
  doc["fixed"] = space.fixed;
  return doc;
}

ParamSpace param_space_from_json(const nlohmann::json& doc) {
  ParamSpace space;
  space.family = family_from_string(doc.at("family").get<std::string>());
  space.transform = transform_from_string(doc.value("transform", std::string("identity")));
  for (const auto& p : doc.at("params")) {
    ParamAxis axis;
    axis.name = p.at("name").get<std::string>();
    axis.lo = p.at("lo").get<double>();
    axis.hi = p.at("hi").get<double>();
    axis.count = p.at("count").get<int>();
    axis.method = sampling_method_from_string(p.value("method", std::string(axis.name == "dt" ? "EQ-SP" : "LHS")));
    space.axes.push_back(axis);
  }
  if (doc.contains("fixed")) space.fixed = doc.at("fixed").get<std::map<std::string, double>>();
  validate(space);
  return space;
}

}  // namespace sl
