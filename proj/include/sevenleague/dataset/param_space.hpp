#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sevenleague/models/sde.hpp"

namespace sl {

enum class SamplingMethod { lhs, equally_spaced };

/// One input of the regressor: its admissible range, how many values the
/// training set draws, and how they are drawn.
struct ParamAxis {
  std::string name;
  double lo = 0;
  double hi = 1;
  int count = 1;
  SamplingMethod method = SamplingMethod::lhs;
};

/// The parameter space a training set covers. Axis order fixes the regressor's
/// input order; parameters not listed take their value from `fixed` (or 0).
/// Recognised names: ABM/GBM mu, sigma, dt; CIR kappa, ybar, gamma, dt.
struct ParamSpace {
  Family family = Family::abm;
  Transform transform = Transform::identity;
  std::vector<ParamAxis> axes;
  std::map<std::string, double> fixed;

  int dim() const { return static_cast<int>(axes.size()); }
  std::vector<std::string> names() const;
  /// Index of the axis named `name`, or -1.
  int index_of(const std::string& name) const;
};

/// Throws std::invalid_argument on unknown names, lo >= hi, count < 1, or a missing
/// equally spaced dt axis.
void validate(const ParamSpace& space);

/// Builds the model at parameter vector theta (ordered as space.axes).
ModelSpec model_from_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Theta ordered as space.axes, looked up by name. Throws std::invalid_argument
/// when an axis has no value.
Eigen::VectorXd theta_from_values(const ParamSpace& space, const std::map<std::string, double>& values);

/// Min-max scaling with the declared ranges, not the data.
Eigen::VectorXd scale_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta);
Eigen::VectorXd unscale_theta(const ParamSpace& space, const Eigen::Ref<const Eigen::VectorXd>& scaled);

/// Full-scale parameter ranges and counts per family.
ParamSpace full_param_space(Family family);
/// Same ranges, 100 joint LHS points crossed with 20 dt values.
ParamSpace desk_param_space(Family family);
/// Driftless GBM with the square transform on inputs (sigma, dt): the integrated
/// squared volatility of the SABR model.
ParamSpace sabr_param_space(int lhs_count = 100, int dt_count = 20);

std::string to_string(SamplingMethod method);
SamplingMethod sampling_method_from_string(const std::string& name);

nlohmann::json to_json(const ParamSpace& space);
ParamSpace param_space_from_json(const nlohmann::json& doc);

}  // namespace sl
