#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrrt/io.hpp"

namespace hrrt {

/// Rectangular 2D lattice over a slice of control space. Controls not named
/// by an axis are pinned (explicitly, or to the start control).
struct GridSpec {
  std::string x_name, y_name;
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  int x_n = 1, y_n = 1;
  std::map<std::string, double> pins;
};

/// Parses "name=lo:hi:n" into one grid axis.
void parse_grid_axis(const std::string& spec, std::string& name, double& lo, double& hi, int& n);

/// Applies "a.b.c=value" dotted-path overrides; values parse as JSON when
/// possible, else as strings.
void apply_overrides(json& config, const std::vector<std::string>& overrides);

/// Planner parameters from the config's planner block plus the model's goal.
PlannerParams planner_params_from_config(const json& config, const ScenarioModel& model);

int cmd_plan(const std::string& config_path, const std::vector<std::string>& overrides,
             std::optional<std::uint64_t> seed, const std::string& out_dir);

int cmd_mesh(const std::string& config_path, const std::vector<std::string>& overrides, const GridSpec& grid,
             const std::string& out_dir);

int cmd_metric_field(const std::string& config_path, const std::vector<std::string>& overrides, const GridSpec& grid,
                     const std::string& out_dir);

int cmd_verify(const std::string& out_dir);

}  // namespace hrrt
