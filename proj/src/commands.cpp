#include "hrrt/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace hrrt {

namespace fs = std::filesystem;

void parse_grid_axis(const std::string& spec, std::string& name, double& lo, double& hi, int& n) {
  const auto eq = spec.find('=');
  const auto c1 = spec.find(':', eq == std::string::npos ? 0 : eq + 1);
  const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigError("grid axis must look like name=lo:hi:n, got '" + spec + "'");
  }
  name = spec.substr(0, eq);
  try {
    lo = std::stod(spec.substr(eq + 1, c1 - eq - 1));
    hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    n = std::stoi(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("grid axis has non-numeric parts: '" + spec + "'");
  }
  if (n < 1) throw ConfigError("grid axis count must be >= 1: '" + spec + "'");
  if (n > 1 && !(hi > lo)) throw ConfigError("grid axis needs hi > lo when n > 1: '" + spec + "'");
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override must look like key=value, got '" + ov + "'");
    const std::string path = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);

    json* node = &config;
    size_t pos = 0;
    while (true) {
      const auto dot = path.find('.', pos);
      const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (key.empty()) throw ConfigError("override has an empty path segment: '" + ov + "'");
      if (dot == std::string::npos) {
        json parsed = json::parse(value, nullptr, false);
        (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
        break;
      }
      node = &(*node)[key];
      pos = dot + 1;
    }
  }
}

PlannerParams planner_params_from_config(const json& config, const ScenarioModel& model) {
  PlannerParams p;
  p.goal = model.goal();
  if (!config.contains("planner")) return p;
  const json& pl = config.at("planner");
  p.epsilon = pl.value("epsilon", p.epsilon);
  p.lambda = pl.value("lambda", p.lambda);
  p.beta = pl.value("beta", p.beta);
  p.max_nodes = pl.value("max_nodes", p.max_nodes);
  p.rng_seed = pl.value("seed", p.rng_seed);
  p.eta = pl.value("eta", p.eta);
  p.dt = pl.value("dt", p.dt);
  if (pl.contains("sigma")) {
    const VectorXd diag = parse_vector(pl.at("sigma"), model.control_dim(), "planner.sigma");
    if ((diag.array() <= 0.0).any()) throw ConfigError("planner.sigma entries must be positive");
    p.sigma = diag.asDiagonal();
  }
  if (!(p.epsilon > 0.0)) throw ConfigError("planner.epsilon must be > 0");
  if (!(p.lambda > 0.0)) throw ConfigError("planner.lambda must be > 0");
  if (p.beta < 0.0) throw ConfigError("planner.beta must be >= 0");
  if (p.max_nodes < 0) throw ConfigError("planner.max_nodes must be >= 0");
  return p;
}

namespace {

json load_effective_config(const std::string& config_path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed) {
  json config;
  try {
    config = json::parse(read_text(config_path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + config_path + ": " + e.what());
  }
  apply_overrides(config, overrides);
  if (seed) config["planner"]["seed"] = *seed;
  return config;
}

struct OutputSet {
  fs::path dir;
  std::vector<ManifestEntry> entries;

  void add(const std::string& file, const std::string& content) {
    write_text_atomic((dir / file).string(), content);
    entries.push_back({file, sha256_hex(content)});
  }
};

/// Builds the full control vector for one grid point.
VectorXd grid_control(const ScenarioModel& model, const GridSpec& grid, int ix, int iy, int axis_x, int axis_y) {
  VectorXd u = model.start().u;
  for (const auto& [name, value] : grid.pins) {
    const auto& names = model.control_names();
    const auto it = std::find(names.begin(), names.end(), name);
    u[it - names.begin()] = value;
  }
  u[axis_x] = grid.x_n == 1 ? grid.x_lo : grid.x_lo + ix * (grid.x_hi - grid.x_lo) / (grid.x_n - 1);
  u[axis_y] = grid.y_n == 1 ? grid.y_lo : grid.y_lo + iy * (grid.y_hi - grid.y_lo) / (grid.y_n - 1);
  return u;
}

int control_index(const ScenarioModel& model, const std::string& name) {
  const auto& names = model.control_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ConfigError("unknown control coordinate '" + name + "' for scenario " + model.name());
  }
  return static_cast<int>(it - names.begin());
}

void check_grid(const ScenarioModel& model, const GridSpec& grid, int& axis_x, int& axis_y) {
  axis_x = control_index(model, grid.x_name);
  axis_y = control_index(model, grid.y_name);
  if (axis_x == axis_y) throw ConfigError("grid axes must name two different control coordinates");
  for (const auto& [name, value] : grid.pins) {
    (void)value;
    control_index(model, name);
  }
  const long total = static_cast<long>(grid.x_n) * grid.y_n;
  if (total > 1000000L) {
    throw ConfigError("grid has " + std::to_string(total) +
                      " points; the limit is 10^6. Split the sweep into smaller slices.");
  }
}

int run_grid_command(const std::string& command, const std::string& config_path,
                     const std::vector<std::string>& overrides, const GridSpec& grid, const std::string& out_dir,
                     bool metric_mode) {
  const auto t0 = std::chrono::steady_clock::now();
  json config = load_effective_config(config_path, overrides, std::nullopt);
  auto model = build_scenario(config);
  const PlannerParams params = planner_params_from_config(config, *model);
  int axis_x = 0, axis_y = 0;
  check_grid(*model, grid, axis_x, axis_y);
  fs::create_directories(out_dir);

  std::string csv = "i,j";
  for (const auto& n : model->control_names()) csv += "," + n;
  csv += ",branch";
  if (metric_mode) {
    for (const auto& n : model->state_names()) csv += "," + n;
    csv += ",W,det_hzz,obstacle";
    for (int e = 0; e < model->control_dim(); ++e) csv += ",eig_" + std::to_string(e + 1);
    csv += ",min_eig_angle,ellipse_area";
  } else {
    for (const auto& n : model->state_names()) csv += "," + n;
    csv += ",W,det_hzz,stable";
  }
  csv += "\n";

  for (int j = 0; j < grid.y_n; ++j) {
    for (int i = 0; i < grid.x_n; ++i) {
      const VectorXd u = grid_control(*model, grid, i, j, axis_x, axis_y);
      const BranchSet branches = enumerate_branches(*model, u, model->default_seed_grid(u));
      for (size_t b = 0; b < branches.equilibria.size(); ++b) {
        const EquilibriumPoint& eq = branches.equilibria[b];
        std::string row = std::to_string(i) + "," + std::to_string(j);
        for (int c = 0; c < u.size(); ++c) row += "," + format_double(u[c]);
        row += "," + std::to_string(b);
        for (int s = 0; s < eq.point.z.size(); ++s) row += "," + format_double(eq.point.z[s]);
        row += "," + format_double(eq.W) + "," + format_double(eq.hess_det);
        if (metric_mode) {
          row += "," + std::string(eq.hess_det <= params.lambda ? "1" : "0");
          double area = std::numeric_limits<double>::quiet_NaN();
          VectorXd eigs = VectorXd::Constant(model->control_dim(), area);
          double angle = area;
          try {
            const HapticMetric metric = haptic_metric(*model, eq);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(metric.G_squared);
            eigs = es.eigenvalues();
            const VectorXd v = es.eigenvectors().col(0);  // smallest eigenvalue
            angle = std::atan2(v[1], v[0]);
            area = M_PI / std::sqrt(eigs.prod());
          } catch (const NearSingularMetricError&) {
            // leave NaN markers in place
          }
          for (int e = 0; e < eigs.size(); ++e) row += "," + format_double(eigs[e]);
          row += "," + format_double(angle) + "," + format_double(area);
        } else {
          row += std::string(",") + (eq.stable ? "1" : "0");
        }
        csv += row + "\n";
      }
    }
  }

  OutputSet outputs{fs::path(out_dir), {}};
  const std::string config_dump = config.dump(2) + "\n";
  outputs.add("config.json", config_dump);
  outputs.add(metric_mode ? "metric_field.csv" : "mesh.csv", csv);
  const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json ov_json = json::array();
  for (const auto& ov : overrides) ov_json.push_back(ov);
  ov_json.push_back("grid:" + grid.x_name + "," + grid.y_name);
  write_text_atomic((fs::path(out_dir) / "manifest.json").string(),
                    manifest_to_json(command, "config.json", params.rng_seed, ov_json, dur, outputs.entries));
  return 0;
}

}  // namespace

int cmd_plan(const std::string& config_path, const std::vector<std::string>& overrides,
             std::optional<std::uint64_t> seed, const std::string& out_dir) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    json config = load_effective_config(config_path, overrides, seed);
    auto model = build_scenario(config);
    const PlannerParams params = planner_params_from_config(config, *model);

    const PlanResult result = plan(*model, model->start(), params);

    fs::create_directories(out_dir);
    OutputSet outputs{fs::path(out_dir), {}};
    const std::string config_dump = config.dump(2) + "\n";
    outputs.add("config.json", config_dump);
    outputs.add("tree.json", tree_to_json(result.tree, *model, params, sha256_hex(config_dump)));
    if (result.goal_node) {
      const Path path = extract_path(result.tree, *result.goal_node);
      outputs.add("path.csv", path_to_csv(result.tree, path, *model));
    }
    const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json ov_json = json::array();
    for (const auto& ov : overrides) ov_json.push_back(ov);
    write_text_atomic((fs::path(out_dir) / "manifest.json").string(),
                      manifest_to_json("plan", "config.json", params.rng_seed, ov_json, dur, outputs.entries));
    return result.goal_node ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "plan: " << e.what() << "\n";
    return 1;
  }
}

int cmd_mesh(const std::string& config_path, const std::vector<std::string>& overrides, const GridSpec& grid,
             const std::string& out_dir) {
  try {
    return run_grid_command("mesh", config_path, overrides, grid, out_dir, false);
  } catch (const std::exception& e) {
    std::cerr << "mesh: " << e.what() << "\n";
    return 1;
  }
}

int cmd_metric_field(const std::string& config_path, const std::vector<std::string>& overrides, const GridSpec& grid,
                     const std::string& out_dir) {
  try {
    return run_grid_command("metric-field", config_path, overrides, grid, out_dir, true);
  } catch (const std::exception& e) {
    std::cerr << "metric-field: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& out_dir) {
  int failures = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
  };
  try {
    const fs::path dir(out_dir);
    const json manifest = json::parse(read_text((dir / "manifest.json").string()));

    for (const auto& [file, hash] : manifest.at("outputs").items()) {
      std::string actual;
      try {
        actual = sha256_hex(read_text((dir / file).string()));
      } catch (const std::exception&) {
        report(false, "output present: " + file);
        continue;
      }
      report(actual == hash.get<std::string>(), "hash of " + file);
    }

    if (fs::exists(dir / "tree.json")) {
      const json tree = json::parse(read_text((dir / "tree.json").string()));
      auto model = build_scenario(json::parse(read_text((dir / "config.json").string())));
      const json& nodes = tree.at("nodes");

      if (manifest.contains("seed")) {
        report(tree.at("metadata").at("seed").get<std::uint64_t>() == manifest.at("seed").get<std::uint64_t>(),
               "manifest seed matches the tree metadata");
      }

      bool parents_ok = true, phi_ok = true, dead_ok = true, residual_ok = true, monotone_ok = true;
      std::string detail_phi, detail_dead, detail_res;
      for (const json& n : nodes) {
        const int id = n.at("id").get<int>();
        if (n.at("parent").is_null()) {
          if (id != 0) parents_ok = false;
          continue;
        }
        const int parent = n.at("parent").get<int>();
        if (parent < 0 || parent >= static_cast<int>(nodes.size()) || parent >= id) {
          parents_ok = false;
          continue;
        }
        const json& pn = nodes.at(parent);
        const double expect = pn.at("cumulative_phi").get<double>() + n.at("edge_phi").get<double>();
        if (std::abs(expect - n.at("cumulative_phi").get<double>()) > 1e-9) {
          phi_ok = false;
          detail_phi = " (node " + std::to_string(id) + ")";
        }
        if (n.at("cumulative_phi").get<double>() < pn.at("cumulative_phi").get<double>() - 1e-12) {
          monotone_ok = false;
        }
        if (pn.at("dead_end").get<bool>()) {
          dead_ok = false;
          detail_dead = " (node " + std::to_string(id) + ")";
        }
        if (!n.at("dead_end").get<bool>()) {
          VectorXd z(model->state_dim()), u(model->control_dim());
          for (int k = 0; k < z.size(); ++k) z[k] = n.at("z").at(k).get<double>();
          for (int k = 0; k < u.size(); ++k) u[k] = n.at("u").at(k).get<double>();
          if (model->state_gradient({z, u}).norm() > 1e-5) {
            residual_ok = false;
            detail_res = " (node " + std::to_string(id) + ")";
          }
        }
      }
      report(parents_ok, "node parents well-formed");
      report(phi_ok, "cumulative_phi additivity" + detail_phi);
      report(monotone_ok, "cumulative_phi nondecreasing along edges");
      report(dead_ok, "no extension from a dead-end node" + detail_dead);
      report(residual_ok, "equilibrium residual <= 1e-5 at live nodes" + detail_res);
    }
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace hrrt
