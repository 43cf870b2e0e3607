#include <CLI11.hpp>

#include "hrrt/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static contact manipulation planner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string grid_x, grid_y;
  std::vector<std::string> pin_args;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--set", overrides, "config override key=value (repeatable)");
  };
  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--grid-x", grid_x, "first grid axis, name=lo:hi:n")->required();
    cmd->add_option("--grid-y", grid_y, "second grid axis, name=lo:hi:n")->required();
    cmd->add_option("--pin", pin_args, "pin a control coordinate, name=value (repeatable)");
  };

  CLI::App* plan = app.add_subcommand("plan", "grow a search tree and extract a goal path");
  add_common(plan, true);
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = plan->add_option("--seed", seed_value, "planner RNG seed");

  CLI::App* mesh = app.add_subcommand("mesh", "enumerate equilibrium branches over a control grid");
  add_common(mesh, true);
  add_grid(mesh);

  CLI::App* metric = app.add_subcommand("metric-field", "export metric-ellipse data over a control grid");
  add_common(metric, true);
  add_grid(metric);

  CLI::App* verify = app.add_subcommand("verify", "re-check invariants of a stored output directory");
  verify->add_option("--out", out_dir, "output directory to verify")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      if (seed_opt->count()) seed = seed_value;
      return hrrt::cmd_plan(config_path, overrides, seed, out_dir);
    }
    hrrt::GridSpec grid;
    if (mesh->parsed() || metric->parsed()) {
      hrrt::parse_grid_axis(grid_x, grid.x_name, grid.x_lo, grid.x_hi, grid.x_n);
      hrrt::parse_grid_axis(grid_y, grid.y_name, grid.y_lo, grid.y_hi, grid.y_n);
      for (const std::string& pin : pin_args) {
        const auto eq = pin.find('=');
        if (eq == std::string::npos) throw hrrt::ConfigError("--pin must look like name=value");
        grid.pins[pin.substr(0, eq)] = std::stod(pin.substr(eq + 1));
      }
    }
    if (mesh->parsed()) return hrrt::cmd_mesh(config_path, overrides, grid, out_dir);
    if (metric->parsed()) return hrrt::cmd_metric_field(config_path, overrides, grid, out_dir);
    return hrrt::cmd_verify(out_dir);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
