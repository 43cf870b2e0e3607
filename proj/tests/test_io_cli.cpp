#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "hrrt/commands.hpp"

using namespace hrrt;
using hrrt::test::load_config;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hrrt_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string config_on_disk(const TempDir& dir, json config) {
  const std::string path = dir.sub("config_in.json");
  write_text_atomic(path, config.dump(2));
  return path;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.5, M_PI, 1e-300, 6.02e23, 0.1}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("sha256 known vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("atomic write leaves no temp files and round-trips content") {
  TempDir dir;
  const std::string path = dir.sub("file.txt");
  write_text_atomic(path, "hello\n");
  CHECK(read_text(path) == "hello\n");
  write_text_atomic(path, "replaced\n");
  CHECK(read_text(path) == "replaced\n");
  size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) {
    (void)e;
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("grid axis parsing") {
  std::string name;
  double lo = 0.0, hi = 0.0;
  int n = 0;
  parse_grid_axis("u_x=-1.5:2.5:30", name, lo, hi, n);
  CHECK(name == "u_x");
  CHECK(lo == -1.5);
  CHECK(hi == 2.5);
  CHECK(n == 30);
  CHECK_THROWS_AS(parse_grid_axis("u_x=1:2", name, lo, hi, n), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("u_x=1:2:0", name, lo, hi, n), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("u_x=2:1:5", name, lo, hi, n), ConfigError);
}

TEST_CASE("dotted-path overrides") {
  json config = {{"planner", {{"epsilon", 1.0}}}};
  apply_overrides(config, {"planner.epsilon=2.5", "planner.seed=7", "scenario=pendulum", "goal=null"});
  CHECK(config["planner"]["epsilon"] == 2.5);
  CHECK(config["planner"]["seed"] == 7);
  CHECK(config["scenario"] == "pendulum");
  CHECK(config["goal"].is_null());
  CHECK_THROWS_AS(apply_overrides(config, {"no_equals_sign"}), ConfigError);
}

TEST_CASE("planner params come from the planner block") {
  json config = load_config("pendulum.json");
  auto model = build_scenario(config);
  PlannerParams p = planner_params_from_config(config, *model);
  CHECK(p.epsilon == 200.0);
  CHECK(p.lambda == 0.5);
  CHECK(p.rng_seed == 1);
  CHECK(p.goal.present);

  config["planner"]["epsilon"] = -1.0;
  CHECK_THROWS_AS(planner_params_from_config(config, *model), ConfigError);
}

TEST_CASE("cmd_plan writes tree, path, and manifest on success") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  CHECK(cmd_plan(cfg, {}, std::nullopt, out) == 0);
  CHECK(fs::exists(fs::path(out) / "tree.json"));
  CHECK(fs::exists(fs::path(out) / "path.csv"));
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  CHECK(fs::exists(fs::path(out) / "config.json"));

  const json tree = json::parse(read_text((fs::path(out) / "tree.json").string()));
  CHECK(tree.at("metadata").at("scenario") == "pendulum");
  CHECK(tree.at("metadata").at("seed") == 1);
  CHECK(tree.at("nodes").size() >= 2);
  const json& root = tree.at("nodes").at(0);
  CHECK(root.at("parent").is_null());
  CHECK(root.at("cumulative_phi") == 0.0);

  // The run verifies cleanly.
  CHECK(cmd_verify(out) == 0);
}

TEST_CASE("cmd_plan with zero extensions exits 2 with a root-only tree") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  CHECK(cmd_plan(cfg, {"planner.max_nodes=0", "goal=null"}, std::nullopt, out) == 2);
  const json tree = json::parse(read_text((fs::path(out) / "tree.json").string()));
  CHECK(tree.at("nodes").size() == 1);
  CHECK_FALSE(fs::exists(fs::path(out) / "path.csv"));
}

TEST_CASE("cmd_plan on a malformed config exits 1 without partial outputs") {
  TempDir dir;
  const std::string cfg = dir.sub("broken.json");
  write_text_atomic(cfg, "{not json");
  const std::string out = dir.sub("run");
  CHECK(cmd_plan(cfg, {}, std::nullopt, out) == 1);
  CHECK_FALSE(fs::exists(fs::path(out) / "tree.json"));
  CHECK_FALSE(fs::exists(fs::path(out) / "manifest.json"));
}

TEST_CASE("cmd_plan seed flag overrides the config seed") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  CHECK(cmd_plan(cfg, {"planner.max_nodes=5", "goal=null"}, 42, out) == 2);
  const json tree = json::parse(read_text((fs::path(out) / "tree.json").string()));
  CHECK(tree.at("metadata").at("seed") == 42);
  const json manifest = json::parse(read_text((fs::path(out) / "manifest.json").string()));
  CHECK(manifest.at("seed") == 42);
}

TEST_CASE("tree serialization round-trips numerically") {
  auto model = build_scenario(load_config("pendulum.json"));
  PlannerParams params = planner_params_from_config(load_config("pendulum.json"), *model);
  params.max_nodes = 10;
  params.goal = {};
  PlanResult result = plan(*model, model->start(), params);
  const std::string doc = tree_to_json(result.tree, *model, params, "deadbeef");
  const json parsed = json::parse(doc);
  REQUIRE(parsed.at("nodes").size() == result.tree.nodes.size());
  for (size_t i = 0; i < result.tree.nodes.size(); ++i) {
    const TreeNode& node = result.tree.nodes[i];
    const json& jn = parsed.at("nodes").at(i);
    CHECK(jn.at("id").get<int>() == node.id);
    for (int k = 0; k < node.eq.point.z.size(); ++k) {
      CHECK(jn.at("z").at(k).get<double>() == node.eq.point.z[k]);
    }
    CHECK(jn.at("edge_phi").get<double>() == node.edge_phi);
    CHECK(jn.at("W").get<double>() == node.eq.W);
  }
}

TEST_CASE("path csv has cumulative time and phi plus control forces") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  REQUIRE(cmd_plan(cfg, {}, std::nullopt, out) == 0);
  std::ifstream in((fs::path(out) / "path.csv").string());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,u_x,u_y,z_theta,phi,W,f_ctrl_u_x,f_ctrl_u_y");

  double prev_t = -1.0, prev_phi = -1.0;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 8);
    CHECK(v[0] >= prev_t);
    CHECK(v[4] >= prev_phi);
    prev_t = v[0];
    prev_phi = v[4];
    ++rows;
  }
  CHECK(rows > 10);
}

TEST_CASE("cmd_mesh on a tiny grid") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("mesh");
  GridSpec grid;
  grid.x_name = "u_x";
  grid.x_lo = -0.5;
  grid.x_hi = 0.5;
  grid.x_n = 3;
  grid.y_name = "u_y";
  grid.y_lo = -1.2;
  grid.y_hi = -0.8;
  grid.y_n = 3;
  CHECK(cmd_mesh(cfg, {}, grid, out) == 0);
  std::ifstream in((fs::path(out) / "mesh.csv").string());
  std::string header;
  std::getline(in, header);
  CHECK(header == "i,j,u_x,u_y,branch,z_theta,W,det_hzz,stable");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows >= 9);  // at least one branch per grid point
  CHECK(cmd_verify(out) == 0);
}

TEST_CASE("grids above the size limit are refused") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  GridSpec grid;
  grid.x_name = "u_x";
  grid.x_lo = 0.0;
  grid.x_hi = 1.0;
  grid.x_n = 2000;
  grid.y_name = "u_y";
  grid.y_lo = 0.0;
  grid.y_hi = 1.0;
  grid.y_n = 2000;
  CHECK(cmd_mesh(cfg, {}, grid, dir.sub("mesh")) == 1);
}

TEST_CASE("cmd_metric_field emits eigen data") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("field");
  GridSpec grid;
  grid.x_name = "u_x";
  grid.x_lo = -0.3;
  grid.x_hi = 0.3;
  grid.x_n = 2;
  grid.y_name = "u_y";
  grid.y_lo = -1.2;
  grid.y_hi = -1.0;
  grid.y_n = 2;
  CHECK(cmd_metric_field(cfg, {}, grid, out) == 0);
  std::ifstream in((fs::path(out) / "metric_field.csv").string());
  std::string header;
  std::getline(in, header);
  CHECK(header == "i,j,u_x,u_y,branch,z_theta,W,det_hzz,obstacle,eig_1,eig_2,min_eig_angle,ellipse_area");
}

TEST_CASE("verify flags a tampered cumulative_phi") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  REQUIRE(cmd_plan(cfg, {"planner.max_nodes=10", "goal=null"}, std::nullopt, out) == 2);

  const fs::path tree_path = fs::path(out) / "tree.json";
  json tree = json::parse(read_text(tree_path.string()));
  tree["nodes"][1]["cumulative_phi"] = tree["nodes"][1]["cumulative_phi"].get<double>() + 1.0;
  const std::string tampered = tree.dump(1);
  write_text_atomic(tree_path.string(), tampered);

  // Keep the manifest hash consistent so only the invariant trips.
  const fs::path manifest_path = fs::path(out) / "manifest.json";
  json manifest = json::parse(read_text(manifest_path.string()));
  manifest["outputs"]["tree.json"] = sha256_hex(tampered);
  write_text_atomic(manifest_path.string(), manifest.dump(1));

  CHECK(cmd_verify(out) == 3);
}

TEST_CASE("verify flags a manifest hash mismatch") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  REQUIRE(cmd_plan(cfg, {"planner.max_nodes=10", "goal=null"}, std::nullopt, out) == 2);
  const fs::path manifest_path = fs::path(out) / "manifest.json";
  json manifest = json::parse(read_text(manifest_path.string()));
  manifest["outputs"]["tree.json"] = std::string(64, '0');
  write_text_atomic(manifest_path.string(), manifest.dump(1));
  CHECK(cmd_verify(out) == 3);
}

TEST_CASE("verify flags a manifest seed that disagrees with the tree") {
  TempDir dir;
  const std::string cfg = config_on_disk(dir, load_config("pendulum.json"));
  const std::string out = dir.sub("run");
  REQUIRE(cmd_plan(cfg, {"planner.max_nodes=10", "goal=null"}, std::nullopt, out) == 2);
  const fs::path manifest_path = fs::path(out) / "manifest.json";
  json manifest = json::parse(read_text(manifest_path.string()));
  manifest["seed"] = 999;
  write_text_atomic(manifest_path.string(), manifest.dump(1));
  CHECK(cmd_verify(out) == 3);
}

TEST_CASE("verify on a missing directory exits 1") {
  CHECK(cmd_verify("/nonexistent/dir") == 1);
}
